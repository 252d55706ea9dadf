"""Command line surface: encode, convert, eval, tree, oracle.

Exit codes: 0 on success, 1 when the final answer is Unresolved, 2 on
usage or parse errors.  Unresolved digits print as "?", semantic unknown
cells (Gray bot) as "_"; rationals print as p/q.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import codec
from .codec import (
    BOT_CELL,
    EPStream,
    approx,
    extract_gray,
    extract_sd,
    gray_encode,
    gray_prefix_set,
    inject_gray,
    inject_sd,
    parse_stream,
    sd_encode,
    sd_prefix_interval,
)
from .compact import (
    EngineGray,
    OracleGray,
    grayk_to_sdk,
    grayk_truncate,
    gray_lazy,
    hausdorff_trunc,
    sd_tree,
    sdk_to_grayk,
    sdk_truncate,
    tree_value_set,
)
from .engine import OUnresolved, render_obs
from .intervals import IntervalSet, parse_interval_set
from .prelude import load_prelude
from .terms import ParseError, TermError, parse_defs

DEFAULT_FUEL = 10**6
DEFAULT_DEPTH = 16


class CliError(Exception):
    pass


def _frac(text) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise CliError(f"bad rational {text!r}: {exc}") from None


def _fmt_set(s: IntervalSet) -> str:
    return ";".join(f"[{lo},{hi}]" for lo, hi in s.intervals) or "(empty)"


def _digit_str(d, rep) -> str:
    if d is None:
        return "?"
    if rep == "gray" and d == BOT_CELL:
        return "_"
    return str(d)


# ---------------------------------------------------------------------------
# subcommands


def cmd_encode(args) -> int:
    x = _frac(args.value)
    if abs(x) > 1:
        raise CliError(f"{x} outside [-1,1]")
    n = args.digits
    if args.rep == "sd":
        digits, _ = sd_encode(x, n)
        hull = sd_prefix_interval(digits)
    else:
        digits, _ = gray_encode(x, n)
        hull = gray_prefix_set(digits)
    print(" ".join(_digit_str(d, args.rep) for d in digits))
    lo, hi = hull.hull()
    print(f"[{lo},{hi}]")
    return 0


def _input_stream(args, rep) -> tuple:
    """Returns (stream, exact value)."""
    if args.value is not None:
        x = _frac(args.value)
        if abs(x) > 1:
            raise CliError(f"{x} outside [-1,1]")
        stream = (sd_encode if rep == "sd" else gray_encode)(x, 0)[1]
        return stream, x
    if args.stream is not None:
        stream = parse_stream(args.stream, rep)
        value = stream.sd_value() if rep == "sd" else stream.gray_value()
        return stream, value
    raise CliError("need --value or --stream")


def cmd_convert(args) -> int:
    src, dst = args.source, args.target
    n = args.digits
    fuel = args.fuel
    stream, x = _input_stream(args, src)
    prelude = load_prelude()
    e = prelude.engine

    if src == dst:
        out = stream.take(n)
        print(" ".join(_digit_str(d, dst) for d in out))
        return 0

    if src == "sd":
        node = e.apply(
            prelude.node("sd2gray"),
            e.apply(prelude.node("sd_emb"), e.load(inject_sd(stream))),
        )
        cells = extract_gray(e, node, n, fuel)
        print(" ".join(_digit_str(c, "gray") for c in cells))
        oracle = gray_encode(x, n)[0]
        ok = all(
            c is not None or oracle[i] == BOT_CELL for i, c in enumerate(cells)
        )
        return 0 if ok else 1

    node = e.apply(prelude.node("gray2sd"), e.load(inject_gray(stream, "star")))
    digits = extract_sd(e, node, n, fuel)
    print(" ".join(_digit_str(d, "sd") for d in digits))
    return 0 if all(d is not None for d in digits) else 1


def cmd_eval(args) -> int:
    with open(args.file, encoding="utf-8") as fh:
        src = fh.read()
    prelude = load_prelude()
    defs, main = parse_defs(src, dict(prelude.terms))
    if main is None:
        raise CliError(f"{args.file}: no main")
    obs = prelude.engine.observe(main, args.depth, args.fuel, args.policy)
    print(render_obs(obs))
    return 1 if isinstance(obs, OUnresolved) else 0


def _dump_sd(tree, depth) -> str:
    ds = ",".join(str(d) for d in sorted(tree.digits))
    if depth == 0:
        return f"(E={ds})"
    kids = " ".join(
        f"(child {d} {_dump_sd(tree.child(d), depth - 1)})" for d in sorted(tree.digits)
    )
    return f"(E={ds} {kids})" if kids else f"(E={ds})"


def _dump_gray(node, depth, cells) -> str:
    mins = " ".join(_digit_str(node.cell_min(i) if node.cell_min(i) is not None else BOT_CELL, "gray") for i in range(cells))
    maxs = " ".join(_digit_str(node.cell_max(i) if node.cell_max(i) is not None else BOT_CELL, "gray") for i in range(cells))
    parts = [f"min={mins}", f"max={maxs}"]
    if depth > 0:
        for d, name in ((-1, "L"), (1, "R")):
            if node.has_child(d):
                parts.append(f"({name} {_dump_gray(node.child(d), depth - 1, cells)})")
    return "(" + " ".join(parts) + ")"


def cmd_tree(args) -> int:
    K = parse_interval_set(args.set)
    if not K:
        raise CliError("empty set")
    depth = args.depth
    action = args.action

    if action == "value":
        if args.rep == "sdk":
            T = sdk_truncate(K, depth)
        else:
            T = gray_lazy(K)
        print(_fmt_set(tree_value_set(T, depth)))
        return 0

    if action == "encode":
        if args.rep == "sdk":
            print(_dump_sd(sdk_truncate(K, depth), depth))
        else:
            print(_dump_gray(grayk_truncate(K, depth), depth, depth + 1))
        return 0

    if action == "convert":
        if args.rep == "sdk":
            out = sdk_to_grayk(sd_tree(K), load_prelude(), fuel=args.fuel)
            print(_dump_gray(out, depth, depth + 1))
        else:
            out = grayk_to_sdk(gray_lazy(K), depth)
            print(_dump_sd(out, depth))
        return 0

    if action == "dist":
        if args.other is None:
            raise CliError("dist needs --other")
        if args.rep != "sdk":
            raise CliError("dist is defined on sdk trees")
        other = parse_interval_set(args.other)
        if not other:
            raise CliError("empty set")
        d = hausdorff_trunc(sdk_truncate(K, depth), sdk_truncate(other, depth), depth)
        print(d)
        return 0

    raise CliError(f"unknown action {action}")


def cmd_oracle(args) -> int:
    cells = []
    text = args.prefix.strip()
    if text:
        for tok in text.split(","):
            tok = tok.strip()
            if tok == "_":
                if args.rep != "gray":
                    raise CliError("bot cell only exists in gray prefixes")
                cells.append(BOT_CELL)
            else:
                cells.append(int(tok))
    s = sd_prefix_interval(cells) if args.rep == "sd" else gray_prefix_set(cells)
    print(_fmt_set(s))
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ambreal", description=__doc__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("encode", help="canonical digits and exact hull of a rational")
    p.add_argument("value")
    p.add_argument("rep", choices=("sd", "gray"))
    p.add_argument("digits", nargs="?", type=int, default=DEFAULT_DEPTH)
    p.set_defaults(fn=cmd_encode)

    p = sub.add_parser("convert", help="engine-driven stream conversion")
    p.add_argument("source", choices=("sd", "gray"))
    p.add_argument("target", choices=("sd", "gray"))
    p.add_argument("--value")
    p.add_argument("--stream")
    p.add_argument("--digits", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.set_defaults(fn=cmd_convert)

    p = sub.add_parser("eval", help="evaluate main of a .cfp file")
    p.add_argument("file")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--policy", choices=("raw", "resolving"), default="resolving")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("tree", help="compact-set tree operations")
    p.add_argument("set")
    p.add_argument("rep", choices=("sdk", "grayk"))
    p.add_argument("depth", type=int)
    p.add_argument("action", choices=("encode", "convert", "value", "dist"))
    p.add_argument("--other")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.set_defaults(fn=cmd_tree)

    p = sub.add_parser("oracle", help="exact interval set of a digit prefix")
    p.add_argument("prefix")
    p.add_argument("rep", choices=("sd", "gray"))
    p.set_defaults(fn=cmd_oracle)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    # digit prefixes may start with "-": shield positionals of oracle
    if argv and argv[0] == "oracle" and "--" not in argv:
        argv = [argv[0], "--"] + argv[1:]
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (CliError, ParseError, TermError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
