"""Signed-digit and Gray-code representations of rationals in [-1,1].

The canonical encoders work on exact Fractions and return eventually
periodic streams (rational orbits under x -> 2x-d and the tent map revisit
a state after at most ~2*denominator steps).  Prefix oracles map finite
digit words to exact interval sets; they are the ground truth every
engine-level conversion is checked against.

Digit conventions, here and in term encodings:

    signed digit   -1, 0, +1        Left(Left(Nil)) / Right(Nil) / Left(Right(Nil))
    gray cell      -1, +1, bot      Left(Nil) / Right(Nil) / divergence

Gray cell i of x is the sign of t^i(x) where t(x) = 1 - 2|x|; the cell is
bot exactly when that iterate is 0, which happens at most once and only
for dyadic x in (-1,1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .engine import OCon, Obs, OUnresolved, SpineFailure, UNLIMITED
from .intervals import IntervalSet
from .terms import BOT, Con, Term

BOT_CELL = 0  # the unknown-cell marker in gray digit lists


class DomainError(ValueError):
    pass


class ShapeError(Exception):
    """A stream value had the wrong constructor structure."""


def _check_domain(x) -> Fraction:
    x = Fraction(x)
    if abs(x) > 1:
        raise DomainError(f"{x} outside [-1,1]")
    return x


def tent(x) -> Fraction:
    x = _check_domain(x)
    return 1 - 2 * abs(x)


# ---------------------------------------------------------------------------
# eventually periodic streams


@dataclass(frozen=True)
class EPStream:
    """pre . period^omega over some digit alphabet (ints)."""

    pre: tuple
    period: tuple

    def __post_init__(self):
        if not self.period:
            raise ValueError("period must be nonempty")

    def __getitem__(self, i: int) -> int:
        if i < len(self.pre):
            return self.pre[i]
        return self.period[(i - len(self.pre)) % len(self.period)]

    def take(self, n: int) -> list:
        return [self[i] for i in range(n)]

    def sd_value(self) -> Fraction:
        """Exact value of a signed-digit stream: sum of w_i * 2^-(i+1)."""
        k = len(self.period)
        per = sum(Fraction(d, 2 ** (i + 1)) for i, d in enumerate(self.period))
        tail = per / (1 - Fraction(1, 2**k))
        val = tail
        for d in reversed(self.pre):
            val = (val + d) / 2
        return val

    def gray_value(self) -> Fraction:
        """Exact value of a gray stream; bot cells resolve to either branch."""
        # compose the affine cell maps over pre + one period, then take the
        # fixed point of the period part: each map is x -> -c(x-1)/2
        a, b = Fraction(1), Fraction(0)  # running composition f(x) = a*x+b
        for c in self.period:
            cc = -1 if c == BOT_CELL else c
            # g_c(x) = -c*(x-1)/2, composed on the inside
            a, b = a * Fraction(-cc, 2), a * Fraction(cc, 2) + b
        x = b / (1 - a)
        for c in reversed(self.pre):
            cc = -1 if c == BOT_CELL else c
            x = Fraction(-cc, 2) * (x - 1)
        return x


def parse_stream(text: str, rep: str) -> EPStream:
    """CLI stream literal "pre;period", digits comma-separated, "_" for bot."""

    def digits(s):
        out = []
        for tok in s.split(","):
            tok = tok.strip()
            if not tok:
                continue
            if tok == "_":
                if rep != "gray":
                    raise ValueError("bot cell only exists in gray streams")
                out.append(BOT_CELL)
            else:
                d = int(tok)
                if rep == "sd" and d not in (-1, 0, 1):
                    raise ValueError(f"bad signed digit {tok}")
                if rep == "gray" and d not in (-1, 1):
                    raise ValueError(f"bad gray cell {tok}")
                out.append(d)
        return tuple(out)

    if ";" in text:
        pre, per = text.split(";", 1)
        return EPStream(digits(pre), digits(per))
    return EPStream((), digits(text))


# ---------------------------------------------------------------------------
# canonical encoders


def sd_encode(x, n: int) -> tuple:
    """First n signed digits of x plus the full eventually periodic stream.

    Digit choice: -1 below -1/4, +1 above 1/4, else 0; then recurse on
    2x - d.  Thresholds are symmetric so negation flips digits exactly.
    """
    x = _check_domain(x)
    digits = []
    seen = {}
    pre, period = None, None
    cur = x
    i = 0
    while True:
        if cur in seen:
            start = seen[cur]
            pre, period = tuple(digits[:start]), tuple(digits[start:])
            break
        seen[cur] = i
        if cur <= Fraction(-1, 4):
            d = -1
        elif cur >= Fraction(1, 4):
            d = 1
        else:
            d = 0
        digits.append(d)
        cur = 2 * cur - d
        i += 1
    stream = EPStream(pre, period)
    return stream.take(n), stream


def gray_encode(x, n: int) -> tuple:
    """First n gray cells of x (sign of the tent orbit) plus the stream."""
    x = _check_domain(x)
    cells = []
    seen = {}
    cur = x
    i = 0
    while True:
        if cur in seen:
            start = seen[cur]
            pre, period = tuple(cells[:start]), tuple(cells[start:])
            break
        seen[cur] = i
        cells.append(-1 if cur < 0 else (1 if cur > 0 else BOT_CELL))
        cur = 1 - 2 * abs(cur)
        i += 1
    stream = EPStream(pre, period)
    return stream.take(n), stream


# ---------------------------------------------------------------------------
# prefix oracles


def sd_prefix_interval(w: Sequence[int]) -> IntervalSet:
    """Exact image of [-1,1] under the affine maps of a signed digit word."""
    lo, hi = Fraction(-1), Fraction(1)
    for d in reversed(list(w)):
        lo, hi = (lo + d) / 2, (hi + d) / 2
    return IntervalSet([(lo, hi)])


def gray_prefix_set(cells: Sequence[int]) -> IntervalSet:
    """Union over all resolutions of bot cells of the gray map images."""
    sets = [(Fraction(-1), Fraction(1))]
    for c in reversed(list(cells)):
        branches = (-1, 1) if c == BOT_CELL else (c,)
        nxt = []
        for lo, hi in sets:
            for cc in branches:
                # g_c(x) = -c*(x-1)/2
                u = Fraction(-cc, 2) * (lo - 1)
                v = Fraction(-cc, 2) * (hi - 1)
                nxt.append((min(u, v), max(u, v)))
        sets = nxt
    return IntervalSet(sets)


def approx(w: Sequence[int], rep: str) -> tuple:
    """Midpoint and radius of the smallest interval hull of a prefix set."""
    if rep == "sd":
        s = sd_prefix_interval(w)
    elif rep == "gray":
        s = gray_prefix_set(w)
    else:
        raise ValueError(rep)
    lo, hi = s.hull()
    return ((lo + hi) / 2, (hi - lo) / 2)


# ---------------------------------------------------------------------------
# term encodings of digits and streams

SD_TERMS = {
    -1: Con("Left", (Con("Left", (Con("Nil", ()),)),)),
    1: Con("Left", (Con("Right", (Con("Nil", ()),)),)),
    0: Con("Right", (Con("Nil", ()),)),
}
GRAY_TERMS = {
    -1: Con("Left", (Con("Nil", ()),)),
    1: Con("Right", (Con("Nil", ()),)),
}


def _spine(cells, tail: Term) -> Term:
    t = tail
    for c in reversed(cells):
        t = Con("Pair", (c, t))
    return t


def _cyclic_stream(pre_cells, period_cells) -> Term:
    from .terms import Lam, Rec, Var

    loop = Rec(Lam("s", _spine(period_cells, Var("s"))))
    return _spine(pre_cells, loop)


def inject_sd(stream: EPStream) -> Term:
    """A rec-defined term unfolding to the infinite Pair spine of digits."""
    pre = [SD_TERMS[d] for d in stream.pre]
    per = [SD_TERMS[d] for d in stream.period]
    return _cyclic_stream(pre, per)


def gray_cell_term(c: int, wrap: str) -> Term:
    if wrap == "plain":
        return BOT if c == BOT_CELL else GRAY_TERMS[c]
    if wrap == "star":
        if c == BOT_CELL:
            return Con("Amb", (BOT, BOT))
        return Con("Amb", (Con("Left", (GRAY_TERMS[c],)), BOT))
    raise ValueError(wrap)


def inject_gray(stream: EPStream, wrap: str = "star") -> Term:
    pre = [gray_cell_term(c, wrap) for c in stream.pre]
    per = [gray_cell_term(c, wrap) for c in stream.period]
    return _cyclic_stream(pre, per)


# ---------------------------------------------------------------------------
# extraction back out of the engine


def _decode_sd_obs(o: Obs) -> Optional[int]:
    if isinstance(o, OUnresolved):
        return None
    if isinstance(o, OCon):
        if o.tag == "Right":
            return 0
        if o.tag == "Left" and o.children and isinstance(o.children[0], OCon):
            inner = o.children[0]
            if inner.tag == "Left":
                return -1
            if inner.tag == "Right":
                return 1
        if o.tag == "Left" and o.children and isinstance(o.children[0], OUnresolved):
            return None
    raise ShapeError(f"not a signed digit: {o}")


def _decode_gray_obs(o: Obs) -> Optional[int]:
    if isinstance(o, OUnresolved):
        return None
    if isinstance(o, OCon):
        if o.tag == "Left":
            return -1
        if o.tag == "Right":
            return 1
    raise ShapeError(f"not a gray cell: {o}")


def extract_sd(engine, source, n: int, fuel=UNLIMITED, wrap: str = "star") -> list:
    """Read n signed digits from a stream value; None marks Unresolved.

    Under wrap="star" the source is a racing-cons stream: each cons is
    resolved by collapsing its finite iteration with a fresh budget.  Under
    wrap="plain" it is an ordinary Pair spine.
    """
    node = engine._node(source)
    out = []
    for _ in range(n):
        if wrap == "star":
            view, _left = engine.collapse_star(node, fuel)
        else:
            view, _left = engine.whnf(node, fuel)
        if view is None:
            out.append(None)
            break
        kind, tag, kids = view
        if tag != "Pair":
            raise ShapeError(f"stream cons resolved to {tag}")
        out.append(_decode_sd_obs(engine._observe(kids[0], 3, fuel, True)))
        node = kids[1]
    while len(out) < n:
        out.append(None)
    return out


def extract_gray(engine, source, n: int, fuel=UNLIMITED) -> list:
    """Read n gray cells from a Pair spine of race-valued cells."""
    node = engine._node(source)
    out = []
    for _ in range(n):
        view, _left = engine.resolve_amb(node, fuel)
        if view is None:
            out.append(None)
            break
        kind, tag, kids = view
        if tag != "Pair":
            raise ShapeError(f"stream cons resolved to {tag}")
        cellview, _ = engine.collapse_star(kids[0], fuel)
        if cellview is None:
            out.append(None)
        else:
            ck, ctag, ckids = cellview
            out.append(_decode_gray_obs(OCon(ctag, ())))
        node = kids[1]
    while len(out) < n:
        out.append(None)
    return out
