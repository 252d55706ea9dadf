"""Nonempty compact subsets of [-1,1] as digit trees.

A signed-digit tree node carries the set E of digits whose restriction is
nonempty and one child per digit (the child represents av_d^-1[K_d]).  A
Gray tree node carries Gray codes of min K and max K plus up to two
children for the tent images t[K_d], d in {-1,+1}; a child slot is present
exactly when the restriction is nonempty.

Trees built from interval sets are lazy and memoized by exact set value,
so rational inputs produce cyclic graphs; streams read off such trees are
eventually periodic and can be fed to the engine.  Syntactic transforms
(negate, tent-child) preserve the cycles through per-node caches.

The two conversions:

  * sdk_to_grayk reads min/max digit streams off the SD tree, converts
    them pointwise through the engine (sd2gray), and recurses into tent
    children - the digit set of a node certifies which children exist.
  * grayk_to_sdk concurrently probes the first two cells of the min and
    the max code (four sign queries; at least three resolve for any set)
    and selects the digit set from the resolved combination, in the fixed
    priority (0,0) > (0,1) > (1,0) > (1,1).  Children come from the Gray
    children combined with exact code-level transforms: negation swaps
    children and flips the leading cell; the 0-child's codes are assembled
    from the grandchildren under the tent bijections.

Outputs are compared to oracles by value sets, never by tree equality.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .codec import (
    BOT_CELL,
    EPStream,
    gray_encode,
    inject_sd,
    extract_gray,
    _spine,
    SD_TERMS,
)
from .engine import UNLIMITED
from .intervals import EmptySet, IntervalSet

HALF = Fraction(1, 2)

II = {
    -1: (Fraction(-1), Fraction(0)),
    0: (Fraction(-1, 2), Fraction(1, 2)),
    1: (Fraction(0), Fraction(1)),
}


class TruncatedTree(Exception):
    """A child below the truncation depth was requested."""


class UnresolvedNode(Exception):
    """No digit-set case resolved within the probe fuel."""


def restrict(K: IntervalSet, d: int) -> IntervalSet:
    lo, hi = II[d]
    return K.intersect_interval(lo, hi)


def _check_nonempty(K: IntervalSet):
    if not K:
        raise EmptySet("compact set must be nonempty")
    return K


# ---------------------------------------------------------------------------
# signed digit trees


class SDTree:
    __slots__ = ("digits", "_kids", "_child_fn", "_neg", "_tent")

    def __init__(self, digits, child_fn=None, kids=None):
        self.digits = frozenset(digits)
        if not self.digits:
            raise ValueError("digit set must be nonempty")
        self._child_fn = child_fn
        self._kids = dict(kids) if kids is not None else {}
        self._neg = None
        self._tent = {}

    def child(self, d) -> "SDTree":
        if d not in self.digits:
            raise KeyError(f"no child for digit {d}")
        if d not in self._kids:
            if self._child_fn is None:
                raise TruncatedTree(f"tree truncated below digit {d}")
            self._kids[d] = self._child_fn(d)
        return self._kids[d]

    def __repr__(self):
        ds = ",".join(str(d) for d in sorted(self.digits))
        return f"<SDTree E={{{ds}}}>"


def sd_tree(K: IntervalSet, _memo=None) -> SDTree:
    """The lazy canonical tree of K: E is maximal, children are exact."""
    _check_nonempty(K)
    memo = {} if _memo is None else _memo

    def build(S: IntervalSet) -> SDTree:
        node = memo.get(S)
        if node is not None:
            return node
        digits = frozenset(d for d in (-1, 0, 1) if restrict(S, d))
        node = SDTree(digits, child_fn=lambda d, S=S: build(restrict(S, d).affine(2, -d)))
        memo[S] = node
        return node

    return build(K)


def sdk_truncate(K: IntervalSet, n: int) -> SDTree:
    """Eager truncation: n levels of children, leaves keep their digit set."""
    _check_nonempty(K)

    def build(S, depth):
        digits = frozenset(d for d in (-1, 0, 1) if restrict(S, d))
        if depth == 0:
            return SDTree(digits, kids={})
        kids = {d: build(restrict(S, d).affine(2, -d), depth - 1) for d in digits}
        return SDTree(digits, kids=kids)

    return build(K, n)


def sdk_negate(T: SDTree) -> SDTree:
    if T._neg is None:
        node = SDTree(
            frozenset(-d for d in T.digits),
            child_fn=lambda d: sdk_negate(T.child(-d)),
        )
        T._neg = node
        node._neg = T
    return T._neg


_ONE_TREE = SDTree({1})
_ONE_TREE._kids[1] = _ONE_TREE  # constant tree of {1}


def sdk_tent_child(T: SDTree, d: int) -> SDTree:
    """Tree of t[K_d] for d in {-1,+1}, assuming K_d is nonempty.

    Case split on the root digit set F: if d is in F the tent image is the
    d-child (negated for d = +1); otherwise the mass sits in the 0-part and
    the image lives in [0,1], reached through the 0-child; if F = {-d} the
    restriction is the single point 0 and the image is {1}.
    """
    if d not in (-1, 1):
        raise ValueError("tent child needs d in {-1,+1}")
    cached = T._tent.get(d)
    if cached is not None:
        return cached
    F = T.digits
    if d in F:
        out = T.child(d) if d == -1 else sdk_negate(T.child(1))
    elif 0 in F:
        out = SDTree(
            {1},
            child_fn=lambda _d, T=T, d=d: sdk_tent_child(T.child(0), d),
        )
    else:  # F = {-d}: K_d = {0}, t[K_d] = {1}
        out = _ONE_TREE
    T._tent[d] = out
    return out


def sdk_min_stream(T: SDTree, limit: int = 4096):
    """Digits of the least path; an EPStream when the walk becomes cyclic,
    otherwise (for truncated input) the list of digits seen."""
    digits = []
    seen = {}
    node = T
    for i in range(limit):
        key = id(node)
        if key in seen:
            k = seen[key]
            return EPStream(tuple(digits[:k]), tuple(digits[k:]))
        seen[key] = i
        d = min(node.digits)
        digits.append(d)
        try:
            node = node.child(d)
        except TruncatedTree:
            return digits
    return digits


def sdk_max_stream(T: SDTree, limit: int = 4096):
    out = sdk_min_stream(sdk_negate(T), limit)
    if isinstance(out, EPStream):
        return EPStream(tuple(-d for d in out.pre), tuple(-d for d in out.period))
    return [-d for d in out]


AV_CODED = {-1: (HALF, Fraction(-1, 2)), 0: (HALF, Fraction(0)), 1: (HALF, HALF)}
G_CODED = {-1: (HALF, Fraction(-1, 2)), 1: (-HALF, HALF)}


def tree_value_set(T, n: int) -> IntervalSet:
    """Union over depth-n paths of the digit-map images of [-1,1].

    Memoized per (node, depth): cyclic trees of rational sets have few
    distinct nodes, so this is linear in nodes x depth rather than 3^n.
    """
    memo = {}
    if isinstance(T, SDTree):
        return _sd_value(T, n, memo)
    return _gray_value(T, n, memo)


def _sd_value(T: SDTree, n: int, memo) -> IntervalSet:
    if n == 0:
        return IntervalSet.full()
    key = (id(T), n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = IntervalSet([])
    for d in T.digits:
        a, b = AV_CODED[d]
        out = out.union(_sd_value(T.child(d), n - 1, memo).affine(a, b))
    memo[key] = out
    return out


def _gray_value(G, n: int, memo) -> IntervalSet:
    if n == 0:
        return IntervalSet.full()
    key = (id(G), n)
    hit = memo.get(key)
    if hit is not None:
        return hit
    out = IntervalSet([])
    for d in (-1, 1):
        if G.has_child(d):
            a, b = G_CODED[d]
            out = out.union(_gray_value(G.child(d), n - 1, memo).affine(a, b))
    memo[key] = out
    return out


def hausdorff_trunc(S: SDTree, T: SDTree, max_depth: int) -> Fraction:
    """2^-n for the least n <= max_depth at which the truncations differ,
    0 when none does.  Coinductive: a revisited node pair is assumed equal,
    which is exact for the cyclic trees built here."""
    n = _first_diff(S, T, max_depth, set())
    return Fraction(0) if n is None else Fraction(1, 2**n)


def _first_diff(S, T, depth, assumed) -> Optional[int]:
    if S.digits != T.digits:
        return 1
    if depth <= 1:
        return None
    key = (id(S), id(T))
    if key in assumed:
        return None
    assumed.add(key)
    best = None
    for d in S.digits:
        try:
            sub = _first_diff(S.child(d), T.child(d), depth - 1, assumed)
        except TruncatedTree:
            sub = None
        if sub is not None and (best is None or sub < best):
            best = sub
    return None if best is None else best + 1


# ---------------------------------------------------------------------------
# gray trees: a common cell/child interface with several backings


def _flip(c):
    if c is None:
        return None
    return -c


class OracleGray:
    """Gray tree of an exact set: codes from gray_encode, children exact."""

    __slots__ = ("set", "_min", "_max", "_kids", "_memo", "depth_limit")

    def __init__(self, K: IntervalSet, depth_limit=None, _memo=None):
        _check_nonempty(K)
        self.set = K
        self._min = gray_encode(K.min(), 0)[1]
        self._max = gray_encode(K.max(), 0)[1]
        self._kids = {}
        self._memo = {} if _memo is None else _memo
        self.depth_limit = depth_limit

    def min_code(self) -> EPStream:
        return self._min

    def max_code(self) -> EPStream:
        return self._max

    def cell_min(self, i):
        c = self._min[i]
        return None if c == BOT_CELL else c

    def cell_max(self, i):
        c = self._max[i]
        return None if c == BOT_CELL else c

    def has_child(self, d) -> bool:
        return bool(restrict(self.set, d))

    def child(self, d) -> "OracleGray":
        if d not in self._kids:
            if self.depth_limit is not None and self.depth_limit <= 0:
                raise TruncatedTree("gray tree truncated")
            Kd = restrict(self.set, d)
            if not Kd:
                raise KeyError(f"no child for {d}")
            img = Kd.affine(2, 1) if d == -1 else Kd.affine(-2, 1)
            key = (img, self.depth_limit - 1 if self.depth_limit is not None else None)
            node = self._memo.get(key)
            if node is None:
                node = OracleGray(
                    img,
                    None if self.depth_limit is None else self.depth_limit - 1,
                    self._memo,
                )
                self._memo[key] = node
            self._kids[d] = node
        return self._kids[d]


def grayk_truncate(K: IntervalSet, n: int) -> OracleGray:
    return OracleGray(K, depth_limit=n)


def gray_lazy(K: IntervalSet) -> OracleGray:
    return OracleGray(K)


class NegGray:
    """Gray tree of -K: swap children, flip the first cell of each code."""

    __slots__ = ("base",)

    def __init__(self, base):
        self.base = base

    def cell_min(self, i):
        c = self.base.cell_max(i)
        return _flip(c) if i == 0 else c

    def cell_max(self, i):
        c = self.base.cell_min(i)
        return _flip(c) if i == 0 else c

    def has_child(self, d):
        return self.base.has_child(-d)

    def child(self, d):
        # t[(-K)_d] = t[K_{ -d }]: the opposite child, unnegated
        return self.base.child(-d)


def _neg_code_cell(node, which, i):
    # cell i of the flipped-head code of node's min/max code
    c = node.cell_min(i) if which == "min" else node.cell_max(i)
    return _flip(c) if i == 0 else c


class DoubleGray:
    """Gray tree of 2*K_0, derived from the grandchildren of the base node.

    Writing L, R for the tent children of K and A' = K_{-1} n [-1/2,0],
    B' = K_1 n [0,1/2]: A' is nonempty iff L has a +1 child (same for B'
    and R), min 2K_0 = -(1+max Lc1)/2 and max 2K_0 = (1+max Rc1)/2 where
    Lc1, Rc1 are the +1 grandchildren, and the children of 2K_0 are their
    negations.  Everything is exact code plumbing over the tent bijections.
    """

    __slots__ = ("_a", "_b", "_lc1", "_rc1")

    def __init__(self, base):
        L = base.child(-1) if base.has_child(-1) else None
        R = base.child(1) if base.has_child(1) else None
        self._lc1 = L.child(1) if (L is not None and L.has_child(1)) else None
        self._rc1 = R.child(1) if (R is not None and R.has_child(1)) else None
        self._a = self._lc1 is not None
        self._b = self._rc1 is not None
        if not (self._a or self._b):
            raise EmptySet("0-restriction is empty")

    def cell_min(self, i):
        if self._a:
            # -(1+m)/2 with m = max Lc1: head -1, then code of -m
            return -1 if i == 0 else _neg_code_cell(self._lc1, "max", i - 1)
        return 1 if i == 0 else _neg_code_cell(self._rc1, "min", i - 1)

    def cell_max(self, i):
        if self._b:
            return 1 if i == 0 else _neg_code_cell(self._rc1, "max", i - 1)
        return -1 if i == 0 else _neg_code_cell(self._lc1, "min", i - 1)

    def has_child(self, d):
        return self._a if d == -1 else self._b

    def child(self, d):
        node = self._lc1 if d == -1 else self._rc1
        if node is None:
            raise KeyError(f"no child for {d}")
        return NegGray(node)


class EngineGray:
    """Gray tree read off a signed-digit tree through the engine.

    Codes are engine conversions (sd2gray) of the tree's min/max digit
    streams; children follow the digit-set certificates and the syntactic
    tent-child transform.
    """

    __slots__ = ("source", "prelude", "fuel", "_cells", "_kids", "stream_limit")

    def __init__(self, source: SDTree, prelude, fuel=10**6, stream_limit=4096):
        self.source = source
        self.prelude = prelude
        self.fuel = fuel
        self.stream_limit = stream_limit
        self._cells = {}
        self._kids = {}

    def _code_cells(self, which, upto):
        cells, node = self._cells.get(which, ([], None))
        if node is None:
            stream = (
                sdk_min_stream(self.source, self.stream_limit)
                if which == "min"
                else sdk_max_stream(self.source, self.stream_limit)
            )
            e = self.prelude.engine
            if isinstance(stream, EPStream):
                src = inject_sd(stream)
            else:  # truncated walk: finite prefix, divergent tail
                from .terms import BOT

                src = _spine([SD_TERMS[d] for d in stream], BOT)
            node = e.apply(
                self.prelude.node("sd2gray"),
                e.apply(self.prelude.node("sd_emb"), e.load(src)),
            )
        if len(cells) < upto:
            got = extract_gray(self.prelude.engine, node, upto, self.fuel)
            # extract_gray consumed the spine; keep absolute indexing by
            # re-reading from the cached node each time
            cells = got
        self._cells[which] = (cells, node)
        return cells

    def cell_min(self, i):
        return self._code_cells("min", i + 1)[i]

    def cell_max(self, i):
        return self._code_cells("max", i + 1)[i]

    def has_child(self, d):
        return d in self.source.digits

    def child(self, d):
        if d not in self._kids:
            self._kids[d] = EngineGray(
                sdk_tent_child(self.source, d), self.prelude, self.fuel, self.stream_limit
            )
        return self._kids[d]


def sdk_to_grayk(T: SDTree, prelude, fuel=10**6) -> EngineGray:
    return EngineGray(T, prelude, fuel)


# ---------------------------------------------------------------------------
# gray -> signed digit trees: the concurrent probe table


def _probe_digits(G) -> frozenset:
    """Select a digit set from the four sign probes, in the fixed priority.

    Probe values: -1 / +1 for a resolved sign, None while unresolved.  For
    canonically encoded trees at least one case always fires.
    """
    m0, m1 = G.cell_min(0), G.cell_min(1)
    M0, M1 = G.cell_max(0), G.cell_max(1)

    # C00: signs of min and max
    if m0 is not None and M0 is not None:
        if m0 > 0:
            return frozenset({1})
        if M0 < 0:
            return frozenset({-1})
        return frozenset({-1, 1})
    # C01: sign of min, sign of t(max)
    if m0 is not None and M1 is not None:
        if m0 > 0:
            return frozenset({1})
        if M1 > 0:  # |max| <= 1/2
            return frozenset({-1, 0})
        if M0 is not None:  # |max| >= 1/2 so max != 0: M0 resolves
            return frozenset({-1, 1}) if M0 > 0 else frozenset({-1})
    # C10: sign of t(min), sign of max
    if m1 is not None and M0 is not None:
        if M0 < 0:
            return frozenset({-1})
        if m1 > 0:  # |min| <= 1/2
            return frozenset({0, 1})
        if m0 is not None:
            return frozenset({-1, 1}) if m0 < 0 else frozenset({1})
    # C11: signs of t(min), t(max)
    if m1 is not None and M1 is not None:
        if m1 > 0 and M1 > 0:
            return frozenset({0})
        if m1 > 0:  # |max| >= 1/2, max >= 0
            return frozenset({0, 1})
        if M1 > 0:  # |min| >= 1/2, min <= 0
            return frozenset({-1, 0})
        if m0 is not None and M0 is not None:
            if m0 > 0:
                return frozenset({1})
            if M0 < 0:
                return frozenset({-1})
            return frozenset({-1, 1})
    raise UnresolvedNode("no probe case resolved")


def grayk_to_sdk(G, n: int, fuel=None) -> SDTree:
    """Depth-n signed-digit tree converted from a Gray tree.

    fuel is carried by engine-backed nodes themselves; the parameter is
    accepted for signature stability and ignored for exact oracle trees.
    """

    def build(node, depth) -> SDTree:
        E = _probe_digits(node)
        if depth == 0:
            return SDTree(E, kids={})
        kids = {}
        for d in E:
            if d == -1:
                sub = node.child(-1)
            elif d == 1:
                sub = NegGray(node.child(1))
            else:
                sub = DoubleGray(node)
            kids[d] = build(sub, depth - 1)
        return SDTree(E, kids=kids)

    return build(G, n)


def hausdorff_sets(A: IntervalSet, B: IntervalSet) -> Fraction:
    from .intervals import hausdorff_sets as _h

    return _h(A, B)
