import random
from fractions import Fraction

import pytest

from ambreal.codec import (
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
    tent,
    DomainError,
)
from ambreal.intervals import IntervalSet, hausdorff_sets, parse_interval_set

from .conftest import random_rational


# ---------------------------------------------------------------------------
# tent and encoders


def test_tent_values():
    assert tent(0) == 1
    assert tent(Fraction(1, 3)) == Fraction(1, 3)
    assert tent(Fraction(-1, 2)) == 0
    with pytest.raises(DomainError):
        tent(2)


def test_sd_encode_examples():
    assert sd_encode(0, 4)[0] == [0, 0, 0, 0]
    digits, stream = sd_encode(Fraction(1, 2), 4)
    assert digits == [1, 0, 0, 0]
    assert stream.pre == (1,) and stream.period == (0,)
    _, s13 = sd_encode(Fraction(1, 3), 0)
    assert s13.pre == () and s13.period == (1, -1)
    assert s13.sd_value() == Fraction(1, 3)


def test_gray_encode_examples():
    assert gray_encode(0, 4)[0] == [BOT_CELL, 1, -1, -1]
    assert gray_encode(Fraction(1, 3), 4)[0] == [1, 1, 1, 1]
    assert gray_encode(Fraction(-1, 2), 4)[0] == [-1, BOT_CELL, 1, -1]
    assert gray_encode(1, 4)[0] == [1, -1, -1, -1]


def test_gray_cell_is_orbit_sign():
    rng = random.Random(7)
    for _ in range(50):
        x = random_rational(rng, 2**12)
        cells, _ = gray_encode(x, 32)
        cur = x
        for c in cells:
            assert c == (-1 if cur < 0 else (1 if cur > 0 else BOT_CELL))
            cur = 1 - 2 * abs(cur)


def test_at_most_one_bot_iff_dyadic():
    rng = random.Random(8)
    for _ in range(80):
        x = random_rational(rng, 2**10)
        cells, stream = gray_encode(x, 64)
        bots = [i for i, c in enumerate(cells) if c == BOT_CELL]
        assert len(bots) <= 1
        is_dyadic = (
            abs(x) < 1
            and (x.denominator & (x.denominator - 1)) == 0
            and x.denominator > 1
            or x == 0
        )
        if bots:
            j = bots[0]
            assert cells[j + 1] == 1
            assert all(c == -1 for c in cells[j + 2 : j + 10])
            assert is_dyadic
        else:
            assert not is_dyadic


def test_periodicity_bound():
    rng = random.Random(9)
    for _ in range(60):
        x = random_rational(rng, 2**10)
        _, s = sd_encode(x, 0)
        assert len(s.pre) + len(s.period) <= 4 * x.denominator + 4
        _, g = gray_encode(x, 0)
        assert len(g.pre) + len(g.period) <= 4 * x.denominator + 4


# ---------------------------------------------------------------------------
# prefix oracles


def test_sd_prefix_examples():
    assert sd_prefix_interval([]) == IntervalSet.full()
    assert sd_prefix_interval([1]) == IntervalSet([(0, 1)])
    assert sd_prefix_interval([1, 0]) == IntervalSet([(Fraction(1, 4), Fraction(3, 4))])


def test_gray_prefix_examples():
    assert gray_prefix_set([-1, 1]) == IntervalSet([(Fraction(-1, 2), 0)])
    assert gray_prefix_set([BOT_CELL, 1]) == IntervalSet(
        [(Fraction(-1, 2), Fraction(1, 2))]
    )
    assert gray_prefix_set([]) == IntervalSet.full()
    # paper family: g_-1 g_1 g_-1^n applied to the full interval
    for n in range(5):
        cells = [-1, 1] + [-1] * n
        assert gray_prefix_set(cells) == IntervalSet([(-Fraction(1, 2 ** (n + 1)), 0)])


def test_approx_examples():
    assert approx([1, 0], "sd") == (Fraction(1, 2), Fraction(1, 4))
    assert approx([BOT_CELL, 1], "gray") == (0, Fraction(1, 2))
    assert approx([], "sd") == (0, 1)


def test_oracle_containment_and_convergence():
    rng = random.Random(10)
    for _ in range(80):
        x = random_rational(rng, 2**16)
        n = rng.randint(1, 64)
        w, _ = sd_encode(x, n)
        s = sd_prefix_interval(w)
        assert s.contains(x)
        assert s.diameter() == Fraction(2, 2**n)
        cells, _ = gray_encode(x, n)
        g = gray_prefix_set(cells)
        assert g.contains(x)
        assert g.max() - g.min() <= Fraction(4, 2**n)


# ---------------------------------------------------------------------------
# streams, injection and extraction


def test_epstream_indexing():
    s = EPStream((1,), (0, -1))
    assert s.take(6) == [1, 0, -1, 0, -1, 0]


def test_stream_values():
    assert EPStream((), (1, -1)).sd_value() == Fraction(1, 3)
    _, g = gray_encode(Fraction(-3, 7), 0)
    assert g.gray_value() == Fraction(-3, 7)
    _, g0 = gray_encode(0, 0)
    assert g0.gray_value() == 0


def test_parse_stream():
    s = parse_stream("1;0", "sd")
    assert s.pre == (1,) and s.period == (0,)
    g = parse_stream("-1,_,1;-1", "gray")
    assert g.pre == (-1, BOT_CELL, 1) and g.period == (-1,)
    with pytest.raises(ValueError):
        parse_stream("2;0", "sd")


def test_inject_extract_sd_plain(engine):
    for spec in (EPStream((), (0,)), EPStream((1,), (0,)), EPStream((), (1, -1))):
        got = extract_sd(engine, inject_sd(spec), 6, 10**4, wrap="plain")
        assert got == spec.take(6)


def test_inject_extract_gray_star(engine):
    _, g = gray_encode(Fraction(1, 3), 0)
    got = extract_gray(engine, inject_gray(g, "star"), 4, 10**4)
    assert got == [1, 1, 1, 1]


def test_inject_gray_plain_bot_cell(engine):
    _, g0 = gray_encode(0, 0)
    t = inject_gray(g0, "plain")
    # cell 0 is literally bot; cells 1, 2 are readable
    from ambreal.engine import OUnresolved, render_obs

    assert isinstance(engine.stream_cell(t, 0, 10**4), OUnresolved)
    assert render_obs(engine.stream_cell(t, 1, 10**4)) == "Right(Nil)"
    assert render_obs(engine.stream_cell(t, 2, 10**4)) == "Left(Nil)"


def test_inject_gray_star_bot_cell_unresolved(engine):
    _, g0 = gray_encode(0, 0)
    got = extract_gray(engine, inject_gray(g0, "star"), 3, 10**4)
    assert got == [None, 1, -1]


# ---------------------------------------------------------------------------
# interval sets


def test_interval_set_ops():
    s = parse_interval_set("[-1/2,1/4];[3/8,3/8]")
    assert s.intervals == ((Fraction(-1, 2), Fraction(1, 4)), (Fraction(3, 8), Fraction(3, 8)))
    assert s.contains(Fraction(3, 8)) and not s.contains(Fraction(5, 16))
    assert s.min() == Fraction(-1, 2) and s.max() == Fraction(3, 8)
    merged = IntervalSet([(0, Fraction(1, 2)), (Fraction(1, 2), 1)])
    assert merged.intervals == ((0, 1),)


def test_hausdorff_examples():
    A = IntervalSet.point(0)
    B = IntervalSet([(Fraction(-1, 2), Fraction(1, 2))])
    assert hausdorff_sets(A, B) == Fraction(1, 2)
    assert hausdorff_sets(B, B) == 0
    assert hausdorff_sets(IntervalSet([(-1, 0)]), IntervalSet([(0, 1)])) == 1


def test_hausdorff_gap_midpoint():
    # the sup sits strictly inside an interval, against a gap of the other set
    A = IntervalSet([(0, 1)])
    B = IntervalSet([(0, 0), (1, 1)])
    assert hausdorff_sets(A, B) == Fraction(1, 2)


def test_hausdorff_brute_force_agreement():
    rng = random.Random(11)
    from .conftest import random_compact

    for _ in range(30):
        A, B = random_compact(rng), random_compact(rng)
        exact = hausdorff_sets(A, B)
        # brute force on a fine dyadic grid, always a lower bound
        grid = [Fraction(i, 256) for i in range(-256, 257)]
        da = max(
            min(abs(x - y) for lo, hi in B.intervals for y in (lo, hi, min(max(x, lo), hi)))
            for x in grid
            if A.contains(x)
        )
        db = max(
            min(abs(x - y) for lo, hi in A.intervals for y in (lo, hi, min(max(x, lo), hi)))
            for x in grid
            if B.contains(x)
        )
        approx_d = max(da, db)
        assert approx_d <= exact <= approx_d + Fraction(1, 128)
