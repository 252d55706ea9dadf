"""Engine-driven conversions between the two stream representations.

The headline correctness content: every defined digit prefix read from
gray2sd names the encoded number (oracle containment), every defined cell
read from sd2gray equals the canonical gray cell, and the unknown cell of
a dyadic stays unresolved while its neighbours remain readable.
"""

import random
from fractions import Fraction

import pytest

from ambreal.codec import (
    BOT_CELL,
    extract_gray,
    extract_sd,
    gray_encode,
    inject_gray,
    inject_sd,
    sd_encode,
    sd_prefix_interval,
)

from .conftest import random_dyadic, random_rational


def sd_star_node(prelude, stream):
    e = prelude.engine
    return e.apply(prelude.node("sd_emb"), e.load(inject_sd(stream)))


def run_sd2gray(prelude, x, n, fuel=10**5):
    _, s = sd_encode(x, 0)
    node = prelude.engine.apply(prelude.node("sd2gray"), sd_star_node(prelude, s))
    return extract_gray(prelude.engine, node, n, fuel)


def run_gray2sd(prelude, x, n, fuel=10**5):
    _, g = gray_encode(x, 0)
    node = prelude.engine.apply(
        prelude.node("gray2sd"), prelude.engine.load(inject_gray(g, "star"))
    )
    return extract_sd(prelude.engine, node, n, fuel)


CASES = [
    Fraction(0),
    Fraction(1),
    Fraction(-1),
    Fraction(1, 2),
    Fraction(-1, 2),
    Fraction(1, 3),
    Fraction(-2, 3),
    Fraction(3, 7),
    Fraction(-5, 8),
    Fraction(7, 16),
    Fraction(355, 1024),
    Fraction(-22, 123),
]


@pytest.mark.parametrize("x", CASES, ids=str)
def test_gray_to_sd_oracle(prelude, x):
    digs = run_gray2sd(prelude, x, 16)
    assert all(d is not None for d in digs)
    for i in range(1, len(digs) + 1):
        assert sd_prefix_interval(digs[:i]).contains(x)


@pytest.mark.parametrize("x", CASES, ids=str)
def test_sd_to_gray_matches_canonical(prelude, x):
    n = 12
    cells = run_sd2gray(prelude, x, n)
    oracle = gray_encode(x, n)[0]
    for got, want in zip(cells, oracle):
        if want == BOT_CELL:
            assert got is None
        else:
            assert got == want


def test_sd2gray_half(prelude):
    assert run_sd2gray(prelude, Fraction(1, 2), 4) == [1, None, 1, -1]


def test_gray2sd_zero(prelude):
    assert run_gray2sd(prelude, Fraction(0), 4) == [0, 0, 0, 0]


def test_gray2sd_one(prelude):
    assert run_gray2sd(prelude, Fraction(1), 4) == [1, 1, 1, 1]


def test_bot_cell_independence_at_zero(prelude):
    # x = 0: cell 0 never resolves, cells 1..8 do
    _, s = sd_encode(Fraction(0), 0)
    e = prelude.engine
    node = e.apply(prelude.node("sd2gray"), sd_star_node(prelude, s))
    cells = extract_gray(e, node, 9, 10**4)
    assert cells[0] is None
    oracle = gray_encode(Fraction(0), 9)[0]
    assert cells[1:] == oracle[1:]


def test_random_roundtrip_small_corpus(prelude):
    rng = random.Random(20)
    xs = [random_rational(rng, 2**10) for _ in range(15)] + [
        random_dyadic(rng, 8) for _ in range(5)
    ]
    for x in xs:
        digs = run_gray2sd(prelude, x, 10)
        assert all(d is not None for d in digs)
        assert sd_prefix_interval(digs).contains(x)
        cells = run_sd2gray(prelude, x, 8)
        oracle = gray_encode(x, 8)[0]
        for got, want in zip(cells, oracle):
            assert (got is None) == (want == BOT_CELL) and (got is None or got == want)


def test_unresolved_cell_stays_unresolved_across_fuels(prelude):
    # dyadic: the unknown position must not resolve however much fuel we pour
    x = Fraction(3, 8)
    oracle, _ = gray_encode(x, 8)
    j = oracle.index(BOT_CELL)
    for fuel in (10**3, 10**5):
        cells = run_sd2gray(prelude, x, j + 1, fuel=fuel)
        assert cells[j] is None
