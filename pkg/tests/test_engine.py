from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ambreal.engine import (
    Engine,
    OCon,
    OUnresolved,
    SpineFailure,
    det_step,
    render_obs,
    strict_apply,
)
from ambreal.terms import (
    BOT,
    NIL,
    App,
    Con,
    Lam,
    Var,
    alpha_eq,
    con,
    parse_term,
    print_term,
)

from .test_terms import closed_terms

POR = parse_term(
    """fun c -> case c of {
  Pair(Left(Nil), _) -> Left(Nil);
  Pair(_, Left(Nil)) -> Left(Nil);
  Pair(Right(Nil), Right(Nil)) -> Right(Nil) }"""
)
TRUE = con("Left", NIL)
FALSE = con("Right", NIL)


@pytest.fixture
def e():
    return Engine()


# ---------------------------------------------------------------------------
# det_step: the one-step relation on terms


def test_rec_unfold():
    t = parse_term("rec (fun a -> a)")
    assert alpha_eq(det_step(t), App(Lam("a", Var("a")), t))


def test_beta():
    assert det_step(parse_term("(fun a -> a) Nil")) == NIL


def test_values_self_step():
    for t in (parse_term("fun a -> a"), NIL, BOT):
        assert det_step(t) == t


def test_parallel_or_by_det_steps():
    t = App(POR, con("Pair", TRUE, BOT))
    for _ in range(20):
        if t == TRUE:
            break
        t = det_step(t)
    assert t == TRUE


def test_constructor_children_step_together():
    redex = App(Lam("x", Var("x")), NIL)
    t = con("Pair", redex, redex)
    assert det_step(t) == con("Pair", NIL, NIL)


@settings(max_examples=100, deadline=None)
@given(closed_terms())
def test_det_step_deterministic(t):
    assert alpha_eq(det_step(t), det_step(t))


# ---------------------------------------------------------------------------
# whnf


def test_whnf_bot_unresolved(e):
    assert e.whnf(BOT, 1000)[0] is None


def test_whnf_pair_is_value(e):
    v, _ = e.whnf(parse_term("Pair(bot, bot)"), 1)
    assert v[0] == "con" and v[1] == "Pair"


def test_whnf_rec_identity_loops(e):
    assert e.whnf(parse_term("rec (fun f -> f)"), 1000)[0] is None


def test_whnf_amb_is_value(e):
    v, _ = e.whnf(parse_term("Amb(bot, bot)"), 10)
    assert v[1] == "Amb"


# ---------------------------------------------------------------------------
# resolve_amb


def test_resolve_left_ready(e):
    v, _ = e.resolve_amb(parse_term("Amb(Left(Nil), bot)"), 100)
    assert v[1] == "Left"


def test_resolve_right_defined(e):
    v, _ = e.resolve_amb(parse_term("Amb(bot, Right(Nil))"), 10**5)
    assert v[1] == "Right"


def test_resolve_both_bot(e):
    assert e.resolve_amb(parse_term("Amb(bot, bot)"), 10**6)[0] is None


def test_tie_breaks_left(e):
    v, _ = e.resolve_amb(parse_term("Amb(Left(Nil), Right(Nil))"), 100)
    assert v[1] == "Left"


# ---------------------------------------------------------------------------
# observe


def test_observe_raw_spine(e):
    o = e.observe(parse_term("Pair(Nil, Pair(Nil, bot))"), 3, 1000, "raw")
    assert render_obs(o) == "Pair(Nil, Pair(Nil, <unresolved>))"


def test_observe_resolving_collapses(e):
    o = e.observe(parse_term("Amb(bot, Pair(Nil, Nil))"), 2, 10**4, "resolving")
    assert render_obs(o) == "Pair(Nil, Nil)"


def test_observe_raw_amb(e):
    o = e.observe(parse_term("Amb(Nil, bot)"), 1, 1000, "raw")
    assert render_obs(o) == "Amb(Nil, <unresolved>)"


def test_observe_depth_truncation(e):
    o = e.observe(parse_term("Left(Left(Nil))"), 0, 100)
    assert isinstance(o, OCon) and o.children is None


# ---------------------------------------------------------------------------
# stream_cell


def test_cell_past_unresolved_head(e):
    sp = parse_term("Pair(bot, Pair(Left(Nil), bot))")
    assert render_obs(e.stream_cell(sp, 1, 10**4)) == "Left(Nil)"


def test_cell_zero(e):
    assert render_obs(e.stream_cell(parse_term("Pair(Nil, bot)"), 0, 1000)) == "Nil"


def test_cell_beyond_spine_is_unresolved(e):
    sp = parse_term("Pair(Nil, Pair(Nil, bot))")
    assert isinstance(e.stream_cell(sp, 2, 10**4), OUnresolved)


def test_spine_failure_distinct(e):
    with pytest.raises(SpineFailure):
        e.stream_cell(parse_term("Pair(Nil, Left(Nil))"), 1, 1000)


# ---------------------------------------------------------------------------
# strict application


def test_strict_apply_value(e):
    f = parse_term("fun x -> Nil")
    o = e.observe(strict_apply(f, parse_term("Left(Nil)")), 1, 1000)
    assert render_obs(o) == "Nil"


def test_strict_apply_bot(e):
    f = parse_term("fun x -> Nil")
    assert isinstance(e.observe(strict_apply(f, BOT), 1, 10**5), OUnresolved)


def test_strict_apply_passes_argument(e):
    f = parse_term("fun x -> x")
    o = e.observe(strict_apply(f, parse_term("Right(Nil)")), 2, 1000)
    assert render_obs(o) == "Right(Nil)"


def test_strict_apply_excludes_amb(e):
    f = parse_term("fun x -> Nil")
    assert isinstance(
        e.observe(strict_apply(f, parse_term("Amb(Nil, Nil)")), 1, 10**4),
        OUnresolved,
    )


# ---------------------------------------------------------------------------
# collapse_star


def test_collapse_immediate(e):
    v, _ = e.collapse_star(parse_term("Amb(Left(Nil), bot)"), 10**4)
    assert v[1] == "Nil"


def test_collapse_two_levels(e):
    t = parse_term("Amb(bot, Right(Amb(Left(Right(Nil)), bot)))")
    v, _ = e.collapse_star(t, 10**4)
    assert v[1] == "Right"


def test_collapse_unresolved(e):
    t = parse_term("Amb(bot, Right(Amb(bot, bot)))")
    assert e.collapse_star(t, 10**5)[0] is None


def test_collapse_malformed(e):
    from ambreal.engine import MalformedStar

    with pytest.raises(MalformedStar):
        e.collapse_star(parse_term("Amb(Nil, bot)"), 10**4)


# ---------------------------------------------------------------------------
# parallel-or through the engine


@pytest.mark.parametrize(
    "arg,want",
    [
        (con("Pair", TRUE, BOT), "Left(Nil)"),
        (con("Pair", BOT, TRUE), "Left(Nil)"),
        (con("Pair", FALSE, FALSE), "Right(Nil)"),
    ],
)
def test_por(e, arg, want):
    assert render_obs(e.observe(App(POR, arg), 2, 10**4)) == want


def test_por_bot_bot(e):
    o = e.observe(App(POR, con("Pair", BOT, BOT)), 2, 10**6)
    assert isinstance(o, OUnresolved)


# ---------------------------------------------------------------------------
# fuel properties


@settings(max_examples=60, deadline=None)
@given(closed_terms(), st.integers(min_value=1, max_value=64))
def test_fuel_monotone(t, fuel):
    e1, e2 = Engine(), Engine()
    r1 = e1.observe(t, 3, fuel)
    r2 = e2.observe(t, 3, fuel * 4)
    if not isinstance(r1, OUnresolved):
        assert r1 == r2


def test_fairness_bound():
    # A reaches whnf in k ticks; racing it against bot must finish in 3k+64
    e = Engine()
    rng_terms = []
    t = NIL
    for i in range(40):
        rng_terms.append(t)
        t = App(Lam("x", Var("x")), t)  # one more beta step each time
    for t in rng_terms:
        probe = Engine()
        node = probe.load(t)
        _, left = probe.whnf(node, 10**6)
        k = 10**6 - left
        assert k <= 10**3
        race = Engine()
        v, left2 = race.resolve_amb(Con("Amb", (BOT, t)), 3 * k + 64)
        assert v is not None


def test_amb_commitment_stable():
    e = Engine()
    node = e.load(parse_term("Amb(bot, Pair(Nil, Nil))"))
    first = e.observe(node, 2, 10**4)
    for _ in range(3):
        assert e.observe(node, 2, 10**4) == first


def test_observation_never_mixes_branches():
    # once committed to the right branch, the left one is gone
    e = Engine()
    node = e.load(parse_term("Amb(bot, Left(Nil))"))
    v, _ = e.resolve_amb(node, 10**4)
    assert v[1] == "Left"
    o = e.observe(node, 2, 10**3, "raw")
    assert render_obs(o) == "Left(Nil)"
