"""Operational semantics: deterministic small steps, Amb racing, observation.

Two layers live here.  `det_step` is the textbook one-step relation on
closed terms (rules: case firing, beta, rec unfolding, congruence steps,
parallel stepping under constructors, values and bot stepping to
themselves).  The `Engine` evaluates the same relation on a shared graph
with memoized heads, so that Amb commitments are remembered and both arms
of a race advance on every tick.

Fuel counts root steps.  Exhaustion yields Unresolved, never a wrong
answer, and any result obtained at some fuel is returned unchanged at
every larger fuel.

The graph machine itself lives in _stepcore (pure Python) with an optional
compiled twin _stepcore_cy; the fastest available one is selected at
import unless AMBREAL_PURE=1 is set in the environment.
"""

from __future__ import annotations

import gc
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import _stepcore as _pure
from .terms import (
    ARITY,
    App,
    Bot,
    Case,
    Clause,
    Con,
    Lam,
    PCon,
    PFun,
    PVar,
    Rec,
    Term,
    Var,
    free_vars,
    match_clause,
    pattern_vars,
    _subst,
)

sys.setrecursionlimit(100000)

if os.environ.get("AMBREAL_PURE"):
    _core = _pure
    COMPILED = False
else:
    try:
        from . import _stepcore_cy as _core  # type: ignore

        COMPILED = True
    except ImportError:
        _core = _pure
        COMPILED = False

UNLIMITED = 10**15

TAGS = ("Nil", "Left", "Right", "Pair", "Amb")
TAGNUM = {t: i for i, t in enumerate(TAGS)}


class EngineError(Exception):
    pass


class OpenTerm(EngineError):
    pass


class SpineFailure(EngineError):
    """A stream spine resolved to something that is not a Pair."""


class MalformedStar(EngineError):
    """A finite-iteration value resolved to neither Left nor Right."""


# ---------------------------------------------------------------------------
# the deterministic one-step relation on closed terms


def det_step(t: Term) -> Term:
    """The unique one-step successor of a closed term."""
    if free_vars(t):
        raise OpenTerm(f"det_step needs a closed term, got free {sorted(free_vars(t))}")
    return _det(t)


def _det(t: Term) -> Term:
    if isinstance(t, Case):
        hit = match_clause(t.scrutinee, t.clauses)
        if hit is not None:
            clause, env = hit
            return _subst(clause.body, env)
        return Case(_det(t.scrutinee), t.clauses)
    if isinstance(t, App):
        if isinstance(t.fn, Lam):
            return _subst(t.fn.body, {t.fn.var: t.arg})
        return App(_det(t.fn), t.arg)
    if isinstance(t, Rec):
        return App(t.body, t)
    if isinstance(t, Con):
        return Con(t.tag, tuple(_det(a) for a in t.args))
    # Lam, Bot: self steps
    return t


def is_value(t: Term) -> bool:
    return isinstance(t, (Lam, Con))


def strict_apply(f: Term, a: Term) -> Term:
    """The case dispatch that forces a to a non-Amb value before applying f."""
    clauses = [
        Clause(PCon("Nil", ()), App(f, a)),
        Clause(PCon("Left", (PVar("_s1", True),)), App(f, a)),
        Clause(PCon("Right", (PVar("_s2", True),)), App(f, a)),
        Clause(PCon("Pair", (PVar("_s3", True), PVar("_s4", True))), App(f, a)),
        Clause(PFun("_s5", True), App(f, a)),
    ]
    return Case(a, tuple(clauses))


# ---------------------------------------------------------------------------
# compilation to the graph core's code tuples


def compile_term(t: Term, scope=()):
    if isinstance(t, Var):
        try:
            return (_pure.VAR_, scope.index(t.name))
        except ValueError:
            raise OpenTerm(f"unbound variable {t.name}") from None
    if isinstance(t, Con):
        return (_pure.CON_, TAGNUM[t.tag], tuple(compile_term(a, scope) for a in t.args))
    if isinstance(t, Lam):
        return (_pure.LAM_, compile_term(t.body, (t.var,) + tuple(scope)))
    if isinstance(t, App):
        return (_pure.APP_, compile_term(t.fn, scope), compile_term(t.arg, scope))
    if isinstance(t, Rec):
        return (_pure.REC_, compile_term(t.body, scope))
    if isinstance(t, Bot):
        return (_pure.BOT_,)
    if isinstance(t, Case):
        clauses = []
        for c in t.clauses:
            binders = pattern_vars(c.pattern)
            if len(binders) > 32:
                raise EngineError("pattern binds more than 32 variables")
            inner = tuple(reversed(binders)) + tuple(scope)
            clauses.append((compile_pattern(c.pattern), compile_term(c.body, inner)))
        return (_pure.CASE_, compile_term(t.scrutinee, scope), tuple(clauses))
    raise TypeError(t)


def compile_pattern(p):
    if isinstance(p, PVar):
        return (_pure.PVAR,)
    if isinstance(p, PFun):
        return (_pure.PFUN,)
    return (_pure.PCON, TAGNUM[p.tag], tuple(compile_pattern(a) for a in p.args))


# ---------------------------------------------------------------------------
# observations


@dataclass(frozen=True)
class Obs:
    __slots__ = ()


@dataclass(frozen=True)
class OCon(Obs):
    tag: str
    children: Optional[tuple]  # None: present but not explored


@dataclass(frozen=True)
class OLam(Obs):
    pass


@dataclass(frozen=True)
class OUnresolved(Obs):
    pass


UNRESOLVED_OBS = OUnresolved()
LAM_OBS = OLam()


def render_obs(o: Obs) -> str:
    if isinstance(o, OUnresolved):
        return "<unresolved>"
    if isinstance(o, OLam):
        return "<fun>"
    if o.children is None:
        return o.tag if ARITY[o.tag] == 0 else f"{o.tag}(...)"
    if not o.children:
        return o.tag
    return f"{o.tag}({', '.join(render_obs(c) for c in o.children)})"


def obs_con(tag, *children):
    return OCon(tag, tuple(children))


# ---------------------------------------------------------------------------
# the engine


class Engine:
    """One evaluation graph.  Nodes returned by its methods belong to it.

    The compiled core keeps its graph in per-instance pools, so each
    Engine gets a fresh core instance; the pure core shares module-level
    functions over garbage-collected node objects.
    """

    def __init__(self, core=None):
        base = core or _core
        self.core = base.new_core() if hasattr(base, "new_core") else base

    # node plumbing

    def load(self, t: Term):
        if free_vars(t):
            raise OpenTerm(f"term has free variables {sorted(free_vars(t))}")
        return self.core.mk_node(compile_term(t))

    def _node(self, t):
        return self.load(t) if isinstance(t, Term) else t

    def view(self, node):
        kind, tag, kids = self.core.node_view(node)
        if kind == _pure.CON:
            return ("con", TAGS[tag], list(kids))
        if kind == _pure.LAM:
            return ("lam", None, None)
        return ("pending", None, None)

    # fueled evaluation; every method returns (result, fuel_left), with
    # None standing for Unresolved.  During a long run almost every
    # allocated node stays reachable, so cyclic-gc passes are pure cost;
    # they are paused for the duration of the call.

    @staticmethod
    def _pause_gc(fuel):
        if fuel >= 50000 and gc.isenabled():
            gc.disable()
            return True
        return False

    def whnf(self, t, fuel=UNLIMITED):
        node = self._node(t)
        paused = self._pause_gc(fuel)
        try:
            node, left = self.core.whnf_node(node, fuel)
        finally:
            if paused:
                gc.enable()
        return (self.view(node) if node is not None else None), left

    def resolve_amb(self, t, fuel=UNLIMITED):
        node = self._node(t)
        paused = self._pause_gc(fuel)
        try:
            node, left = self.core.resolve_node(node, fuel)
        finally:
            if paused:
                gc.enable()
        return (self.view(node) if node is not None else None), left

    def collapse_star(self, t, fuel=UNLIMITED):
        node = self._node(t)
        paused = self._pause_gc(fuel)
        try:
            status, node, left = self.core.collapse_node(node, fuel)
        finally:
            if paused:
                gc.enable()
        if status == _pure.MALFORMED:
            raise MalformedStar(f"iteration value resolved to {self.view(node)[1]}")
        if status == _pure.UNRESOLVED:
            return None, 0
        return self.view(node), left

    def observe(self, t, depth, fuel_per_node=UNLIMITED, policy="resolving") -> Obs:
        """Evaluate the constructor spine to `depth` levels below the root.

        Each node gets its own fuel, so one diverging child cannot block
        its siblings.  Under policy="resolving" every Amb head met on the
        way is collapsed; under "raw" Amb is reported as a constructor.
        """
        if policy not in ("raw", "resolving"):
            raise ValueError(policy)
        node = self._node(t)
        return self._observe(node, depth, fuel_per_node, policy == "resolving")

    def _observe(self, node, depth, fuel, resolving) -> Obs:
        drive = self.core.resolve_node if resolving else self.core.whnf_node
        r, _ = drive(node, fuel)
        if r is None:
            return UNRESOLVED_OBS
        kind, tag, kids = self.core.node_view(r)
        if kind == _pure.LAM:
            return LAM_OBS
        name = TAGS[tag]
        if not kids:
            return OCon(name, ())
        if depth <= 0:
            return OCon(name, None)
        return OCon(
            name,
            tuple(self._observe(k, depth - 1, fuel, resolving) for k in kids),
        )

    def stream_cell(self, t, k, fuel=UNLIMITED, depth=8) -> Obs:
        """Observation of the k-th head of a Pair spine.

        The spine is resolved with a fresh budget per tail; the head gets
        its own budget, so unresolved earlier heads are never in the way.
        A spine element that resolves to a non-Pair value raises
        SpineFailure; an unresolved spine element yields Unresolved.
        """
        node = self._node(t)
        for _ in range(k):
            r, _left = self.core.resolve_node(node, fuel)
            if r is None:
                return UNRESOLVED_OBS
            kind, tag, kids = self.core.node_view(r)
            if kind != _pure.CON or tag != _pure.PAIR:
                raise SpineFailure(f"spine head is {TAGS[tag] if kind == _pure.CON else 'a function'}")
            node = kids[1]
        r, _left = self.core.resolve_node(node, fuel)
        if r is None:
            return UNRESOLVED_OBS
        kind, tag, kids = self.core.node_view(r)
        if kind != _pure.CON or tag != _pure.PAIR:
            raise SpineFailure(f"spine head is {TAGS[tag] if kind == _pure.CON else 'a function'}")
        return self._observe(kids[0], depth, fuel, True)

    def apply(self, fnode, anode):
        return self.core.mk_app(fnode, anode)
