"""Loader for the prelude of extracted programs (prelude.cfp).

Every definition is parsed, resolved against the earlier ones (so each
entry is a closed term), compatibility-checked, and compiled once into a
shared evaluation graph.  The combinators contain Amb only under binders,
so sharing their nodes across runs never shares a commitment.
"""

from __future__ import annotations

from importlib import resources

from .engine import Engine, Obs, UNLIMITED
from .terms import Case, IncompatibleClauses, Term, check_compatibility, parse_defs


class PreludeError(Exception):
    def __init__(self, name, cause):
        super().__init__(f"prelude entry {name!r}: {cause}")
        self.name = name


class UnknownProgram(KeyError):
    pass


def _cases(t: Term):
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Case):
            yield u
        for f in getattr(u, "__dataclass_fields__", ()):
            v = getattr(u, f)
            if isinstance(v, Term):
                stack.append(v)
            elif isinstance(v, tuple):
                for w in v:
                    if isinstance(w, Term):
                        stack.append(w)
                    elif hasattr(w, "body"):
                        stack.append(w.body)


class Prelude:
    def __init__(self, terms, engine=None):
        self.terms = dict(terms)
        self.engine = engine or Engine()
        self._nodes = {}

    def __contains__(self, name):
        return name in self.terms

    def names(self):
        return list(self.terms)

    def get(self, name) -> Term:
        try:
            return self.terms[name]
        except KeyError:
            raise UnknownProgram(name) from None

    def node(self, name):
        if name not in self._nodes:
            self._nodes[name] = self.engine.load(self.get(name))
        return self._nodes[name]

    def app_node(self, name, *arg_nodes):
        n = self.node(name)
        for a in arg_nodes:
            n = self.engine.apply(n, a)
        return n

    def run(self, name, args, fuel=UNLIMITED, depth=8, policy="resolving") -> Obs:
        """Observe the application of a prelude program to argument terms."""
        e = self.engine
        node = self.node(name)
        for a in args:
            node = e.apply(node, e.load(a) if isinstance(a, Term) else a)
        return e.observe(node, depth, fuel, policy)


def prelude_source() -> str:
    return resources.files(__package__).joinpath("prelude.cfp").read_text()


def load_prelude(engine=None) -> Prelude:
    defs, _main = parse_defs(prelude_source())
    for name, term in defs:
        try:
            for c in _cases(term):
                check_compatibility(c.clauses)
        except IncompatibleClauses as exc:
            raise PreludeError(name, exc) from exc
    return Prelude(defs, engine)
