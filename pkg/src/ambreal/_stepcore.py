"""Graph-reduction core for the small-step semantics (pure Python).

Terms are compiled to nested tuples (see ambreal.engine.compile_term); this
module evaluates them on a shared mutable graph with memoized heads.  A
"tick" of fuel is one application of the root step relation: beta, case
firing, rec unfolding, or the congruence step that advances the function
position, the scrutinee, or (for constructor-rooted terms) all children at
once.  That last broadcast rule is what races the two arms of Amb fairly:
one tick advances both.

Sharing subtleties: rec unfolds to an application whose argument is the
rec node itself, so streams are cyclic graphs.  A generation stamp keeps
each node from being advanced twice in one tick (a shared subterm steps
once for all its occurrences), and a spine that loops back on itself is
frozen as divergent.

Divergence is detected eagerly where sound: a node whose step is the
identity (bot, a stuck application, a frozen scrutinee matching no clause)
is flagged quiescent, a fuel loop that observes a no-progress tick drains
the remaining fuel in one go, and a finite-iteration collapse that revisits
an isomorphic machine state is cut off by canonical-form checkpoints.
None of this changes results, only the cost of reporting Unresolved.

Nodes have at most two children (constructor arity is bounded by 2 and
application/case use the same slots), stored in direct fields.

There is a Cython twin of this module (_stepcore_cy.pyx) with the same API
and identical tick accounting; ambreal.engine picks whichever is importable.
"""

# node kinds / code opcodes (shared numbering where it helps)
SUSP, CON, LAM, APP, CASE, REC, BOT, IND = range(8)
# code tuples: (VAR_, idx) (CON_, tag, kids) (LAM_, body) (APP_, fn, arg)
# (CASE_, scrut, clauses) (REC_, body) (BOT_,)
VAR_, CON_, LAM_, APP_, CASE_, REC_, BOT_ = range(7)
# pattern opcodes: (PVAR,) (PFUN,) (PCON, tag, kids)
PVAR, PFUN, PCON = range(3)

NIL, LEFT, RIGHT, PAIR, AMB = range(5)
ARITY_OF = (0, 1, 1, 2, 2)

OK, UNRESOLVED, MALFORMED = range(3)

_tick = 0


class Node:
    __slots__ = ("kind", "tag", "k0", "k1", "code", "env", "q", "gen")

    def __init__(self, kind, tag=0, k0=None, k1=None, code=None, env=None, q=False):
        self.kind = kind
        self.tag = tag
        self.k0 = k0
        self.k1 = k1
        self.code = code
        self.env = env
        self.q = q
        self.gen = 0


def _arity(n):
    if n.kind == CON:
        return ARITY_OF[n.tag]
    if n.kind == APP:
        return 2
    if n.kind == CASE:
        return 1
    return 0


def mk_node(code):
    return Node(SUSP, code=code)


def mk_app(f, a):
    return Node(APP, k0=f, k1=a)


def mk_con(tag, kids):
    kids = list(kids)
    return Node(
        CON,
        tag=tag,
        k0=kids[0] if kids else None,
        k1=kids[1] if len(kids) > 1 else None,
        q=not kids,
    )


def mk_bot():
    return Node(BOT, q=True)


def node_view(n):
    n = head(n)
    a = _arity(n) if n.kind == CON else 0
    kids = [n.k0, n.k1][:a] if n.kind == CON else None
    return (n.kind, n.tag, kids)


def follow(n):
    if n.kind != IND:
        return n
    start = n
    hops = 0
    while n.kind == IND:
        n = n.code
        hops += 1
        if hops > 64:  # possible cycle: walk again with a visited set
            seen = {id(start)}
            m = start
            while m.kind == IND:
                m = m.code
                if id(m) in seen:
                    m.kind = BOT
                    m.q = True
                    m.code = None
                    break
                seen.add(id(m))
            n = start
            while n.kind == IND:
                n = n.code
            break
    while start.kind == IND:  # path compression
        nxt = start.code
        start.code = n
        start = nxt
    return n


def _expose(n):
    """Unfold a suspension to its head form.  Costs no fuel."""
    code = n.code
    env = n.env
    op = code[0]
    if op == CON_:
        kids = code[2]
        n.kind = CON
        n.tag = code[1]
        if kids:
            n.k0 = Node(SUSP, code=kids[0], env=env)
            if len(kids) > 1:
                n.k1 = Node(SUSP, code=kids[1], env=env)
        else:
            n.q = True
        n.code = None
        n.env = None
    elif op == APP_:
        n.kind = APP
        n.k0 = Node(SUSP, code=code[1], env=env)
        n.k1 = Node(SUSP, code=code[2], env=env)
        n.code = None
        n.env = None
    elif op == VAR_:
        idx = code[1]
        e = env
        while idx:
            e = e[1]
            idx -= 1
        target = e[0]
        n.env = None
        if follow(target) is n:
            n.kind = BOT
            n.code = None
            n.q = True
        else:
            n.kind = IND
            n.code = target
    elif op == LAM_:
        n.kind = LAM
        n.code = code[1]
        n.q = True
    elif op == CASE_:
        n.kind = CASE
        n.k0 = Node(SUSP, code=code[1], env=env)
        n.code = code[2]
    elif op == REC_:
        n.kind = REC
        n.code = code[1]
    else:  # BOT_
        n.kind = BOT
        n.code = None
        n.env = None
        n.q = True


def head(n):
    while True:
        n = follow(n)
        if n.kind == SUSP:
            _expose(n)
        else:
            return n


def _match(nd, pat, binds):
    op = pat[0]
    if op == PVAR:
        binds.append(nd)
        return True
    nd = head(nd)
    if op == PFUN:
        if nd.kind == LAM:
            binds.append(nd)
            return True
        return False
    if nd.kind != CON or nd.tag != pat[1]:
        return False
    sub = pat[2]
    if sub:
        if not _match(nd.k0, sub[0], binds):
            return False
        if len(sub) > 1 and not _match(nd.k1, sub[1], binds):
            return False
    return True


def try_match(m, clauses):
    for pat, body in clauses:
        binds = []
        if _match(m, pat, binds):
            return binds, body
    return None


def _broadcast(c):
    """One simultaneous step of every non-quiescent child under c.

    Shared children (including cyclic occurrences) advance once per tick:
    the generation stamp set by _step skips them on a second visit.
    """
    prog = False
    allq = True
    ch = head(c.k0)
    c.k0 = ch
    if not ch.q:
        if ch.gen == _tick:
            allq = False
            prog = True
        else:
            if _step(ch):
                prog = True
            if not follow(ch).q:
                allq = False
    if _arity(c) > 1:
        ch = head(c.k1)
        c.k1 = ch
        if not ch.q:
            if ch.gen == _tick:
                allq = False
                prog = True
            else:
                if _step(ch):
                    prog = True
                if not follow(ch).q:
                    allq = False
    if allq and not prog:
        c.q = True
    return prog


def _step(x):
    """One step at x.  Returns False iff x is frozen: nothing changed and
    nothing ever will."""
    x = head(x)
    path = None
    while True:
        if x.gen == _tick:
            return True  # this spine's step already happened via sharing
        k = x.kind
        if k == CON:
            if x.q:
                return False
            if ARITY_OF[x.tag] == 0:
                x.q = True
                return False
            x.gen = _tick
            return _broadcast(x)
        if k == LAM or k == BOT:
            return False
        if k == REC:
            # rec M -> M (rec M); the recursive occurrence is shared with x
            x.gen = _tick
            fn = Node(SUSP, code=x.code, env=x.env)
            x.kind = APP
            x.k0 = fn
            x.k1 = x
            x.code = None
            x.env = None
            return True
        if k == APP:
            f = head(x.k0)
            x.k0 = f
            if f.kind == LAM:
                x.gen = _tick
                arg = x.k1
                x.kind = SUSP
                x.code = f.code
                x.env = (arg, f.env)
                x.k0 = None
                x.k1 = None
                return True
            if f.q:  # fn frozen as constructor/bot: application is stuck
                x.q = True
                return False
            if f.kind == CON:
                x.gen = _tick
                if _broadcast(f):
                    return True
                x.q = True
                return False
        elif k == CASE:
            m = head(x.k0)
            x.k0 = m
            r = try_match(m, x.code)
            if r is not None:
                x.gen = _tick
                binds, body = r
                env = x.env
                for nd in binds:
                    env = (nd, env)
                x.kind = SUSP
                x.code = body
                x.env = env
                x.k0 = None
                return True
            if m.q:
                x.q = True
                return False
            if m.kind == CON:
                x.gen = _tick
                if _broadcast(m):
                    return True
                x.q = True
                return False
            f = m
        else:
            x = head(x)
            continue
        # descend the congruence spine (fn / scrutinee positions), freezing
        # self-feeding spines
        if path is None:
            path = [x]
        elif any(n is x for n in path):
            for n in path:
                n.q = True
            return False
        else:
            path.append(x)
        x = f


def step_node(x):
    """Perform one root step at x.  Returns False iff x is frozen forever."""
    global _tick
    _tick += 1
    return _step(x)


def whnf_node(x, fuel):
    """Drive x to weak head normal form.  Returns (node or None, fuel left)."""
    global _tick
    while True:
        x = head(x)
        k = x.kind
        if k == CON or k == LAM:
            return x, fuel
        if x.q or fuel <= 0:
            return None, 0
        fuel -= 1
        _tick += 1
        if not _step(x):
            return None, 0


def resolve_node(x, fuel):
    """whnf, then race and commit Amb heads until a non-Amb value appears."""
    global _tick
    while True:
        x, fuel = whnf_node(x, fuel)
        if x is None:
            return None, 0
        if x.kind != CON or x.tag != AMB:
            return x, fuel
        won = None
        while won is None:
            a = head(x.k0)
            x.k0 = a
            if a.kind == CON or a.kind == LAM:
                won = a
                break
            b = head(x.k1)
            x.k1 = b
            if b.kind == CON or b.kind == LAM:
                won = b
                break
            if fuel <= 0 or (a.q and b.q):
                return None, 0
            fuel -= 1
            _tick += 1
            if not _step(x):
                return None, 0
        # commitment: the Amb node becomes its chosen branch for good
        x.kind = IND
        x.code = won
        x.k0 = None
        x.k1 = None
        x = won


def canon_form(root, limit=20000):
    """Canonical form of the rooted graph: equal forms are isomorphic.

    Node indexes follow a deterministic preorder, indirections are
    transparent, and generation scratch is excluded.  Returns None when
    the reachable graph exceeds the limit.
    """
    idx = {}
    order = []
    stack = [root]
    while stack:
        n = follow(stack.pop())
        if id(n) in idx:
            continue
        if len(order) >= limit:
            return None
        idx[id(n)] = len(order)
        order.append(n)
        refs = []
        if n.k0 is not None:
            refs.append(n.k0)
        if n.k1 is not None:
            refs.append(n.k1)
        e = n.env
        while e is not None:
            refs.append(e[0])
            e = e[1]
        for r in reversed(refs):
            stack.append(r)
    parts = []
    for n in order:
        k0 = None if n.k0 is None else idx[id(follow(n.k0))]
        k1 = None if n.k1 is None else idx[id(follow(n.k1))]
        env_ix = []
        e = n.env
        while e is not None:
            env_ix.append(idx[id(follow(e[0]))])
            e = e[1]
        # code by identity: shared code positions discriminate exactly like
        # the compiled core's registration indexes
        parts.append((n.kind, n.tag, n.q, id(n.code), k0, k1, tuple(env_ix)))
    return tuple(parts)


def collapse_node(x, fuel):
    """Resolve a finite-iteration value: peel Right(..), return whnf of the
    Left payload.  Returns (status, node or None, fuel left).

    A divergent iteration that cycles through isomorphic machine states is
    detected by comparing canonical forms at exponentially spaced peel
    counts, and drains the remaining fuel at the detection point.
    """
    peels = 0
    next_check = 8
    mark = None
    while True:
        r, fuel = resolve_node(x, fuel)
        if r is None:
            return UNRESOLVED, None, 0
        if r.kind == CON and r.tag == LEFT:
            v, fuel = whnf_node(r.k0, fuel)
            if v is None:
                return UNRESOLVED, None, 0
            return OK, v, fuel
        if r.kind == CON and r.tag == RIGHT:
            x = r.k0
            peels += 1
            if peels == next_check:
                form = canon_form(x)
                if form is not None and form == mark:
                    return UNRESOLVED, None, 0  # state recurs: divergent
                mark = form
                next_check *= 2
            continue
        return MALFORMED, r, fuel
