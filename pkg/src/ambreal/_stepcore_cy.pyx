# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled twin of _stepcore: identical algorithm and tick accounting.

The graph stepper dominates the runtime of every conversion (races burn
millions of ticks on divergent cells), so this core keeps the whole
machine in C: nodes live in growable parallel arrays and are addressed by
integer handles, environments are cons cells in their own pool, and
compiled code is flattened into integer tables on load.  No Python object
is touched between fuel ticks.

Any behavioral change here must be mirrored in _stepcore.py, the readable
reference implementation; tests/test_core_parity.py locks the two together
on results and on exact fuel usage.  ambreal.engine instantiates one Core
per Engine (new_core), so a dropped engine frees its pool.
"""

from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memset

SUSP, CON, LAM, APP, CASE, REC, BOT, IND = 0, 1, 2, 3, 4, 5, 6, 7
VAR_, CON_, LAM_, APP_, CASE_, REC_, BOT_ = 0, 1, 2, 3, 4, 5, 6
PVAR, PFUN, PCON = 0, 1, 2

NIL, LEFT, RIGHT, PAIR, AMB = 0, 1, 2, 3, 4

OK, UNRESOLVED, MALFORMED = 0, 1, 2

DEF K_SUSP = 0
DEF K_CON = 1
DEF K_LAM = 2
DEF K_APP = 3
DEF K_CASE = 4
DEF K_REC = 5
DEF K_BOT = 6
DEF K_IND = 7

DEF C_VAR = 0
DEF C_CON = 1
DEF C_LAM = 2
DEF C_APP = 3
DEF C_CASE = 4
DEF C_REC = 5
DEF C_BOT = 6

DEF P_VAR = 0
DEF P_FUN = 1
DEF P_CON = 2

DEF T_LEFT = 1
DEF T_RIGHT = 2
DEF T_AMB = 4

DEF NONEIX = -1

cdef int[5] ARITY_OF
ARITY_OF[0] = 0
ARITY_OF[1] = 1
ARITY_OF[2] = 1
ARITY_OF[3] = 2
ARITY_OF[4] = 2


cdef struct NodeRec:
    signed char kind
    signed char tag
    signed char q
    int k0
    int k1
    int code       # code index / IND target / CASE clause block
    int env
    long long gen


cdef struct CodeRec:
    signed char op
    int a
    int b
    int c


cdef struct PatRec:
    signed char op
    int tag
    int s0
    int s1


cdef struct ClauseRec:
    int pat
    int body


cdef class Core:
    cdef NodeRec* nd
    cdef Py_ssize_t n_used, n_cap
    cdef int* env_node
    cdef int* env_next
    cdef Py_ssize_t e_used, e_cap
    cdef CodeRec* code
    cdef Py_ssize_t c_used, c_cap
    cdef PatRec* pat
    cdef Py_ssize_t p_used, p_cap
    cdef ClauseRec* cls
    cdef Py_ssize_t cl_used, cl_cap
    cdef int* blk_start
    cdef int* blk_count
    cdef Py_ssize_t b_used, b_cap
    cdef long long tick
    cdef dict code_memo

    # exported status codes, mirroring the module constants
    OK = 0
    UNRESOLVED = 1
    MALFORMED = 2

    def __cinit__(self):
        self.n_cap = 4096
        self.nd = <NodeRec*>malloc(self.n_cap * sizeof(NodeRec))
        self.e_cap = 4096
        self.env_node = <int*>malloc(self.e_cap * sizeof(int))
        self.env_next = <int*>malloc(self.e_cap * sizeof(int))
        self.c_cap = 1024
        self.code = <CodeRec*>malloc(self.c_cap * sizeof(CodeRec))
        self.p_cap = 256
        self.pat = <PatRec*>malloc(self.p_cap * sizeof(PatRec))
        self.cl_cap = 256
        self.cls = <ClauseRec*>malloc(self.cl_cap * sizeof(ClauseRec))
        self.b_cap = 64
        self.blk_start = <int*>malloc(self.b_cap * sizeof(int))
        self.blk_count = <int*>malloc(self.b_cap * sizeof(int))
        if (self.nd == NULL or self.env_node == NULL or self.env_next == NULL
                or self.code == NULL or self.pat == NULL or self.cls == NULL
                or self.blk_start == NULL or self.blk_count == NULL):
            raise MemoryError
        self.n_used = 0
        self.e_used = 0
        self.c_used = 0
        self.p_used = 0
        self.cl_used = 0
        self.b_used = 0
        self.tick = 0
        self.code_memo = {}

    def __dealloc__(self):
        free(self.nd)
        free(self.env_node)
        free(self.env_next)
        free(self.code)
        free(self.pat)
        free(self.cls)
        free(self.blk_start)
        free(self.blk_count)

    # ---------------------------------------------------------------- pools

    cdef int _new_node(self, int kind) except -2:
        cdef Py_ssize_t cap
        cdef NodeRec* p
        if self.n_used >= self.n_cap:
            cap = self.n_cap * 2
            p = <NodeRec*>realloc(self.nd, cap * sizeof(NodeRec))
            if p == NULL:
                raise MemoryError
            self.nd = p
            self.n_cap = cap
        cdef Py_ssize_t i = self.n_used
        self.n_used += 1
        cdef NodeRec* r = &self.nd[i]
        r.kind = <signed char>kind
        r.tag = 0
        r.q = 0
        r.k0 = NONEIX
        r.k1 = NONEIX
        r.code = NONEIX
        r.env = NONEIX
        r.gen = 0
        return <int>i

    cdef int _new_env(self, int node, int parent) except -2:
        cdef Py_ssize_t cap
        cdef int* p
        cdef int* q
        if self.e_used >= self.e_cap:
            cap = self.e_cap * 2
            p = <int*>realloc(self.env_node, cap * sizeof(int))
            q = <int*>realloc(self.env_next, cap * sizeof(int))
            if p == NULL or q == NULL:
                raise MemoryError
            self.env_node = p
            self.env_next = q
            self.e_cap = cap
        cdef Py_ssize_t i = self.e_used
        self.e_used += 1
        self.env_node[i] = node
        self.env_next[i] = parent
        return <int>i

    # -------------------------------------------------- code registration

    cdef int _reg_pat(self, tuple p) except -2:
        cdef int op = <int>p[0]
        cdef int s0 = NONEIX, s1 = NONEIX, tag = 0
        cdef tuple sub
        if op == P_CON:
            tag = <int>p[1]
            sub = <tuple>p[2]
            if len(sub) > 0:
                s0 = self._reg_pat(<tuple>sub[0])
            if len(sub) > 1:
                s1 = self._reg_pat(<tuple>sub[1])
        cdef Py_ssize_t cap
        cdef PatRec* np
        if self.p_used >= self.p_cap:
            cap = self.p_cap * 2
            np = <PatRec*>realloc(self.pat, cap * sizeof(PatRec))
            if np == NULL:
                raise MemoryError
            self.pat = np
            self.p_cap = cap
        cdef Py_ssize_t i = self.p_used
        self.p_used += 1
        self.pat[i].op = <signed char>op
        self.pat[i].tag = tag
        self.pat[i].s0 = s0
        self.pat[i].s1 = s1
        return <int>i

    cdef int _reg_code(self, tuple t) except -2:
        cdef object hit = self.code_memo.get(id(t))
        if hit is not None:
            return <int>hit
        cdef int op = <int>t[0]
        cdef int a = NONEIX, b = NONEIX, c = NONEIX
        cdef tuple kids, clauses, cl
        cdef list pairs
        cdef Py_ssize_t i, cap
        cdef int* pi
        cdef int* pc2
        cdef ClauseRec* pc
        cdef CodeRec* pn
        if op == C_VAR:
            a = <int>t[1]
        elif op == C_CON:
            a = <int>t[1]
            kids = <tuple>t[2]
            if len(kids) > 0:
                b = self._reg_code(<tuple>kids[0])
            if len(kids) > 1:
                c = self._reg_code(<tuple>kids[1])
        elif op == C_LAM or op == C_REC:
            a = self._reg_code(<tuple>t[1])
        elif op == C_APP:
            a = self._reg_code(<tuple>t[1])
            b = self._reg_code(<tuple>t[2])
        elif op == C_CASE:
            a = self._reg_code(<tuple>t[1])
            clauses = <tuple>t[2]
            pairs = []
            for i in range(len(clauses)):
                cl = <tuple>clauses[i]
                pairs.append((self._reg_pat(<tuple>cl[0]), self._reg_code(<tuple>cl[1])))
            # clause block
            while self.cl_used + len(pairs) > self.cl_cap:
                cap = self.cl_cap * 2
                pc = <ClauseRec*>realloc(self.cls, cap * sizeof(ClauseRec))
                if pc == NULL:
                    raise MemoryError
                self.cls = pc
                self.cl_cap = cap
            if self.b_used >= self.b_cap:
                cap = self.b_cap * 2
                pi = <int*>realloc(self.blk_start, cap * sizeof(int))
                pc2 = <int*>realloc(self.blk_count, cap * sizeof(int))
                if pi == NULL or pc2 == NULL:
                    raise MemoryError
                self.blk_start = pi
                self.blk_count = pc2
                self.b_cap = cap
            b = <int>self.b_used
            self.blk_start[self.b_used] = <int>self.cl_used
            self.blk_count[self.b_used] = <int>len(pairs)
            self.b_used += 1
            for i in range(len(pairs)):
                self.cls[self.cl_used].pat = <int>(<tuple>pairs[i])[0]
                self.cls[self.cl_used].body = <int>(<tuple>pairs[i])[1]
                self.cl_used += 1
        if self.c_used >= self.c_cap:
            cap = self.c_cap * 2
            pn = <CodeRec*>realloc(self.code, cap * sizeof(CodeRec))
            if pn == NULL:
                raise MemoryError
            self.code = pn
            self.c_cap = cap
        cdef Py_ssize_t j = self.c_used
        self.c_used += 1
        self.code[j].op = <signed char>op
        self.code[j].a = a
        self.code[j].b = b
        self.code[j].c = c
        self.code_memo[id(t)] = <int>j
        # keep the tuple alive so its id stays unique
        self.code_memo[j] = t
        return <int>j

    # --------------------------------------------------------- public api

    def mk_node(self, code):
        cdef int ci = self._reg_code(<tuple>code)
        cdef int h = self._new_node(K_SUSP)
        self.nd[h].code = ci
        return h

    def mk_app(self, int f, int a):
        cdef int h = self._new_node(K_APP)
        self.nd[h].k0 = f
        self.nd[h].k1 = a
        return h

    def mk_con(self, int tag, kids):
        cdef list ks = list(kids)
        cdef int h = self._new_node(K_CON)
        self.nd[h].tag = <signed char>tag
        if len(ks) > 0:
            self.nd[h].k0 = <int>ks[0]
        if len(ks) > 1:
            self.nd[h].k1 = <int>ks[1]
        self.nd[h].q = len(ks) == 0
        return h

    def mk_bot(self):
        cdef int h = self._new_node(K_BOT)
        self.nd[h].q = 1
        return h

    def node_view(self, int h):
        cdef int x = self._head(h)
        cdef NodeRec* r = &self.nd[x]
        cdef int a
        if r.kind == K_CON:
            a = ARITY_OF[r.tag]
            if a == 0:
                return (<int>r.kind, <int>r.tag, [])
            if a == 1:
                return (<int>r.kind, <int>r.tag, [r.k0])
            return (<int>r.kind, <int>r.tag, [r.k0, r.k1])
        return (<int>r.kind, <int>r.tag, None)

    # ------------------------------------------------------------ stepping

    cdef int _follow(self, int h) noexcept:
        cdef NodeRec* nd = self.nd
        cdef int start, n, m, nxt, hops
        cdef set seen
        if nd[h].kind != K_IND:
            return h
        start = h
        n = h
        hops = 0
        while nd[n].kind == K_IND:
            n = nd[n].code
            hops += 1
            if hops > 64:  # possible cycle: rewalk with a visited set
                seen = {start}
                m = start
                while nd[m].kind == K_IND:
                    m = nd[m].code
                    if m in seen:
                        nd[m].kind = K_BOT
                        nd[m].q = 1
                        nd[m].code = NONEIX
                        break
                    seen.add(m)
                n = start
                while nd[n].kind == K_IND:
                    n = nd[n].code
                break
        while nd[start].kind == K_IND:  # path compression
            nxt = nd[start].code
            nd[start].code = n
            start = nxt
        return n

    cdef int _head(self, int h) except -2:
        cdef NodeRec* nd
        while True:
            nd = self.nd
            if nd[h].kind == K_IND:
                h = self._follow(h)
            if self.nd[h].kind == K_SUSP:
                self._expose(h)
            else:
                return h

    cdef void _expose(self, int h) except *:
        # nd pointer may move: allocate children first, then write fields
        cdef int ci = self.nd[h].code
        cdef int env = self.nd[h].env
        cdef signed char op = self.code[ci].op
        cdef int a = self.code[ci].a
        cdef int b = self.code[ci].b
        cdef int c = self.code[ci].c
        cdef int t0, t1, idx, e, target
        cdef NodeRec* r
        if op == C_CON:
            t0 = self._new_node(K_SUSP) if b != NONEIX else NONEIX
            t1 = self._new_node(K_SUSP) if c != NONEIX else NONEIX
            if t0 != NONEIX:
                self.nd[t0].code = b
                self.nd[t0].env = env
            if t1 != NONEIX:
                self.nd[t1].code = c
                self.nd[t1].env = env
            r = &self.nd[h]
            r.kind = K_CON
            r.tag = <signed char>a
            r.k0 = t0
            r.k1 = t1
            r.q = t0 == NONEIX
            r.code = NONEIX
            r.env = NONEIX
        elif op == C_APP:
            t0 = self._new_node(K_SUSP)
            self.nd[t0].code = a
            self.nd[t0].env = env
            t1 = self._new_node(K_SUSP)
            self.nd[t1].code = b
            self.nd[t1].env = env
            r = &self.nd[h]
            r.kind = K_APP
            r.k0 = t0
            r.k1 = t1
            r.code = NONEIX
            r.env = NONEIX
        elif op == C_VAR:
            idx = a
            e = env
            while idx:
                e = self.env_next[e]
                idx -= 1
            target = self.env_node[e]
            r = &self.nd[h]
            r.env = NONEIX
            if self._follow(target) == h:
                r.kind = K_BOT
                r.code = NONEIX
                r.q = 1
            else:
                r.kind = K_IND
                r.code = target
        elif op == C_LAM:
            r = &self.nd[h]
            r.kind = K_LAM
            r.code = a
            r.q = 1
        elif op == C_CASE:
            t0 = self._new_node(K_SUSP)
            self.nd[t0].code = a
            self.nd[t0].env = env
            r = &self.nd[h]
            r.kind = K_CASE
            r.k0 = t0
            r.code = b  # clause block
        elif op == C_REC:
            r = &self.nd[h]
            r.kind = K_REC
            r.code = a
        else:
            r = &self.nd[h]
            r.kind = K_BOT
            r.code = NONEIX
            r.env = NONEIX
            r.q = 1

    cdef bint _matchp(self, int h, int pi, int* binds, int* nbind) except? -1:
        # pattern table entries are stable; node records are accessed by
        # index only, since _head may grow the pool
        cdef signed char op = self.pat[pi].op
        cdef int tag = self.pat[pi].tag
        cdef int s0 = self.pat[pi].s0
        cdef int s1 = self.pat[pi].s1
        if op == P_VAR:
            if nbind[0] >= 32:
                raise OverflowError("pattern binds too many variables")
            binds[nbind[0]] = h
            nbind[0] += 1
            return True
        h = self._head(h)
        if op == P_FUN:
            if self.nd[h].kind == K_LAM:
                if nbind[0] >= 32:
                    raise OverflowError("pattern binds too many variables")
                binds[nbind[0]] = h
                nbind[0] += 1
                return True
            return False
        if self.nd[h].kind != K_CON or self.nd[h].tag != tag:
            return False
        if s0 != NONEIX:
            if not self._matchp(self.nd[h].k0, s0, binds, nbind):
                return False
            if s1 != NONEIX and not self._matchp(self.nd[h].k1, s1, binds, nbind):
                return False
        return True

    cdef int _try_match(self, int m, int blk, int* binds, int* nbind) except -2:
        # returns body code index or NONEIX
        cdef int start = self.blk_start[blk]
        cdef int count = self.blk_count[blk]
        cdef int i
        for i in range(count):
            nbind[0] = 0
            if self._matchp(m, self.cls[start + i].pat, binds, nbind):
                return self.cls[start + i].body
        return NONEIX

    cdef bint _broadcast(self, int c) except? -1:
        cdef bint prog = False
        cdef bint allq = True
        cdef int ch
        cdef int second = (ARITY_OF[self.nd[c].tag] > 1) if self.nd[c].kind == K_CON else (self.nd[c].kind == K_APP)
        ch = self._head(self.nd[c].k0)
        self.nd[c].k0 = ch
        if not self.nd[ch].q:
            if self.nd[ch].gen == self.tick:
                allq = False
                prog = True
            else:
                if self._step(ch):
                    prog = True
                if not self.nd[self._follow(ch)].q:
                    allq = False
        if second:
            ch = self._head(self.nd[c].k1)
            self.nd[c].k1 = ch
            if not self.nd[ch].q:
                if self.nd[ch].gen == self.tick:
                    allq = False
                    prog = True
                else:
                    if self._step(ch):
                        prog = True
                    if not self.nd[self._follow(ch)].q:
                        allq = False
        if allq and not prog:
            self.nd[c].q = 1
        return prog

    cdef bint _step(self, int x) except? -1:
        cdef int binds[32]
        cdef int nbind
        cdef int pathbuf[512]
        cdef int npath = 0
        cdef set pathset = None
        cdef int f, m, fn, arg, body, env
        cdef signed char k
        cdef int i
        cdef bint hit
        x = self._head(x)
        while True:
            if self.nd[x].gen == self.tick:
                return True  # this spine's step already happened via sharing
            k = self.nd[x].kind
            if k == K_CON:
                if self.nd[x].q:
                    return False
                if ARITY_OF[self.nd[x].tag] == 0:
                    self.nd[x].q = 1
                    return False
                self.nd[x].gen = self.tick
                return self._broadcast(x)
            if k == K_LAM or k == K_BOT:
                return False
            if k == K_REC:
                # rec M -> M (rec M); the recursive occurrence shares x
                self.nd[x].gen = self.tick
                fn = self._new_node(K_SUSP)
                self.nd[fn].code = self.nd[x].code
                self.nd[fn].env = self.nd[x].env
                self.nd[x].kind = K_APP
                self.nd[x].k0 = fn
                self.nd[x].k1 = x
                self.nd[x].code = NONEIX
                self.nd[x].env = NONEIX
                return True
            if k == K_APP:
                f = self._head(self.nd[x].k0)
                self.nd[x].k0 = f
                if self.nd[f].kind == K_LAM:
                    self.nd[x].gen = self.tick
                    arg = self.nd[x].k1
                    env = self._new_env(arg, self.nd[f].env)
                    self.nd[x].kind = K_SUSP
                    self.nd[x].code = self.nd[f].code
                    self.nd[x].env = env
                    self.nd[x].k0 = NONEIX
                    self.nd[x].k1 = NONEIX
                    return True
                if self.nd[f].q:  # frozen constructor/bot: stuck application
                    self.nd[x].q = 1
                    return False
                if self.nd[f].kind == K_CON:
                    self.nd[x].gen = self.tick
                    if self._broadcast(f):
                        return True
                    self.nd[x].q = 1
                    return False
            elif k == K_CASE:
                m = self._head(self.nd[x].k0)
                self.nd[x].k0 = m
                nbind = 0
                body = self._try_match(m, self.nd[x].code, binds, &nbind)
                if body != NONEIX:
                    self.nd[x].gen = self.tick
                    env = self.nd[x].env
                    for i in range(nbind):
                        env = self._new_env(binds[i], env)
                    self.nd[x].kind = K_SUSP
                    self.nd[x].code = body
                    self.nd[x].env = env
                    self.nd[x].k0 = NONEIX
                    return True
                if self.nd[m].q:
                    self.nd[x].q = 1
                    return False
                if self.nd[m].kind == K_CON:
                    self.nd[x].gen = self.tick
                    if self._broadcast(m):
                        return True
                    self.nd[x].q = 1
                    return False
                f = m
            else:
                x = self._head(x)
                continue
            # descend the congruence spine, freezing self-feeding spines
            if pathset is not None:
                hit = x in pathset
            else:
                hit = False
                for i in range(npath):
                    if pathbuf[i] == x:
                        hit = True
                        break
            if hit:
                for i in range(npath):
                    self.nd[pathbuf[i]].q = 1
                if pathset is not None:
                    for i in pathset:
                        self.nd[<int>i].q = 1
                self.nd[x].q = 1
                return False
            if npath < 512:
                pathbuf[npath] = x
                npath += 1
            else:
                if pathset is None:
                    pathset = set()
                    for i in range(npath):
                        pathset.add(pathbuf[i])
                pathset.add(x)
            x = f

    def step_node(self, int x):
        self.tick += 1
        return self._step(x)

    cdef long long _whnf(self, int x, long long fuel, int* out) except? -3:
        cdef signed char k
        while True:
            x = self._head(x)
            k = self.nd[x].kind
            if k == K_CON or k == K_LAM:
                out[0] = x
                return fuel
            if self.nd[x].q or fuel <= 0:
                out[0] = NONEIX
                return 0
            fuel -= 1
            self.tick += 1
            if not self._step(x):
                out[0] = NONEIX
                return 0

    def whnf_node(self, int x, long long fuel):
        cdef int out = NONEIX
        fuel = self._whnf(x, fuel, &out)
        if out == NONEIX:
            return None, 0
        return out, fuel

    cdef long long _resolve(self, int x, long long fuel, int* out) except? -3:
        cdef int a, b, won
        cdef NodeRec* r
        while True:
            fuel = self._whnf(x, fuel, out)
            if out[0] == NONEIX:
                return 0
            x = out[0]
            if self.nd[x].kind != K_CON or self.nd[x].tag != T_AMB:
                return fuel
            won = NONEIX
            while won == NONEIX:
                a = self._head(self.nd[x].k0)
                self.nd[x].k0 = a
                if self.nd[a].kind == K_CON or self.nd[a].kind == K_LAM:
                    won = a
                    break
                b = self._head(self.nd[x].k1)
                self.nd[x].k1 = b
                if self.nd[b].kind == K_CON or self.nd[b].kind == K_LAM:
                    won = b
                    break
                if fuel <= 0 or (self.nd[a].q and self.nd[b].q):
                    out[0] = NONEIX
                    return 0
                fuel -= 1
                self.tick += 1
                if not self._step(x):
                    out[0] = NONEIX
                    return 0
            # commitment: the Amb node becomes its chosen branch for good
            r = &self.nd[x]
            r.kind = K_IND
            r.code = won
            r.k0 = NONEIX
            r.k1 = NONEIX
            x = won

    def resolve_node(self, int x, long long fuel):
        cdef int out = NONEIX
        fuel = self._resolve(x, fuel, &out)
        if out == NONEIX:
            return None, 0
        return out, fuel

    def canon_form(self, int root, int limit=20000):
        """Canonical form of the rooted graph: equal forms are isomorphic."""
        cdef dict idx = {}
        cdef list order = []
        cdef list stack = [root]
        cdef list refs, parts, env_ix
        cdef int n, e
        cdef object i0, i1
        while stack:
            n = self._follow(<int>stack.pop())
            if n in idx:
                continue
            if len(order) >= limit:
                return None
            idx[n] = len(order)
            order.append(n)
            refs = []
            if self.nd[n].k0 != NONEIX:
                refs.append(self.nd[n].k0)
            if self.nd[n].k1 != NONEIX:
                refs.append(self.nd[n].k1)
            e = self.nd[n].env
            while e != NONEIX:
                refs.append(self.env_node[e])
                e = self.env_next[e]
            refs.reverse()
            stack.extend(refs)
        parts = []
        for n in order:
            i0 = None if self.nd[n].k0 == NONEIX else idx[self._follow(self.nd[n].k0)]
            i1 = None if self.nd[n].k1 == NONEIX else idx[self._follow(self.nd[n].k1)]
            env_ix = []
            e = self.nd[n].env
            while e != NONEIX:
                env_ix.append(idx[self._follow(self.env_node[e])])
                e = self.env_next[e]
            code = self.nd[n].code if self.nd[n].kind != K_CON else NONEIX
            parts.append((<int>self.nd[n].kind, <int>self.nd[n].tag,
                          <bint>self.nd[n].q, code, i0, i1, tuple(env_ix)))
        return tuple(parts)

    def collapse_node(self, int x, long long fuel):
        cdef object form, mark
        cdef int r = NONEIX
        cdef int v = NONEIX
        cdef long long peels = 0
        cdef long long next_check = 8
        mark = None
        while True:
            fuel = self._resolve(x, fuel, &r)
            if r == NONEIX:
                return UNRESOLVED, None, 0
            if self.nd[r].kind == K_CON and self.nd[r].tag == T_LEFT:
                fuel = self._whnf(self.nd[r].k0, fuel, &v)
                if v == NONEIX:
                    return UNRESOLVED, None, 0
                return OK, v, fuel
            if self.nd[r].kind == K_CON and self.nd[r].tag == T_RIGHT:
                x = self.nd[r].k0
                peels += 1
                if peels == next_check:
                    form = self.canon_form(x)
                    if form is not None and form == mark:
                        return UNRESOLVED, None, 0  # state recurs: divergent
                    mark = form
                    next_check *= 2
                continue
            return MALFORMED, r, fuel


def new_core():
    return Core()
