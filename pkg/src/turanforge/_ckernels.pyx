# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels; semantics match ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free, calloc

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil

DEF TRI = 0
DEF CYC = 1
DEF KST = 2
DEF BOOK = 3


cdef inline int popc(uint64_t x) noexcept nogil:
    return __builtin_popcountll(x)


cdef inline int ctz(uint64_t x) noexcept nogil:
    return __builtin_ctzll(x)


cdef inline int row_and_pop(const uint64_t[:, ::1] w, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    cdef Py_ssize_t k
    cdef int s = 0
    for k in range(w.shape[1]):
        s += popc(w[a, k] & w[b, k])
    return s


def triangles_per_vertex(g):
    cdef const uint64_t[:, ::1] w = g.words
    cdef Py_ssize_t n = g.n, nw = w.shape[1], v, k, u
    cdef uint64_t x
    cdef long long s
    out = np.zeros(n, dtype=np.int64)
    cdef long long[::1] o = out
    with nogil:
        for v in range(n):
            s = 0
            for k in range(nw):
                x = w[v, k]
                while x:
                    u = k * 64 + ctz(x)
                    x &= x - 1
                    s += row_and_pop(w, u, v)
            o[v] = s // 2
    return [int(c) for c in out]


def c4_count(g):
    cdef const uint64_t[:, ::1] w = g.words
    cdef Py_ssize_t n = g.n, u, v
    cdef long long total = 0, c
    with nogil:
        for u in range(n):
            for v in range(u + 1, n):
                c = row_and_pop(w, u, v)
                total += c * (c - 1) // 2
    return int(total // 2)


def c4_count_within(g, vertices):
    cdef const uint64_t[:, ::1] w = g.words
    vs_arr = np.array(sorted(vertices), dtype=np.int64)
    cdef long long[::1] vs = vs_arr
    cdef Py_ssize_t m = vs.shape[0], i, j
    cdef long long total = 0, c
    with nogil:
        for i in range(m):
            for j in range(i + 1, m):
                c = row_and_pop(w, vs[i], vs[j])
                total += c * (c - 1) // 2
    return int(total)


cdef object _pair_bitset(g, int t, long long[::1] vs):
    cdef const uint64_t[:, ::1] w = g.words
    cdef Py_ssize_t m = vs.shape[0], i, j
    cdef long long ru = -1, rv = -1
    with nogil:
        for i in range(m):
            if row_and_pop(w, vs[i], vs[i]) < t:
                continue
            for j in range(i + 1, m):
                if row_and_pop(w, vs[i], vs[j]) >= t:
                    ru = vs[i]
                    rv = vs[j]
                    break
            if ru >= 0:
                break
    if ru < 0:
        return None
    return int(ru), int(rv)


cdef object _pair_twohop(g, int t):
    # lexicographically least pair via counting length-2 walks u-w-x, x > u
    cdef Py_ssize_t n = g.n
    degs = np.array(g.degrees(), dtype=np.int64)
    indptr_a = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degs, out=indptr_a[1:])
    indices_a = np.fromiter((u for r in range(n) for u in g.neighbors(r)),
                            dtype=np.int64, count=int(indptr_a[n]))
    cdef long long[::1] indptr = indptr_a
    cdef long long[::1] indices = indices_a
    counts_a = np.zeros(n, dtype=np.int64)
    touched_a = np.zeros(n, dtype=np.int64)
    cdef long long[::1] counts = counts_a
    cdef long long[::1] touched = touched_a
    cdef Py_ssize_t u, a, b, x, wv, nt, k
    cdef long long best = -1, bu = -1
    with nogil:
        for u in range(n):
            nt = 0
            for a in range(indptr[u], indptr[u + 1]):
                wv = indices[a]
                for b in range(indptr[wv], indptr[wv + 1]):
                    x = indices[b]
                    if x > u:
                        if counts[x] == 0:
                            touched[nt] = x
                            nt += 1
                        counts[x] += 1
            best = -1
            for k in range(nt):
                x = touched[k]
                if counts[x] >= t and (best < 0 or x < best):
                    best = x
                counts[x] = 0
            if best >= 0:
                bu = u
                break
    if bu < 0:
        return None
    return int(bu), int(best)


def first_pair_codegree(g, int t, vertices=None):
    cdef Py_ssize_t n = g.n
    if vertices is None and n > 256 and t >= 1:
        degs = g.degrees()
        twohop = sum(d * d for d in degs)
        bitset = n * n * g.words.shape[1] // 2
        if twohop < bitset:
            return _pair_twohop(g, t)
    vs = np.array(range(n) if vertices is None else sorted(vertices), dtype=np.int64)
    return _pair_bitset(g, t, vs)


# -- branch-and-bound subtree search ----------------------------------------

cdef struct Ctx:
    int ns
    int nv
    int row0_len
    int bip
    int npat
    int *su
    int *sv
    int *rem
    int *capped
    int *side_u
    int *pk
    int *pa
    int *pb
    uint64_t rows[64]
    int deg[64]
    unsigned char *chosen
    unsigned char *best_chosen
    int cur
    int closed
    int best
    int seed
    long long nodes
    long long budget
    int aborted


cdef int has_cycle_path(Ctx *c, int start, int target, int steps, uint64_t visited) noexcept nogil:
    cdef uint64_t cand, low
    cdef int w
    if steps == 1:
        return (c.rows[start] >> target) & 1
    cand = c.rows[start] & ~visited
    while cand:
        low = cand & (~cand + 1)
        w = ctz(cand)
        cand ^= low
        if has_cycle_path(c, w, target, steps - 1, visited | low):
            return 1
    return 0


cdef int kst_rec(Ctx *c, uint64_t cands, uint64_t common, int need, int t) noexcept nogil:
    cdef uint64_t low
    cdef int x
    if popc(common) < t - 1:
        return 0
    if need == 0:
        return 1
    while cands:
        low = cands & (~cands + 1)
        x = ctz(cands)
        cands ^= low
        if kst_rec(c, cands, common & c.rows[x], need - 1, t):
            return 1
    return 0


cdef inline int kst_exists(Ctx *c, int a, int b, int s, int t) noexcept nogil:
    return kst_rec(c, c.rows[b] & ~((<uint64_t>1) << a),
                   c.rows[a] & ~((<uint64_t>1) << b), s - 1, t)


cdef int book_rec(Ctx *c, uint64_t A, uint64_t B, uint64_t avail, int need) noexcept nogil:
    cdef uint64_t low, rest, partners, plow
    cdef int w
    if need == 0:
        return 1
    if popc(avail) < 2 * need:
        return 0
    low = avail & (~avail + 1)
    w = ctz(avail)
    rest = avail ^ low
    partners = 0
    if A & low:
        partners |= B
    if B & low:
        partners |= A
    partners &= c.rows[w] & rest
    while partners:
        plow = partners & (~partners + 1)
        partners ^= plow
        if book_rec(c, A, B, rest & ~plow, need - 1):
            return 1
    return book_rec(c, A, B, rest, need)


cdef inline int book_exists(Ctx *c, int x, int y, int t) noexcept nogil:
    cdef uint64_t spine = ((<uint64_t>1) << x) | ((<uint64_t>1) << y)
    cdef uint64_t A = c.rows[y] & ~spine
    cdef uint64_t B = c.rows[x] & ~spine
    return book_rec(c, A, B, A | B, t)


cdef int creates_pattern(Ctx *c, int u, int v) noexcept nogil:
    cdef uint64_t bu = (<uint64_t>1) << u
    cdef uint64_t bv = (<uint64_t>1) << v
    cdef uint64_t M, xs, ys
    cdef int p, kind, need_added = 0, found = 0, x, y
    for p in range(c.npat):
        kind = c.pk[p]
        if kind == TRI:
            if c.rows[u] & c.rows[v]:
                return 1
        elif kind == CYC:
            if has_cycle_path(c, v, u, c.pa[p] - 1, bu | bv):
                return 1
        else:
            need_added = 1
    if not need_added:
        return 0
    c.rows[u] |= bv
    c.rows[v] |= bu
    for p in range(c.npat):
        kind = c.pk[p]
        if kind == KST:
            if kst_exists(c, u, v, c.pa[p], c.pb[p]) or kst_exists(c, v, u, c.pa[p], c.pb[p]):
                found = 1
                break
        elif kind == BOOK:
            M = bu | bv | c.rows[u] | c.rows[v]
            xs = M
            while xs and not found:
                x = ctz(xs)
                xs &= xs - 1
                ys = c.rows[x]
                while ys:
                    y = ctz(ys)
                    ys &= ys - 1
                    if y < x and (M >> y) & 1:
                        continue
                    if book_exists(c, x, y, c.pa[p]):
                        found = 1
                        break
            if found:
                break
    c.rows[u] &= ~bv
    c.rows[v] &= ~bu
    return found


cdef int upper_bound(Ctx *c, int i) noexcept nogil:
    cdef int *remi = c.rem + i * c.nv
    cdef int dmax, ub, w, x, s_u = 0, s_v = 0, s = 0
    if i < c.row0_len and not c.closed:
        dmax = c.deg[0] + remi[0]
    else:
        dmax = c.deg[0]
    ub = c.cur + c.ns - i
    if c.bip:
        for w in range(c.nv):
            x = c.deg[w] + remi[w]
            if c.side_u[w]:
                s_u += dmax if x > dmax else x
            else:
                s_v += x
        if s_u < ub:
            ub = s_u
        if s_v < ub:
            ub = s_v
    else:
        for w in range(c.nv):
            x = c.deg[w] + remi[w]
            if c.capped[w] and x > dmax:
                x = dmax
            s += x
        if s // 2 < ub:
            ub = s // 2
    return ub


cdef void rec(Ctx *c, int i) noexcept nogil:
    cdef int ub, u, v, in_row0, ok, k, d0
    c.nodes += 1
    if c.nodes > c.budget:
        c.aborted = 1
        return
    ub = upper_bound(c, i)
    if ub < c.seed or ub <= c.best:
        return
    if i == c.ns:
        c.best = c.cur
        for k in range(c.ns):
            c.best_chosen[k] = c.chosen[k]
        return
    u = c.su[i]
    v = c.sv[i]
    in_row0 = i < c.row0_len
    ok = 1
    if in_row0:
        ok = not c.closed
    else:
        d0 = c.deg[0]
        if (c.capped[u] and c.deg[u] >= d0) or (c.capped[v] and c.deg[v] >= d0):
            ok = 0
    if ok and creates_pattern(c, u, v):
        ok = 0
    if ok:
        c.rows[u] |= (<uint64_t>1) << v
        c.rows[v] |= (<uint64_t>1) << u
        c.deg[u] += 1
        c.deg[v] += 1
        c.cur += 1
        c.chosen[i] = 1
        rec(c, i + 1)
        c.chosen[i] = 0
        c.cur -= 1
        c.deg[u] -= 1
        c.deg[v] -= 1
        c.rows[u] &= ~((<uint64_t>1) << v)
        c.rows[v] &= ~((<uint64_t>1) << u)
        if c.aborted:
            return
    if in_row0 and not c.closed:
        c.closed = 1
        rec(c, i + 1)
        c.closed = 0
    else:
        rec(c, i + 1)


def search_subtree(prob, state, int seed, long long budget):
    """Compiled twin of ``_pykernels.search_subtree``."""
    cdef Ctx c
    cdef int k
    if prob.nv > 64:
        raise ValueError("compiled search supports at most 64 vertices")
    su_a = np.ascontiguousarray(prob.su, dtype=np.intc)
    sv_a = np.ascontiguousarray(prob.sv, dtype=np.intc)
    rem_a = np.ascontiguousarray(np.asarray(prob.rem, dtype=np.intc).reshape(-1))
    cap_a = np.ascontiguousarray(prob.capped, dtype=np.intc)
    side_a = np.ascontiguousarray(prob.side_u, dtype=np.intc)
    npat = len(prob.patterns)
    pk_a = np.array([p[0] for p in prob.patterns] or [0], dtype=np.intc)
    pa_a = np.array([p[1] for p in prob.patterns] or [0], dtype=np.intc)
    pb_a = np.array([p[2] for p in prob.patterns] or [0], dtype=np.intc)
    ns = len(prob.su)
    chosen_a = np.zeros(max(ns, 1), dtype=np.uint8)
    chosen_a[:ns] = np.frombuffer(bytes(state.chosen), dtype=np.uint8) if ns else []
    best_a = np.zeros(max(ns, 1), dtype=np.uint8)

    cdef int[::1] su_m = su_a
    cdef int[::1] sv_m = sv_a
    cdef int[::1] rem_m = rem_a
    cdef int[::1] cap_m = cap_a
    cdef int[::1] side_m = side_a
    cdef int[::1] pk_m = pk_a
    cdef int[::1] pa_m = pa_a
    cdef int[::1] pb_m = pb_a
    cdef unsigned char[::1] ch_m = chosen_a
    cdef unsigned char[::1] be_m = best_a

    c.ns = ns
    c.nv = prob.nv
    c.row0_len = prob.row0_len
    c.bip = 1 if prob.bipartite else 0
    c.npat = npat
    c.su = &su_m[0]
    c.sv = &sv_m[0]
    c.rem = &rem_m[0]
    c.capped = &cap_m[0]
    c.side_u = &side_m[0]
    c.pk = &pk_m[0]
    c.pa = &pa_m[0]
    c.pb = &pb_m[0]
    c.chosen = &ch_m[0]
    c.best_chosen = &be_m[0]
    c.cur = 0
    for k in range(64):
        c.rows[k] = 0
        c.deg[k] = 0
    for k in range(prob.nv):
        c.rows[k] = <uint64_t>state.rows[k]
        c.deg[k] = popc(c.rows[k])
        c.cur += c.deg[k]
    c.cur //= 2
    c.closed = 1 if state.row0_closed else 0
    c.best = -1
    c.seed = seed
    c.nodes = 0
    c.budget = budget
    c.aborted = 0
    cdef int start = state.index
    with nogil:
        rec(&c, start)
    best_chosen = bytes(best_a[:ns]) if c.best >= 0 else None
    return c.best, best_chosen, int(c.nodes), not c.aborted
