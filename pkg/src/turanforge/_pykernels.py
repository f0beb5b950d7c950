"""Pure-Python implementations of the hot kernels.

Every function here has a twin in ``_ckernels.pyx`` with identical results
(including node counts of the subtree search); the test-suite compares the
two on random inputs.  Adjacency rows are Python ints used as bitsets.
"""
from __future__ import annotations

import sys

from .graph import Graph, iter_bits

TRI, CYC, KST, BOOK = 0, 1, 2, 3


def triangles_per_vertex(g: Graph) -> list[int]:
    """Number of triangles through each vertex, i.e. e(G[N(v)])."""
    rows = g.rows
    out = [0] * g.n
    for v, rv in enumerate(rows):
        s = 0
        for u in iter_bits(rv):
            s += (rows[u] & rv).bit_count()
        out[v] = s // 2
    return out


def c4_count(g: Graph) -> int:
    rows = g.rows
    total = 0
    for u in range(g.n):
        ru = rows[u]
        for v in range(u + 1, g.n):
            c = (ru & rows[v]).bit_count()
            total += c * (c - 1) // 2
    return total // 2


def c4_count_within(g: Graph, vertices) -> int:
    """Sum of C(codegree(u, v), 2) over pairs u < v of ``vertices``."""
    rows = g.rows
    vs = sorted(vertices)
    total = 0
    for i, u in enumerate(vs):
        ru = rows[u]
        for v in vs[i + 1:]:
            c = (ru & rows[v]).bit_count()
            total += c * (c - 1) // 2
    return total


def first_pair_codegree(g: Graph, t: int, vertices=None):
    """Lexicographically least pair u < v with at least t common neighbours."""
    rows = g.rows
    vs = range(g.n) if vertices is None else sorted(vertices)
    vs = list(vs)
    for i, u in enumerate(vs):
        ru = rows[u]
        if ru.bit_count() < t:
            continue
        for v in vs[i + 1:]:
            if (ru & rows[v]).bit_count() >= t:
                return u, v
    return None


# -- row-level pattern tests (shared with detect) ----------------------------

def cycle_path(rows, start: int, target: int, steps: int, visited: int):
    """A simple path start -> target with exactly ``steps`` edges avoiding
    ``visited`` in its interior, as a vertex list, or None."""
    if steps == 1:
        return [start, target] if (rows[start] >> target) & 1 else None
    for w in iter_bits(rows[start] & ~visited):
        rest = cycle_path(rows, w, target, steps - 1, visited | (1 << w))
        if rest is not None:
            return [start] + rest
    return None


def _has_cycle_path(rows, start, target, steps, visited) -> bool:
    if steps == 1:
        return bool((rows[start] >> target) & 1)
    cand = rows[start] & ~visited
    while cand:
        low = cand & -cand
        w = low.bit_length() - 1
        cand ^= low
        if _has_cycle_path(rows, w, target, steps - 1, visited | low):
            return True
    return False


def kst_sides(rows, a: int, b: int, s: int, t: int):
    """K_{s,t} using edge ab with a on the s-side; returns (S, T) or None."""

    def rec(cands, common, chosen, need):
        if common.bit_count() < t - 1:
            return None
        if need == 0:
            return chosen
        while cands:
            low = cands & -cands
            x = low.bit_length() - 1
            cands ^= low
            r = rec(cands, common & rows[x], chosen + [x], need - 1)
            if r is not None:
                return r
        return None

    common0 = rows[a] & ~(1 << b)
    chosen = rec(rows[b] & ~(1 << a), common0, [], s - 1)
    if chosen is None:
        return None
    common = common0
    for x in chosen:
        common &= rows[x]
    T = [b] + list(iter_bits(common))[: t - 1]
    return [a] + chosen, T


def _kst_exists(rows, a, b, s, t) -> bool:
    def rec(cands, common, need):
        if common.bit_count() < t - 1:
            return False
        if need == 0:
            return True
        while cands:
            low = cands & -cands
            x = low.bit_length() - 1
            cands ^= low
            if rec(cands, common & rows[x], need - 1):
                return True
        return False

    return rec(rows[b] & ~(1 << a), rows[a] & ~(1 << b), s - 1)


def book_pages(rows, x: int, y: int, t: int):
    """t disjoint pages on spine xy as [(a1, b1), ...] or None.

    A page is an edge a-b with a in N(y), b in N(x), all page vertices
    distinct and different from x, y.
    """
    spine = (1 << x) | (1 << y)
    A = rows[y] & ~spine
    B = rows[x] & ~spine

    def rec(avail, need):
        if need == 0:
            return []
        if avail.bit_count() < 2 * need:
            return None
        low = avail & -avail
        w = low.bit_length() - 1
        rest = avail ^ low
        partners = 0
        if A & low:
            partners |= B
        if B & low:
            partners |= A
        partners &= rows[w] & rest
        while partners:
            plow = partners & -partners
            p = plow.bit_length() - 1
            partners ^= plow
            r = rec(rest & ~plow, need - 1)
            if r is not None:
                a, b = (w, p) if (A & low and (B >> p) & 1) else (p, w)
                return [(a, b)] + r
        return rec(rest, need)

    return rec(A | B, t)


def _book_exists(rows, x, y, t) -> bool:
    spine = (1 << x) | (1 << y)
    A = rows[y] & ~spine
    B = rows[x] & ~spine

    def rec(avail, need):
        if need == 0:
            return True
        if avail.bit_count() < 2 * need:
            return False
        low = avail & -avail
        w = low.bit_length() - 1
        rest = avail ^ low
        partners = 0
        if A & low:
            partners |= B
        if B & low:
            partners |= A
        partners &= rows[w] & rest
        while partners:
            plow = partners & -partners
            partners ^= plow
            if rec(rest & ~plow, need - 1):
                return True
        return rec(rest, need)

    return rec(A | B, t)


def creates_pattern(rows, u: int, v: int, patterns) -> bool:
    """Would adding edge uv to ``rows`` (uv absent) create a listed pattern?

    Every copy created by the new edge contains it, so only copies through
    uv are examined.
    """
    bu, bv = 1 << u, 1 << v
    for kind, a, b in patterns:
        if kind == TRI:
            if rows[u] & rows[v]:
                return True
        elif kind == CYC:
            if _has_cycle_path(rows, v, u, a - 1, bu | bv):
                return True
    need_added = any(k in (KST, BOOK) for k, _, _ in patterns)
    if not need_added:
        return False
    rows[u] |= bv
    rows[v] |= bu
    try:
        for kind, a, b in patterns:
            if kind == KST:
                if _kst_exists(rows, u, v, a, b) or _kst_exists(rows, v, u, a, b):
                    return True
            elif kind == BOOK:
                M = bu | bv | rows[u] | rows[v]
                for x in iter_bits(M):
                    for y in iter_bits(rows[x]):
                        if y < x and (M >> y) & 1:
                            continue
                        if _book_exists(rows, x, y, a):
                            return True
        return False
    finally:
        rows[u] &= ~bv
        rows[v] &= ~bu


# -- branch-and-bound subtree search ----------------------------------------

def search_subtree(prob, state, seed: int, budget: int):
    """Exhaust the subtree below ``state``.

    ``prob`` is a :class:`turanforge.turan.SearchProblem`; ``state`` a
    :class:`turanforge.turan.SearchState`.  Returns
    ``(best_value, best_chosen, nodes, completed)`` where ``best_value`` is -1
    when no leaf with value >= ``seed`` exists in the subtree.
    """
    su, sv = prob.su, prob.sv
    ns = len(su)
    nv = prob.nv
    rem = prob.rem
    row0_len = prob.row0_len
    capped = prob.capped
    side_u = prob.side_u
    bip = prob.bipartite
    patterns = prob.patterns

    rows = list(state.rows)
    chosen = bytearray(state.chosen)
    deg = [r.bit_count() for r in rows]
    cur = sum(deg) // 2
    closed = state.row0_closed

    best = -1
    best_chosen = None
    nodes = 0
    aborted = False

    def upper_bound(i):
        remi = rem[i]
        if i < row0_len and not closed:
            dmax = deg[0] + remi[0]
        else:
            dmax = deg[0]
        ub = cur + ns - i
        if bip:
            s_u = 0
            s_v = 0
            for w in range(nv):
                x = deg[w] + remi[w]
                if side_u[w]:
                    s_u += dmax if x > dmax else x
                else:
                    s_v += x
            if s_u < ub:
                ub = s_u
            if s_v < ub:
                ub = s_v
        else:
            s = 0
            for w in range(nv):
                x = deg[w] + remi[w]
                if capped[w] and x > dmax:
                    x = dmax
                s += x
            if s // 2 < ub:
                ub = s // 2
        return ub

    def rec(i):
        nonlocal nodes, aborted, best, best_chosen, cur, closed
        nodes += 1
        if nodes > budget:
            aborted = True
            return
        ub = upper_bound(i)
        if ub < seed or ub <= best:
            return
        if i == ns:
            best = cur
            best_chosen = bytes(chosen)
            return
        u, v = su[i], sv[i]
        in_row0 = i < row0_len
        ok = True
        if in_row0:
            ok = not closed
        else:
            d0 = deg[0]
            if (capped[u] and deg[u] >= d0) or (capped[v] and deg[v] >= d0):
                ok = False
        if ok and creates_pattern(rows, u, v, patterns):
            ok = False
        if ok:
            rows[u] |= 1 << v
            rows[v] |= 1 << u
            deg[u] += 1
            deg[v] += 1
            cur += 1
            chosen[i] = 1
            rec(i + 1)
            chosen[i] = 0
            cur -= 1
            deg[u] -= 1
            deg[v] -= 1
            rows[u] &= ~(1 << v)
            rows[v] &= ~(1 << u)
            if aborted:
                return
        if in_row0 and not closed:
            closed = True
            rec(i + 1)
            closed = False
        else:
            rec(i + 1)

    limit = sys.getrecursionlimit()
    if limit < ns + 200:
        sys.setrecursionlimit(ns + 200)
    rec(state.index)
    return best, best_chosen, nodes, not aborted
