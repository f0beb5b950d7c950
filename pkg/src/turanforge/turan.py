"""Exact Turan and Zarankiewicz numbers for small instances.

Branch-and-bound over edge slots in lexicographic order (add before skip).
Each added edge is checked only for forbidden copies through that edge.
Symmetry: vertex 0 has maximum degree among capped vertices and its
neighbourhood is an initial segment of the slots of row 0.

Parallel runs are deterministic: a greedy dive fixes a seed value, the tree
is cut into prefix tasks at a fixed depth, and every task is searched on its
own with the seed as its only shared bound.  The node budget limits each
prefix task separately.
"""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import _pykernels
from . import kernels
from .detect import ForbiddenFamily, is_family_free
from .graph import BipartiteGraph, Graph, from_edge_list

DEFAULT_BUDGET = 10 ** 8
SPLIT_EXTRA = 4


class InvariantError(RuntimeError):
    """A search result failed re-verification."""


@dataclass
class SearchProblem:
    nv: int
    su: list
    sv: list
    rem: list
    row0_len: int
    capped: list
    side_u: list
    bipartite: bool
    patterns: list


@dataclass
class SearchState:
    index: int
    rows: list
    chosen: bytearray
    row0_closed: bool = False


@dataclass
class SearchResult:
    value: int
    witness: Graph
    nodes_explored: int
    exhaustive: bool
    parts: tuple | None = None
    tasks: int = 1

    def to_json(self) -> dict:
        from .graph import to_graph6
        out = {
            "value": self.value,
            "exhaustive": self.exhaustive,
            "nodes_explored": self.nodes_explored,
            "witness": to_graph6(self.witness).decode() if self.witness.n else "",
        }
        if self.parts is not None:
            out["parts"] = [len(self.parts[0]), len(self.parts[1])]
        return out


def _make_problem(nv, slots, capped, side_u, bipartite, patterns) -> SearchProblem:
    su = [u for u, _ in slots]
    sv = [v for _, v in slots]
    ns = len(slots)
    rem = [[0] * nv for _ in range(ns + 1)]
    for i in range(ns - 1, -1, -1):
        rem[i] = list(rem[i + 1])
        rem[i][su[i]] += 1
        rem[i][sv[i]] += 1
    row0_len = sum(1 for u, _ in slots if u == 0)
    return SearchProblem(nv, su, sv, rem, row0_len, list(capped), list(side_u),
                         bipartite, list(patterns))


def ex_problem(n: int, fam: ForbiddenFamily) -> SearchProblem:
    slots = [(u, v) for u in range(n) for v in range(u + 1, n)]
    return _make_problem(n, slots, [True] * n, [True] * n, False, fam.search_codes())


def z_problem(m: int, n: int, fam: ForbiddenFamily) -> SearchProblem:
    nv = m + n
    slots = [(u, m + v) for u in range(m) for v in range(n)]
    capped = [i < m for i in range(nv)]
    return _make_problem(nv, slots, capped, capped, True, fam.search_codes())


def _backend(prob):
    return _pykernels if prob.nv > 64 else kernels


def _children(prob: SearchProblem, st: SearchState):
    i = st.index
    u, v = prob.su[i], prob.sv[i]
    rows = list(st.rows)
    in_row0 = i < prob.row0_len
    if in_row0:
        ok = not st.row0_closed
    else:
        d0 = rows[0].bit_count()
        ok = not ((prob.capped[u] and rows[u].bit_count() >= d0)
                  or (prob.capped[v] and rows[v].bit_count() >= d0))
    if ok and _pykernels.creates_pattern(rows, u, v, prob.patterns):
        ok = False
    if ok:
        r2 = list(rows)
        r2[u] |= 1 << v
        r2[v] |= 1 << u
        ch = bytearray(st.chosen)
        ch[i] = 1
        yield SearchState(i + 1, r2, ch, st.row0_closed)
    closed = st.row0_closed or in_row0
    yield SearchState(i + 1, rows, bytearray(st.chosen), closed)


def prefix_tasks(prob: SearchProblem, depth: int) -> list[SearchState]:
    """All feasible decision prefixes of the first ``depth`` slots, in DFS order."""
    ns = len(prob.su)
    depth = min(depth, ns)
    root = SearchState(0, [0] * prob.nv, bytearray(ns), False)
    out = []

    def rec(st):
        if st.index >= depth:
            out.append(st)
            return
        for child in _children(prob, st):
            rec(child)

    rec(root)
    return out


def _edges_of(prob, chosen) -> list:
    return [(prob.su[i], prob.sv[i]) for i, c in enumerate(chosen) if c]


def run_search(prob: SearchProblem, budget: int = DEFAULT_BUDGET, threads: int | None = None):
    """Returns ``(value, edges, nodes, exhaustive, ntasks)``."""
    k = _backend(prob)
    ns = len(prob.su)
    root = SearchState(0, [0] * prob.nv, bytearray(ns), False)
    # greedy dive: the first leaf in DFS order is reached after ns + 1 nodes
    seed, seed_chosen, nodes, _ = k.search_subtree(prob, root, 0, ns + 1)
    tasks = prefix_tasks(prob, prob.row0_len + SPLIT_EXTRA)
    per_task = max(1, budget)
    workers = resolve_threads(threads)

    def job(st):
        return k.search_subtree(prob, st, seed, per_task)

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, tasks))
    else:
        results = [job(st) for st in tasks]
    best, best_chosen = seed, seed_chosen
    exhaustive = True
    for val, ch, cnt, done in results:
        nodes += cnt
        exhaustive = exhaustive and done
        if val > best:
            best, best_chosen = val, ch
    if best_chosen is None:
        raise InvariantError("greedy dive produced no leaf")
    return best, _edges_of(prob, best_chosen), nodes, exhaustive, len(tasks)


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("TURANFORGE_THREADS")
        threads = int(env) if env else 1
    return max(1, int(threads))


def ex_exact(n: int, fam: ForbiddenFamily, budget: int = DEFAULT_BUDGET,
             threads: int | None = None) -> SearchResult:
    """ex(n, fam) with a witness graph."""
    if n < 1:
        raise ValueError("n must be >= 1")
    prob = ex_problem(n, fam)
    value, edges, nodes, exhaustive, ntasks = run_search(prob, budget, threads)
    g = from_edge_list(n, edges)
    _verify(g, value, fam)
    return SearchResult(value, g, nodes, exhaustive, None, ntasks)


def z_exact(m: int, n: int, fam: ForbiddenFamily, budget: int = DEFAULT_BUDGET,
            threads: int | None = None) -> SearchResult:
    """z(m, n, fam): vertices 0..m-1 form one side, m..m+n-1 the other."""
    if m < 1 or n < 1:
        raise ValueError("part sizes must be >= 1")
    prob = z_problem(m, n, fam)
    value, edges, nodes, exhaustive, ntasks = run_search(prob, budget, threads)
    g = from_edge_list(m + n, edges)
    _verify(g, value, fam)
    parts = (tuple(range(m)), tuple(range(m, m + n)))
    BipartiteGraph(parts[0], parts[1], g)
    return SearchResult(value, g, nodes, exhaustive, parts, ntasks)


def _verify(g: Graph, value: int, fam: ForbiddenFamily) -> None:
    if g.m != value:
        raise InvariantError(f"witness has {g.m} edges, expected {value}")
    free, w = is_family_free(g, fam)
    if not free:
        raise InvariantError(f"witness contains {w.kind.tag}")


# -- ratio tables --------------------------------------------------------------

@dataclass
class RatioRow:
    n: int
    ex: int
    ex_exhaustive: bool
    z: int
    z_exhaustive: bool
    ratio: float | None
    flag: str = ""


RATIO_HEADER = ["n", "ex", "ex_exhaustive", "z", "z_exhaustive", "ratio", "flag"]


def ratio_table(ns, fam_with_cycle: ForbiddenFamily, fam_bipartite: ForbiddenFamily,
                budget: int = DEFAULT_BUDGET, threads: int | None = None) -> list[RatioRow]:
    """Per n: ex(n, fam_with_cycle), z(ceil(n/2), floor(n/2), fam_bipartite), ratio."""
    rows = []
    for n in ns:
        ex = ex_exact(n, fam_with_cycle, budget, threads)
        a, b = (n + 1) // 2, n // 2
        if b == 0:
            zv, zex = 0, True
        else:
            zr = z_exact(a, b, fam_bipartite, budget, threads)
            zv, zex = zr.value, zr.exhaustive
        flag = ""
        if zv == 0:
            ratio, flag = None, "undefined"
        else:
            ratio = ex.value / zv
        if not (ex.exhaustive and zex):
            flag = (flag + ";" if flag else "") + "non-exhaustive"
        rows.append(RatioRow(n, ex.value, ex.exhaustive, zv, zex, ratio, flag))
    return rows


def ratio_csv(rows: list[RatioRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RATIO_HEADER)
    for r in rows:
        w.writerow([r.n, r.ex, int(r.ex_exhaustive), r.z, int(r.z_exhaustive),
                    "" if r.ratio is None else repr(r.ratio), r.flag])
    return buf.getvalue()
