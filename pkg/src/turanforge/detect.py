"""Forbidden-subgraph detectors and counters.

Detectors return a :class:`Witness` (or None) and stop at the first hit;
scans run in lexicographic vertex order so the reported witness is the least
one in that order.  Counters never short-circuit.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Union

from . import _pykernels as pk
from . import kernels
from .graph import BipartiteGraph, Graph, iter_bits

INFINITE = math.inf


class PatternError(ValueError):
    pass


# -- pattern tags -------------------------------------------------------------

@dataclass(frozen=True)
class Triangle:
    @property
    def tag(self) -> str:
        return "triangle"


@dataclass(frozen=True)
class Cycle:
    k: int

    def __post_init__(self):
        if self.k < 3:
            raise PatternError("cycle length must be >= 3")

    @property
    def tag(self) -> str:
        return f"c{self.k}"


@dataclass(frozen=True)
class OddCycle:
    """All odd cycles of length 3..k."""

    k: int

    def __post_init__(self):
        if self.k < 3:
            raise PatternError("cycle length must be >= 3")

    @property
    def tag(self) -> str:
        return f"oddc{self.k}"


@dataclass(frozen=True)
class CompleteBipartite:
    s: int
    t: int

    def __post_init__(self):
        if not 1 <= self.s <= self.t:
            raise PatternError("need 1 <= s <= t for K_{s,t}")

    @property
    def tag(self) -> str:
        return f"k{{{self.s},{self.t}}}"


@dataclass(frozen=True)
class Book:
    t: int

    def __post_init__(self):
        if self.t < 1:
            raise PatternError("book size must be >= 1")

    @property
    def tag(self) -> str:
        return f"b{self.t}"


Pattern = Union[Triangle, Cycle, OddCycle, CompleteBipartite, Book]

_TOKEN = re.compile(
    r"^(?:(?P<tri>triangle|k3)|oddc(?P<odd>\d+)|c(?P<cyc>\d+)"
    r"|k\{(?P<s>\d+),(?P<t>\d+)\}|b(?P<book>\d+))$"
)


def parse_pattern(token: str) -> Pattern:
    tok = token.strip().lower().replace(" ", "")
    m = _TOKEN.match(tok)
    if not m:
        raise PatternError(f"unknown pattern {token!r}")
    if m["tri"]:
        return Triangle()
    if m["odd"]:
        return OddCycle(int(m["odd"]))
    if m["cyc"]:
        k = int(m["cyc"])
        return Triangle() if k == 3 else Cycle(k)
    if m["s"]:
        s, t = int(m["s"]), int(m["t"])
        return CompleteBipartite(min(s, t), max(s, t))
    return Book(int(m["book"]))


@dataclass(frozen=True)
class ForbiddenFamily:
    patterns: tuple = ()

    @classmethod
    def parse(cls, text: str) -> "ForbiddenFamily":
        """Parse tokens such as ``"triangle,c5,k{2,3},b3,oddc7"``.

        Commas inside braces belong to the K_{s,t} token.
        """
        tokens = re.findall(r"k\{[^}]*\}|[^,]+", text.replace(" ", ""))
        return cls(tuple(parse_pattern(t) for t in tokens if t))

    @classmethod
    def of(cls, *patterns: Pattern) -> "ForbiddenFamily":
        return cls(tuple(patterns))

    def __str__(self) -> str:
        return ",".join(p.tag for p in self.patterns)

    def with_pattern(self, p: Pattern) -> "ForbiddenFamily":
        return ForbiddenFamily(self.patterns + (p,))

    def search_codes(self) -> list[tuple[int, int, int]]:
        """Pattern codes for the incremental checks of the exact search."""
        codes = []
        for p in self.patterns:
            if isinstance(p, Triangle):
                codes.append((pk.TRI, 0, 0))
            elif isinstance(p, Cycle):
                codes.append((pk.TRI, 0, 0) if p.k == 3 else (pk.CYC, p.k, 0))
            elif isinstance(p, OddCycle):
                codes.append((pk.TRI, 0, 0))
                codes.extend((pk.CYC, k, 0) for k in range(5, p.k + 1, 2))
            elif isinstance(p, CompleteBipartite):
                codes.append((pk.KST, p.s, p.t))
            elif isinstance(p, Book):
                codes.append((pk.BOOK, p.t, 0))
        out = []
        for c in codes:
            if c not in out:
                out.append(c)
        return out


# -- witnesses ----------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """A copy of ``kind`` in a host graph.

    Vertex layout: cycles list the cycle in order; K_{s,t} lists the s-side
    then the t-side; a book lists the spine x, y followed by the pages
    a1, b1, a2, b2, ... with a_i adjacent to y and b_i adjacent to x.
    """

    kind: Pattern
    vertices: tuple = field(default_factory=tuple)

    def validate(self, g: Graph) -> bool:
        vs = list(self.vertices)
        if len(set(vs)) != len(vs) or any(not 0 <= v < g.n for v in vs):
            return False
        kind = self.kind
        if isinstance(kind, (Triangle, Cycle, OddCycle)):
            if isinstance(kind, Triangle):
                ok_len = len(vs) == 3
            elif isinstance(kind, Cycle):
                ok_len = len(vs) == kind.k
            else:
                ok_len = len(vs) % 2 == 1 and 3 <= len(vs) <= kind.k
            if not ok_len:
                return False
            return all(g.has_edge(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))
        if isinstance(kind, CompleteBipartite):
            if len(vs) != kind.s + kind.t:
                return False
            S, T = vs[: kind.s], vs[kind.s:]
            return all(g.has_edge(a, b) for a in S for b in T)
        if isinstance(kind, Book):
            if len(vs) != 2 + 2 * kind.t:
                return False
            x, y = vs[0], vs[1]
            if not g.has_edge(x, y):
                return False
            for i in range(kind.t):
                a, b = vs[2 + 2 * i], vs[3 + 2 * i]
                if not (g.has_edge(a, y) and g.has_edge(b, x) and g.has_edge(a, b)):
                    return False
            return True
        return False

    def to_json(self) -> dict:
        return {"kind": self.kind.tag, "vertices": list(self.vertices)}


# -- triangles ----------------------------------------------------------------

def has_triangle(g: Graph) -> Witness | None:
    rows = g.rows
    for u in range(g.n):
        ru = rows[u]
        for v in iter_bits(ru >> (u + 1)):
            v += u + 1
            common = (ru & rows[v]) >> (v + 1)
            if common:
                w = (common & -common).bit_length() - 1 + v + 1
                return Witness(Triangle(), (u, v, w))
    return None


def count_triangles(g: Graph) -> int:
    return sum(kernels.triangles_per_vertex(g)) // 3


def triangles_through(g: Graph, v: int) -> int:
    """Number of triangles containing ``v``, i.e. e(G[N(v)])."""
    rows = g.rows
    rv = rows[v]
    return sum((rows[u] & rv).bit_count() for u in iter_bits(rv)) // 2


# -- cycles -------------------------------------------------------------------

def girth(g: Graph):
    """Length of a shortest cycle, or ``INFINITE`` for forests."""
    best = INFINITE
    rows = g.rows
    for r in range(g.n):
        dist = {r: 0}
        parent = {r: -1}
        dq = deque([r])
        while dq:
            x = dq.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in iter_bits(rows[x]):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    dq.append(y)
                elif parent[x] != y:
                    best = min(best, dist[x] + dist[y] + 1)
    return best


def odd_girth(g: Graph):
    """Length of a shortest odd cycle, or ``INFINITE`` if bipartite.

    The shortest odd closed walk through a vertex r is found from one BFS;
    its minimum over all r is the odd girth.
    """
    best = INFINITE
    rows = g.rows
    for r in range(g.n):
        dist = {r: 0}
        dq = deque([r])
        while dq:
            x = dq.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in iter_bits(rows[x]):
                if y not in dist:
                    dist[y] = dist[x] + 1
                    dq.append(y)
                elif dist[y] == dist[x]:
                    best = min(best, 2 * dist[x] + 1)
    return best


def _bfs_dist(rows, src: int, allowed: int) -> dict:
    dist = {src: 0}
    dq = deque([src])
    while dq:
        x = dq.popleft()
        for y in iter_bits(rows[x] & allowed):
            if y not in dist:
                dist[y] = dist[x] + 1
                dq.append(y)
    return dist


def has_cycle_length(g: Graph, k: int) -> Witness | None:
    """A cycle of length exactly ``k`` (least start vertex first), or None.

    Depth-first search from each start vertex s over vertices > s, pruned by
    BFS distance back to the closing neighbour.
    """
    if k < 3:
        raise PatternError("cycle length must be >= 3")
    if k == 3:
        w = has_triangle(g)
        return Witness(Cycle(3), w.vertices) if w else None
    rows = g.rows
    full = (1 << g.n) - 1
    for s in range(g.n):
        allowed = full & ~((1 << (s + 1)) - 1)
        for t in iter_bits(rows[s] & allowed):
            # path s -> ... -> t of k-1 edges through vertices > s
            dist = _bfs_dist(rows, t, allowed)
            path = [s]

            def dfs(x, steps, visited):
                if steps == 1:
                    return bool((rows[x] >> t) & 1)
                for y in iter_bits(rows[x] & allowed & ~visited):
                    d = dist.get(y)
                    if d is None or d > steps - 1 or y == t:
                        continue
                    path.append(y)
                    if dfs(y, steps - 1, visited | (1 << y)):
                        return True
                    path.pop()
                return False

            if dfs(s, k - 1, (1 << s) | (1 << t)):
                return Witness(Cycle(k), tuple(path + [t]))
    return None


# -- complete bipartite and books ---------------------------------------------

def has_kst(g: Graph, s: int, t: int, allow_large: bool = False) -> Witness | None:
    """A copy of K_{s,t}: an s-set with >= t common neighbours outside it.

    The s-set is the lexicographically least such set.  ``s > 3`` requires
    ``allow_large``.
    """
    if not 1 <= s <= t:
        raise PatternError("need 1 <= s <= t")
    if s > 3 and not allow_large:
        raise PatternError("s > 3 needs allow_large=True")
    rows = g.rows
    kind = CompleteBipartite(s, t)
    if s == 1:
        for v in range(g.n):
            if rows[v].bit_count() >= t:
                return Witness(kind, (v,) + tuple(list(iter_bits(rows[v]))[:t]))
        return None
    if s == 2:
        pair = kernels.first_pair_codegree(g, t)
        if pair is None:
            return None
        u, v = pair
        common = list(iter_bits(rows[u] & rows[v]))[:t]
        return Witness(kind, (u, v) + tuple(common))

    def rec(chosen, common, start):
        if common.bit_count() < t:
            return None
        if len(chosen) == s:
            return chosen, common
        for w in range(start, g.n):
            if rows[w].bit_count() < t:
                continue
            r = rec(chosen + [w], common & rows[w], w + 1)
            if r is not None:
                return r
        return None

    # s-sets never contain their common neighbours, so no exclusion is needed
    found = rec([], (1 << g.n) - 1, 0)
    if found is None:
        return None
    S, common = found
    return Witness(kind, tuple(S) + tuple(list(iter_bits(common))[:t]))


def has_book(g: Graph, t: int) -> Witness | None:
    """A book B_t: spine xy plus t vertex-disjoint pages a_i b_i."""
    if t < 1:
        raise PatternError("book size must be >= 1")
    rows = g.rows
    for x, y in g.edges():
        if rows[x].bit_count() <= t or rows[y].bit_count() <= t:
            continue
        pages = pk.book_pages(rows, x, y, t)
        if pages is not None:
            flat = tuple(v for page in pages for v in page)
            return Witness(Book(t), (x, y) + flat)
    return None


# -- 4-cycles -----------------------------------------------------------------

def count_c4(g: Graph) -> int:
    return kernels.c4_count(g)


def count_c4_bipartite(b: BipartiteGraph, side: str = "U") -> int:
    """Sum of C(codegree, 2) over pairs inside one part."""
    part = b.U if side == "U" else b.V
    return kernels.c4_count_within(b.graph, part)


# -- families -----------------------------------------------------------------

def find_pattern(g: Graph, p: Pattern) -> Witness | None:
    if isinstance(p, Triangle):
        return has_triangle(g)
    if isinstance(p, Cycle):
        return has_cycle_length(g, p.k)
    if isinstance(p, OddCycle):
        og = odd_girth(g)
        if og > p.k:
            return None
        w = has_cycle_length(g, int(og))
        return Witness(p, w.vertices)
    if isinstance(p, CompleteBipartite):
        return has_kst(g, p.s, p.t, allow_large=True)
    if isinstance(p, Book):
        return has_book(g, p.t)
    raise PatternError(f"unsupported pattern {p!r}")


def is_family_free(g: Graph, fam: ForbiddenFamily) -> tuple[bool, Witness | None]:
    """``(True, None)`` if no pattern occurs, else ``(False, witness)``."""
    for p in fam.patterns:
        w = find_pattern(g, p)
        if w is not None:
            if not w.validate(g):
                raise AssertionError(f"witness for {p.tag} failed validation")
            return False, w
    return True, None
