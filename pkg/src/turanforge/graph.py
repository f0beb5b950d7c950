"""Immutable simple graphs with bit-packed adjacency rows.

Row ``v`` of a :class:`Graph` is a Python ``int`` whose bit ``u`` is set iff
``uv`` is an edge.  A ``numpy.uint64`` word matrix with the same content is
built lazily for the compiled kernels.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid graph input (bad endpoints, loops, malformed encodings)."""


def iter_bits(x: int) -> Iterator[int]:
    """Yield the indices of set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Instances are immutable; build new graphs with :func:`from_edge_list`,
    :meth:`Graph.from_rows` or the helpers at the bottom of this module.
    """

    __slots__ = ("_n", "_rows", "_words", "_m")

    def __init__(self, n: int, rows: Sequence[int]):
        if n < 0:
            raise GraphError("vertex count must be non-negative")
        if len(rows) != n:
            raise GraphError("need exactly one adjacency row per vertex")
        self._n = n
        self._rows = tuple(rows)
        self._words = None
        self._m = None

    @classmethod
    def from_rows(cls, rows: Sequence[int], check: bool = True) -> "Graph":
        n = len(rows)
        if check:
            full = (1 << n) - 1
            for v, r in enumerate(rows):
                if r & ~full:
                    raise GraphError(f"row {v} has bits beyond vertex {n - 1}")
                if (r >> v) & 1:
                    raise GraphError(f"loop at vertex {v}")
                for u in iter_bits(r):
                    if not (rows[u] >> v) & 1:
                        raise GraphError(f"asymmetric adjacency at ({v}, {u})")
        return cls(n, rows)

    @property
    def n(self) -> int:
        return self._n

    @property
    def rows(self) -> tuple[int, ...]:
        return self._rows

    def neighbors(self, v: int) -> list[int]:
        return list(iter_bits(self._rows[v]))

    def degree(self, v: int) -> int:
        return self._rows[v].bit_count()

    def degrees(self) -> list[int]:
        return [r.bit_count() for r in self._rows]

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._rows[u] >> v) & 1)

    @property
    def m(self) -> int:
        """Number of edges."""
        if self._m is None:
            self._m = sum(r.bit_count() for r in self._rows) // 2
        return self._m

    def edges(self) -> list[tuple[int, int]]:
        """Edges ``(u, v)`` with ``u < v`` in lexicographic order."""
        out = []
        for u, r in enumerate(self._rows):
            for v in iter_bits(r >> (u + 1)):
                out.append((u, u + 1 + v))
        return out

    @property
    def words(self) -> np.ndarray:
        """Adjacency as an ``(n, ceil(n/64))`` array of ``uint64`` words."""
        if self._words is None:
            nw = max(1, (self._n + 63) // 64)
            w = np.zeros((self._n, nw), dtype=np.uint64)
            nbytes = nw * 8
            for v, r in enumerate(self._rows):
                if r:
                    w[v] = np.frombuffer(r.to_bytes(nbytes, "little"), dtype="<u8")
            w.setflags(write=False)
            self._words = w
        return self._words

    def induced(self, vertices: Sequence[int]) -> "Graph":
        """Induced subgraph, relabelled in the order given."""
        index = {v: i for i, v in enumerate(vertices)}
        rows = []
        for v in vertices:
            r = 0
            for u in iter_bits(self._rows[v]):
                j = index.get(u)
                if j is not None:
                    r |= 1 << j
            rows.append(r)
        return Graph(len(vertices), rows)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Graph) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


@dataclass(frozen=True)
class BipartiteGraph:
    """A graph together with a bipartition ``(U, V)`` of its vertices."""

    U: tuple[int, ...]
    V: tuple[int, ...]
    graph: Graph

    def __post_init__(self):
        su, sv = set(self.U), set(self.V)
        if su & sv:
            raise GraphError("parts U and V overlap")
        if su | sv != set(range(self.graph.n)):
            raise GraphError("parts must cover every vertex")
        mu, mv = mask_of(self.U), mask_of(self.V)
        for u in self.U:
            if self.graph.rows[u] & mu:
                raise GraphError("edge inside part U")
        for v in self.V:
            if self.graph.rows[v] & mv:
                raise GraphError("edge inside part V")

    @property
    def m(self) -> int:
        return self.graph.m


@dataclass(frozen=True)
class PartLabeledGraph:
    """A graph with a labelled partition ``A_1..A_r`` of its vertex set."""

    graph: Graph
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for part in self.parts:
            if seen & set(part):
                raise GraphError("parts overlap")
            seen |= set(part)
        if seen != set(range(self.graph.n)):
            raise GraphError("parts must cover every vertex")

    def part_of(self, v: int) -> int:
        for i, part in enumerate(self.parts):
            if v in part:
                return i
        raise KeyError(v)

    def bipartite_between(self, i: int, j: int) -> BipartiteGraph:
        """The bipartite graph spanned by the edges between parts i and j."""
        verts = list(self.parts[i]) + list(self.parts[j])
        h = self.graph.induced(verts)
        a = len(self.parts[i])
        mask_a = (1 << a) - 1
        rows = []
        for k, r in enumerate(h.rows):
            rows.append(r & ~mask_a if k < a else r & mask_a)
        return BipartiteGraph(
            tuple(range(a)), tuple(range(a, len(verts))), Graph(len(verts), rows)
        )


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph from unordered pairs; duplicate pairs collapse."""
    if n < 0:
        raise GraphError("vertex count must be non-negative")
    rows = [0] * n
    for e in edges:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError(f"endpoint out of range in edge ({u}, {v}) for n={n}")
        if u == v:
            raise GraphError(f"loop at vertex {u}")
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, rows)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, [full & ~(1 << v) for v in range(n)])


def complete_bipartite(a: int, b: int) -> Graph:
    mask_a = (1 << a) - 1
    mask_b = ((1 << b) - 1) << a
    return Graph(a + b, [mask_b] * a + [mask_a] * b)


def cycle_graph(n: int) -> Graph:
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return from_edge_list(10, outer + spokes + inner)


def _check_pair_sets(X: Sequence[int], Y: Sequence[int]) -> None:
    if not X or not Y:
        raise GraphError("vertex sets must be nonempty")
    if set(X) & set(Y):
        raise GraphError("vertex sets must be disjoint")


def edges_between(g: Graph, X: Iterable[int], Y: Iterable[int] | int) -> int:
    """Number of edges with one end in X and the other in Y (X, Y disjoint)."""
    my = Y if isinstance(Y, int) else mask_of(Y)
    rows = g.rows
    return sum((rows[x] & my).bit_count() for x in X)


def pair_density(g: Graph, X: Sequence[int], Y: Sequence[int]) -> Fraction:
    """Exact density ``e(X,Y) / (|X||Y|)`` of a pair of disjoint sets."""
    _check_pair_sets(X, Y)
    return Fraction(edges_between(g, X, Y), len(set(X)) * len(set(Y)))


def codegree(g: Graph, u: int, v: int) -> int:
    if u == v:
        raise GraphError("codegree needs two distinct vertices")
    return (g.rows[u] & g.rows[v]).bit_count()


# -- graph6 -----------------------------------------------------------------

def _encode_n(n: int) -> bytes:
    if n < 63:
        return bytes([n + 63])
    if n < 258048:
        return bytes([126] + [((n >> s) & 63) + 63 for s in (12, 6, 0)])
    if n < 1 << 36:
        return bytes([126, 126] + [((n >> s) & 63) + 63 for s in (30, 24, 18, 12, 6, 0)])
    raise GraphError("graph too large for graph6")


def to_graph6(g: Graph) -> bytes:
    """Standard graph6 encoding (no header, no trailing newline)."""
    n = g.n
    if n < 1:
        raise GraphError("graph6 needs at least one vertex")
    out = bytearray(_encode_n(n))
    rows = g.rows
    acc = 0
    nbits = 0
    for j in range(1, n):
        rj = rows[j]
        for i in range(j):
            acc = (acc << 1) | ((rj >> i) & 1)
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc = 0
                nbits = 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out)


def from_graph6(data: bytes | str) -> Graph:
    if isinstance(data, str):
        data = data.encode("ascii")
    data = data.strip()
    if data.startswith(b">>graph6<<"):
        data = data[10:]
    if not data:
        raise GraphError("empty graph6 string")
    if any(c < 63 or c > 126 for c in data):
        raise GraphError("graph6 byte out of range")
    vals = [c - 63 for c in data]
    if vals[0] < 63:
        n, pos = vals[0], 1
    elif len(vals) >= 4 and vals[1] < 63:
        n = (vals[1] << 12) | (vals[2] << 6) | vals[3]
        pos = 4
    elif len(vals) >= 8 and vals[1] == 63:
        n = 0
        for x in vals[2:8]:
            n = (n << 6) | x
        pos = 8
    else:
        raise GraphError("truncated graph6 size field")
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    body = vals[pos:]
    if len(body) != need:
        raise GraphError(f"graph6 body has {len(body)} bytes, expected {need}")
    rows = [0] * n
    k = 0
    for j in range(1, n):
        for i in range(j):
            if (body[k // 6] >> (5 - k % 6)) & 1:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
            k += 1
    if nbits % 6 and body[-1] & ((1 << (6 - nbits % 6)) - 1):
        raise GraphError("nonzero padding bits in graph6 body")
    return Graph(n, rows)


# -- plain edge list --------------------------------------------------------

def to_edgelist(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def from_edgelist(text: str) -> Graph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not lines or len(lines[0]) != 2:
        raise GraphError("edge list must start with 'n m'")
    n, m = int(lines[0][0]), int(lines[0][1])
    body = lines[1:]
    if len(body) != m:
        raise GraphError(f"edge list declares {m} edges but has {len(body)}")
    edges = []
    for parts in body:
        if len(parts) != 2:
            raise GraphError(f"bad edge line {' '.join(parts)!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return from_edge_list(n, edges)


def read_graph(path: str) -> Graph:
    """Read a graph file; graph6 for ``.g6`` or graph6-looking content."""
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("ascii", errors="strict").strip()
    first = text.split("\n", 1)[0].strip()
    if path.endswith(".g6") or (len(first.split()) == 1 and not first.isdigit()):
        return from_graph6(first)
    return from_edgelist(text)


def write_graph(g: Graph, path: str | None, fmt: str = "graph6") -> str:
    if fmt == "graph6":
        text = to_graph6(g).decode("ascii") + "\n"
    elif fmt == "edgelist":
        text = to_edgelist(g)
    else:
        raise ValueError(f"unknown graph format {fmt!r}")
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return text
