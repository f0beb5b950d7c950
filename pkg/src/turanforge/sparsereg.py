"""Energies, (eps, p)-regularity witnesses, refinement and cluster graphs.

Energy sums run over ordered pairs of distinct non-exceptional parts.  With
``exact=True`` (the default for n <= 200) every quantity is a
:class:`fractions.Fraction`; float inputs are converted through their decimal
``repr`` so that ``0.2`` means exactly 1/5.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Sequence

import numpy as np

from .graph import Graph, mask_of

EXACT_MAX_N = 200
FLOAT_TOL = 1e-12


class PartitionError(ValueError):
    pass


class ExceptionalOverflow(RuntimeError):
    """Refinement would push the exceptional set beyond eps * n."""


class InvariantError(AssertionError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(repr(float(x)))


def _num(x, exact: bool):
    return as_fraction(x) if exact else float(x)


# -- partitions ---------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    exceptional: tuple
    parts: tuple
    epsilon: object = Fraction(1, 4)
    p: object = 1

    @classmethod
    def make(cls, parts, exceptional=(), epsilon=Fraction(1, 4), p=1) -> "Partition":
        return cls(tuple(sorted(exceptional)), tuple(tuple(sorted(x)) for x in parts), epsilon, p)

    @property
    def k(self) -> int:
        return len(self.parts)

    @property
    def n(self) -> int:
        return len(self.exceptional) + sum(len(x) for x in self.parts)

    def validate(self, n: int, equitable: bool = False) -> None:
        seen: set = set(self.exceptional)
        if len(seen) != len(self.exceptional):
            raise PartitionError("repeated vertex in exceptional set")
        for part in self.parts:
            if not part:
                raise PartitionError("empty part")
            s = set(part)
            if len(s) != len(part) or seen & s:
                raise PartitionError("parts overlap")
            seen |= s
        if seen != set(range(n)):
            raise PartitionError("partition does not cover the vertex set")
        if equitable:
            if len({len(x) for x in self.parts}) > 1:
                raise PartitionError("parts have unequal sizes")
            if len(self.exceptional) > as_fraction(self.epsilon) * n:
                raise PartitionError("exceptional set exceeds eps * n")

    def with_singletons(self) -> "Partition":
        """Exceptional vertices turned into singleton parts."""
        return Partition((), self.parts + tuple((v,) for v in self.exceptional),
                         self.epsilon, self.p)

    def to_json(self) -> dict:
        return {"exceptional": list(self.exceptional),
                "parts": {str(i + 1): list(x) for i, x in enumerate(self.parts)}}


def equitable_partition(n: int, eps, order: Sequence[int] | None = None,
                        p=1) -> Partition:
    """Smallest k >= ceil(1/eps) with n mod k <= eps*n; contiguous parts.

    ``order`` permutes the vertices first; the last ``n mod k`` vertices of
    the order form the exceptional set.
    """
    e = as_fraction(eps)
    k = ceil(1 / e)
    if n < k:
        raise PartitionError(f"need at least {k} vertices, got {n}")
    while n % k > e * n:
        k += 1
    vs = list(range(n)) if order is None else list(order)
    size = n // k
    parts = [vs[i * size:(i + 1) * size] for i in range(k)]
    return Partition.make(parts, vs[k * size:], eps, p)


def _part_index(P: Partition, n: int) -> np.ndarray:
    idx = np.full(n, -1, dtype=np.int64)
    for i, part in enumerate(P.parts):
        idx[list(part)] = i
    return idx


def edge_matrix(g: Graph, P: Partition) -> np.ndarray:
    """``E[i, j]`` = number of edges between parts i and j (i != j)."""
    k = P.k
    idx = _part_index(P, g.n)
    E = np.zeros((k, k), dtype=np.int64)
    edges = g.edges()
    if edges:
        a = idx[np.fromiter((u for u, _ in edges), dtype=np.int64, count=len(edges))]
        b = idx[np.fromiter((v for _, v in edges), dtype=np.int64, count=len(edges))]
        keep = (a >= 0) & (b >= 0) & (a != b)
        np.add.at(E, (a[keep], b[keep]), 1)
        np.add.at(E, (b[keep], a[keep]), 1)
    return E


def _resolve_exact(g: Graph, exact):
    return g.n <= EXACT_MAX_N if exact is None else bool(exact)


def _pair_terms(g: Graph, P: Partition, exact: bool):
    """Yield (weight |X||Y|/n^2, density d) over ordered pairs of distinct parts."""
    n = g.n
    E = edge_matrix(g, P)
    sizes = [len(x) for x in P.parts]
    for i in range(P.k):
        for j in range(P.k):
            if i == j:
                continue
            e = int(E[i, j])
            if exact:
                w = Fraction(sizes[i] * sizes[j], n * n)
                d = Fraction(e, sizes[i] * sizes[j])
            else:
                w = sizes[i] * sizes[j] / (n * n)
                d = e / (sizes[i] * sizes[j])
            yield w, d


def energy(g: Graph, P: Partition, exact=None):
    """Sum over ordered pairs of distinct parts of (|X||Y|/n^2) d(X,Y)^2."""
    P.validate(g.n)
    ex = _resolve_exact(g, exact)
    total = Fraction(0) if ex else 0.0
    for w, d in _pair_terms(g, P, ex):
        total += w * d * d
    return total


def energy_p(g: Graph, P: Partition, exact=None):
    """Energy with d replaced by d/p; equals energy / p^2."""
    ex = _resolve_exact(g, exact)
    p = _num(P.p, ex)
    if p <= 0:
        raise ValueError("p must be positive")
    return energy(g, P, ex) / (p * p)


def phi(x, L):
    """x^2 for x <= 2L, 4L(x - L) beyond: convex, tangent at 2L."""
    return x * x if x <= 2 * L else 4 * L * (x - L)


def phi_literal(x, L):
    """The pointwise min(x^2, 4L(x - L)), reported for comparison only."""
    return min(x * x, 4 * L * (x - L))


def _capped(g: Graph, P: Partition, L, exact, fn):
    ex = _resolve_exact(g, exact)
    L = _num(L, ex)
    if L < 1:
        raise ValueError("cap L must be >= 1")
    p = _num(P.p, ex)
    if p <= 0:
        raise ValueError("p must be positive")
    total = Fraction(0) if ex else 0.0
    for w, d in _pair_terms(g, P, ex):
        total += w * fn(d / p, L)
    return total, ex, L, p


def capped_energy(g: Graph, P: Partition, L, exact=None):
    """Energy with d_p^2 replaced by phi_L(d_p).

    Checks ``capped <= energy_p`` and ``capped <= 8 L e(G) / (p n^2)`` on
    every call.
    """
    P.validate(g.n)
    total, ex, L, p = _capped(g, P, L, exact, phi)
    ep = energy(g, P, ex) / (p * p)
    bound = 8 * L * g.m / (p * g.n * g.n) if g.n else 0
    tol = 0 if ex else FLOAT_TOL * max(1.0, abs(float(ep)), abs(float(bound)))
    if total > ep + tol or total > bound + tol:
        raise InvariantError("capped energy exceeds energy_p or 8LC")
    return total


def capped_energy_diagnostics(g: Graph, P: Partition, L, exact=None) -> dict:
    """Both readings of the cap, energy_p, the 8LC bound and C*L^2."""
    P.validate(g.n)
    ex = _resolve_exact(g, exact)
    piece = capped_energy(g, P, L, ex)
    literal, _, Lv, p = _capped(g, P, L, ex, phi_literal)
    C = g.m / (p * g.n * g.n) if ex is False else Fraction(g.m) / (p * g.n * g.n)
    return {
        "piecewise": float(piece),
        "literal_min": float(literal),
        "energy_p": float(energy(g, P, ex) / (p * p)),
        "bound_8LC": float(8 * Lv * C),
        "CL2": float(C * Lv * Lv),
    }


# -- pair classification --------------------------------------------------------

REGULAR = "regular"          # regular up to the search budget
IRREGULAR = "irregular"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class PairStatus:
    d_p: object
    status: str
    wx: tuple = ()
    wy: tuple = ()


@dataclass
class PairClassification:
    """Status per unordered part pair ``(i, j)``, ``i < j`` (0-based)."""

    pairs: dict = field(default_factory=dict)

    def irregular(self) -> list:
        return [key for key, st in sorted(self.pairs.items()) if st.status == IRREGULAR]

    def to_json(self) -> list:
        return [{"i": i + 1, "j": j + 1, "d_p": float(st.d_p), "status": st.status}
                for (i, j), st in sorted(self.pairs.items())]


def _edges_between(rows, X, maskY: int) -> int:
    return sum((rows[x] & maskY).bit_count() for x in X)


def _deviates(e_sub, nx, ny, e_all, NX, NY, thr: Fraction) -> bool:
    # |e_sub/(nx ny) - e_all/(NX NY)| > thr, cleared of denominators
    lhs = abs(e_sub * NX * NY - e_all * nx * ny)
    return lhs > thr * (nx * ny * NX * NY)


def witness_irregular(g: Graph, X: Sequence[int], Y: Sequence[int], eps, p,
                      budget: int = 200, seed=0, stream: Sequence[int] = ()) -> PairStatus:
    """Search for X' in X, Y' in Y with |X'| >= eps|X|, |Y'| >= eps|Y| and
    |d_p(X', Y') - d_p(X, Y)| > eps.

    Deterministic candidates come first (degree splits, then alternating
    top/bottom refinement); then ``budget`` random pairs of minimum admissible
    size drawn from ``numpy.random.default_rng([seed, *stream])``.  A verdict
    of ``regular`` means regular up to this budget.
    """
    X = sorted(X)
    Y = sorted(Y)
    if not X or not Y or set(X) & set(Y):
        raise PartitionError("X and Y must be nonempty and disjoint")
    e_ = as_fraction(eps)
    p_ = as_fraction(p)
    if p_ <= 0:
        raise ValueError("p must be positive")
    rows = g.rows
    NX, NY = len(X), len(Y)
    maskX, maskY = mask_of(X), mask_of(Y)
    e_all = _edges_between(rows, X, maskY)
    d_p = Fraction(e_all, NX * NY) / p_
    thr = e_ * p_
    sx = max(1, ceil(e_ * NX))
    sy = max(1, ceil(e_ * NY))
    if sx == NX and sy == NY:
        # the only admissible sub-pair is the pair itself
        return PairStatus(d_p, REGULAR)

    def test(Xs, Ys):
        if len(Xs) < sx or len(Ys) < sy:
            return None
        es = _edges_between(rows, Xs, mask_of(Ys))
        if _deviates(es, len(Xs), len(Ys), e_all, NX, NY, thr):
            return PairStatus(d_p, IRREGULAR, tuple(sorted(Xs)), tuple(sorted(Ys)))
        return None

    degX = {x: (rows[x] & maskY).bit_count() for x in X}
    degY = {y: (rows[y] & maskX).bit_count() for y in Y}
    cands = []
    for deg, tot, side in ((degX, NX, "x"), (degY, NY, "y")):
        hi = [v for v in deg if deg[v] * tot > e_all]
        lo = [v for v in deg if deg[v] * tot < e_all]
        for part in (hi, lo):
            cands.append((part, Y) if side == "x" else (X, part))
    for Xs, Ys in cands:
        r = test(Xs, Ys)
        if r:
            return r

    def extreme(vs, target_mask, size, high):
        key = sorted(vs, key=lambda v: ((-1 if high else 1) * (rows[v] & target_mask).bit_count(), v))
        return key[:size]

    for high in (True, False):
        Xs = extreme(X, maskY, sx, high)
        for _ in range(3):
            Ys = extreme(Y, mask_of(Xs), sy, high)
            r = test(Xs, Ys)
            if r:
                return r
            Xs = extreme(X, mask_of(Ys), sx, high)
            r = test(Xs, Ys)
            if r:
                return r

    seed_seq = [int(seed)] + [int(s) for s in stream]
    rng = np.random.default_rng(seed_seq)
    Xa, Ya = np.array(X), np.array(Y)
    for _ in range(budget):
        Xs = rng.choice(Xa, size=sx, replace=False).tolist()
        Ys = rng.choice(Ya, size=sy, replace=False).tolist()
        r = test(Xs, Ys)
        if r:
            return r
    return PairStatus(d_p, REGULAR)


def validate_witness(g: Graph, X, Y, st: PairStatus, eps, p) -> bool:
    """Re-check an irregularity witness from scratch."""
    if st.status != IRREGULAR:
        return True
    e_, p_ = as_fraction(eps), as_fraction(p)
    wx, wy = set(st.wx), set(st.wy)
    if not (wx <= set(X) and wy <= set(Y)):
        return False
    if len(wx) < e_ * len(X) or len(wy) < e_ * len(Y):
        return False
    rows = g.rows
    e_all = _edges_between(rows, X, mask_of(Y))
    es = _edges_between(rows, wx, mask_of(wy))
    return _deviates(es, len(wx), len(wy), e_all, len(X), len(Y), e_ * p_)


def classify_pairs(g: Graph, P: Partition, budget: int = 200, seed=0,
                   round_index: int = 0, threads: int = 1) -> PairClassification:
    """Run :func:`witness_irregular` on every pair; results are independent
    of ``threads`` because every pair draws from its own RNG stream."""
    keys = [(i, j) for i in range(P.k) for j in range(i + 1, P.k)]

    def job(key):
        i, j = key
        return witness_irregular(g, P.parts[i], P.parts[j], P.epsilon, P.p, budget,
                                 seed, (round_index, i, j))

    if threads > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, keys))
    else:
        results = [job(k) for k in keys]
    return PairClassification(dict(zip(keys, results)))


# -- refinement -----------------------------------------------------------------

def refine(P: Partition, cls: PairClassification) -> Partition:
    """Split each part by the Venn diagram of its witness sets, then chop the
    atoms into parts of one common size; remainders join the exceptional set.

    The common size is the largest s whose spill keeps the exceptional set
    within eps*n and whose part count is at most ``2**k * ceil(1/eps)``.
    """
    irregular = cls.irregular()
    if not irregular:
        return P
    n = P.n
    e_ = as_fraction(P.epsilon)
    incident: dict = {i: [] for i in range(P.k)}
    for (i, j) in irregular:
        st = cls.pairs[(i, j)]
        if not st.wx or not st.wy:
            raise PartitionError(f"irregular pair {(i, j)} carries no witness")
        incident[i].append(set(st.wx))
        incident[j].append(set(st.wy))
    atoms = []
    for i, part in enumerate(P.parts):
        groups: dict = {}
        for v in part:
            key = tuple(v in w for w in incident[i])
            groups.setdefault(key, []).append(v)
        for key in sorted(groups, reverse=True):
            atoms.append(sorted(groups[key]))
    allowance = e_ * n - len(P.exceptional)
    cap = 2 ** P.k * ceil(1 / e_)
    for s in range(max(len(a) for a in atoms), 0, -1):
        count = sum(len(a) // s for a in atoms)
        spill = sum(len(a) % s for a in atoms)
        if count >= 1 and count <= cap and spill <= allowance:
            parts = []
            extra = list(P.exceptional)
            for a in atoms:
                c = len(a) // s
                parts.extend(a[r * s:(r + 1) * s] for r in range(c))
                extra.extend(a[c * s:])
            return Partition.make(parts, extra, P.epsilon, P.p)
    raise ExceptionalOverflow("no common part size keeps the exceptional set within eps*n")


# -- the engine -------------------------------------------------------------------

@dataclass
class RegularityResult:
    partition: Partition
    classification: PairClassification
    trace: list
    converged: bool
    rounds: int
    irregular_counts: list = field(default_factory=list)


def sparse_regular_partition(g: Graph, eps, p, L=2, max_rounds: int = 8, seed=0,
                             budget: int = 200, initial: Sequence[Sequence[int]] | None = None,
                             permute: bool = False, threads: int = 1,
                             exact=None) -> RegularityResult:
    """Classify all pairs, stop when at most eps*k^2 are irregular, else refine.

    ``trace`` holds the capped energy at the start of every round, computed
    with exceptional vertices as singleton parts so that moving a vertex to
    the exceptional set is itself a refinement; the trace is non-decreasing.
    """
    e_ = as_fraction(eps)
    if not 0 < e_ < Fraction(1, 2):
        raise ValueError("need 0 < eps < 1/2")
    if not 0 < as_fraction(p) <= 1:
        raise ValueError("need 0 < p <= 1")
    if g.n < 1 / e_:
        raise PartitionError("graph has fewer than 1/eps vertices")
    if initial is not None:
        covered = {v for part in initial for v in part}
        P = Partition.make(initial, sorted(set(range(g.n)) - covered), eps, p)
    else:
        order = None
        if permute:
            order = np.random.default_rng([int(seed), 0xA11]).permutation(g.n).tolist()
        P = equitable_partition(g.n, eps, order, p)
    P.validate(g.n)
    trace = []
    counts = []
    converged = False
    cls = PairClassification()
    rounds = 0
    for r in range(max_rounds):
        rounds = r + 1
        trace.append(capped_energy(g, P.with_singletons(), L, exact))
        cls = classify_pairs(g, P, budget, seed, r, threads)
        bad = len(cls.irregular())
        counts.append(bad)
        if bad <= e_ * P.k * P.k:
            converged = True
            break
        if r == max_rounds - 1:
            break
        P = refine(P, cls)
    for i in range(1, len(trace)):
        tol = 0 if isinstance(trace[i], Fraction) else FLOAT_TOL * max(1.0, abs(trace[i - 1]))
        if trace[i] < trace[i - 1] - tol:
            raise InvariantError("capped energy trace decreased")
    return RegularityResult(P, cls, trace, converged, rounds, counts)


# -- cluster graph --------------------------------------------------------------

@dataclass
class ClusterGraph:
    k: int
    edges: list
    eps: object
    d: object
    p: object

    @property
    def degrees(self) -> list:
        deg = [0] * self.k
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def to_json(self) -> dict:
        return {"k": self.k, "edges": [[i + 1, j + 1] for i, j in self.edges],
                "degrees": self.degrees}


def cluster_graph(g: Graph, P: Partition, cls: PairClassification, d) -> ClusterGraph:
    """Edge ij iff the pair is regular and d_p(V_i, V_j) >= d."""
    d_ = as_fraction(d) if isinstance(d, (int, float, Fraction)) else d
    edges = []
    for i in range(P.k):
        for j in range(i + 1, P.k):
            st = cls.pairs.get((i, j))
            if st is None:
                raise PartitionError(f"pair {(i + 1, j + 1)} is not classified")
            if st.status == REGULAR and as_fraction(st.d_p) >= d_:
                edges.append((i, j))
    return ClusterGraph(P.k, edges, P.epsilon, d, P.p)


# -- parameter algebra for regular pairs ------------------------------------------

def pair_union_params(first, second) -> tuple:
    """(eps, d) for (A, B u C) given (eps, d) of (A, B) and of (A, C).

    Regularity and density bounds only weaken, so mixed inputs combine to the
    larger eps and the smaller d.
    """
    (e1, d1), (e2, d2) = first, second
    return max(as_fraction(e1), as_fraction(e2)), min(as_fraction(d1), as_fraction(d2))


def pair_restrict_params(eps, d, gamma) -> tuple:
    """(eps + eps/gamma, d - eps) for (A, X) with X a gamma-fraction of B."""
    e_, d_, g_ = as_fraction(eps), as_fraction(d), as_fraction(gamma)
    if g_ <= e_:
        raise ValueError("need gamma > eps")
    return e_ + e_ / g_, d_ - e_


def spot_check_pair(g: Graph, A, B, eps, p, d, budget: int = 200, seed=0) -> dict:
    """Empirical check of a derived (eps, d) claim on actual vertex sets."""
    st = witness_irregular(g, A, B, eps, p, budget, seed)
    return {"status": st.status, "d_p": float(st.d_p),
            "density_ok": as_fraction(st.d_p) >= as_fraction(d)}


# -- energy bound for K_{s,t}-free graphs --------------------------------------

@dataclass
class EnergyBoundReport:
    applicable: bool
    reason: str
    energy_p: float | None
    bound: int
    holds: bool | None


def energy_bound_check(g: Graph, P: Partition, s: int, t: int) -> EnergyBoundReport:
    """Check energy_p <= 2^s t + 1 with p = n^(-1/s), exactly.

    energy_p = energy * n^(2/s), so the test is energy^s * n^2 <= B^s.
    """
    from .detect import has_kst
    B = 2 ** s * t + 1
    n = g.n
    if s < 1 or t < s:
        return EnergyBoundReport(False, "need 1 <= s <= t", None, B, None)
    for part in P.parts:
        # |part| >= 2 s n^(1/s)  <=>  |part|^s >= (2s)^s n
        if len(part) ** s < (2 * s) ** s * n:
            return EnergyBoundReport(False, f"part of size {len(part)} is below 2s n^(1/s)",
                                     None, B, None)
    if has_kst(g, s, t, allow_large=True) is not None:
        return EnergyBoundReport(False, f"graph contains K_{{{s},{t}}}", None, B, None)
    en = energy(g, P, exact=True)
    holds = en ** s * n * n <= B ** s
    value = float(en) * n ** (2 / s)
    return EnergyBoundReport(True, "", value, B, holds)
