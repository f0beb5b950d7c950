"""Bound calculators and constructive procedures used by the stability arguments.

Exponent arithmetic (``ell0_k0``, ``f_exponent``, ``c4_lower_bound``) is exact
over :class:`fractions.Fraction`.  Floats given to those functions are read
through their decimal ``repr``, so pass ``Fraction(5, 3)`` or ``"5/3"`` when the
value is not a finite decimal.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .detect import has_kst, triangles_through
from .graph import Graph, iter_bits, mask_of


class LemmaError(ValueError):
    """A calculator or procedure was called outside its hypotheses."""


class StabilityContradiction(RuntimeError):
    """The branch of the triangle-stability construction that cannot occur did occur."""

    def __init__(self, message: str, state: dict):
        super().__init__(f"{message}; state={state}")
        self.state = state


class CycleNotFound(LookupError):
    """No cycle of the requested length; ``reason`` says where the search stopped."""

    def __init__(self, message: str, reason: str = "no-path"):
        super().__init__(message)
        self.reason = reason


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as a rational")


# -- smoothness -----------------------------------------------------------------

@dataclass(frozen=True)
class SmoothnessParams:
    alpha: Fraction
    beta: Fraction
    rho: float = 1.0
    C: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", frac(self.alpha))
        object.__setattr__(self, "beta", frac(self.beta))
        if not (1 <= self.beta < self.alpha < 2):
            raise LemmaError(f"need 1 <= beta < alpha < 2, got ({self.alpha}, {self.beta})")
        if self.rho < 0:
            raise LemmaError("need rho >= 0")
        if self.C < 1:
            raise LemmaError("need C >= 1")

    def to_json(self) -> dict:
        return {"alpha": str(self.alpha), "beta": str(self.beta), "rho": self.rho, "C": self.C}


_TAG = re.compile(r"^\s*(K2t_book|K2t|K33)\s*(?:\(\s*(?:t\s*=\s*)?(\d+)\s*\))?\s*$")


def smoothness_registry(tag: str, t: int | None = None, C: float = 1.0) -> SmoothnessParams:
    """Exponents for ``K2t(t)``, ``K33`` and ``K2t_book(t)``.

    ``rho`` is the coefficient in z(n, F) ~ rho (n/2)^alpha.  ``C`` is supplied
    by the caller; it is not a property of the family.
    """
    m = _TAG.match(tag)
    if not m:
        raise LemmaError(f"unknown family tag {tag!r}")
    name = m.group(1)
    if m.group(2) is not None:
        t = int(m.group(2))
    if name == "K33":
        return SmoothnessParams(Fraction(5, 3), Fraction(4, 3), 1.0, C)
    if t is None or t < 2:
        raise LemmaError(f"{name} needs t >= 2")
    if name == "K2t":
        return SmoothnessParams(Fraction(3, 2), Fraction(4, 3), math.sqrt(t - 1), C)
    return SmoothnessParams(Fraction(3, 2), Fraction(1), 1.0, C)


def furedi_kst_bound(m: int, n: int, s: int, t: int) -> float:
    """(t-s+1)^(1/s) m n^(1-1/s) + s m + s n^(2-2/s)."""
    if m > n:
        raise LemmaError("need m <= n")
    if not 2 <= s <= t:
        raise LemmaError("need 2 <= s <= t")
    return (t - s + 1) ** (1 / s) * m * n ** (1 - 1 / s) + s * m + s * n ** (2 - 2 / s)


def book_family_bound(m: int, n: int, t: int) -> float:
    """m sqrt(n) + 4 t^2 n."""
    if m > n:
        raise LemmaError("need m <= n")
    if t < 2:
        raise LemmaError("need t >= 2")
    return m * math.sqrt(n) + 4 * t * t * n


# -- exponent bookkeeping ---------------------------------------------------------

def _floor_log(base: Fraction, x: Fraction) -> int:
    """Largest integer j with base^j <= x, for base > 1 and x > 0."""
    j = 0
    if x >= 1:
        while base ** (j + 1) <= x:
            j += 1
    else:
        while base ** j > x:
            j -= 1
    return j


def ell0_argument(params: SmoothnessParams) -> Fraction:
    a, b = params.alpha, params.beta
    return (2 * b - b * b) * (a - 1) / (a - b)


def ell0_k0(params: SmoothnessParams) -> tuple[int, int]:
    """(l0, k0) with k0 = 2 l0 + 5; exact rational comparisons only."""
    a, b = params.alpha, params.beta
    if b == 1:
        ell = math.floor(1 / (a - 1))
    else:
        ell = _floor_log(b, ell0_argument(params))
    return ell, 2 * ell + 5


KST_FAST_PATH_K0 = 5


def f_exponent(i: int, beta) -> Fraction:
    """1/(b-1) + (b^2-2b)/((b-1) b^i), with the limit value i at b = 1."""
    if i < 1:
        raise LemmaError("need i >= 1")
    b = frac(beta)
    if b < 1:
        raise LemmaError("need beta >= 1")
    if b == 1:
        return Fraction(i)
    return 1 / (b - 1) + (b * b - 2 * b) / ((b - 1) * b ** i)


# -- expansion --------------------------------------------------------------------

@dataclass
class ExpansionBound:
    applicable: bool
    value: float | None
    threshold: float
    gamma: float
    reason: str = ""

    def to_json(self) -> dict:
        return {"applicable": self.applicable, "value": self.value,
                "threshold": self.threshold, "gamma": self.gamma, "reason": self.reason}


def smooth_expansion_bound(params: SmoothnessParams, delta: float, sizeU: int, n: int,
                           case: str) -> ExpansionBound:
    """Lower bound on |V| for a set U whose vertices have degree >= delta n^(alpha-1)."""
    if delta <= 0:
        raise LemmaError("need delta > 0")
    if case not in ("U_smaller", "U_larger"):
        raise LemmaError(f"unknown case {case!r}")
    a, b = float(params.alpha), float(params.beta)
    gamma = delta / (2 * params.C)
    threshold = (1 / gamma) ** (1 / (a - b))
    if n < threshold:
        return ExpansionBound(False, None, threshold, gamma, "n below threshold")
    whole = gamma ** (1 / (a - 1)) * n
    if case == "U_smaller":
        value = min(gamma ** (1 / b) * sizeU ** (1 / b) * n ** ((a - 1) / b), whole)
    else:
        value = max(gamma * n ** (a - 1) * sizeU ** (2 - a), whole)
    return ExpansionBound(True, value, threshold, gamma)


def kst_expansion_bound(rhoX: float, rhoY: float, sizeY: int, n: int, s: int, t: int) -> float:
    """(rhoX/(t-1))^(1/(s-1)) (rhoY |Y| - s n^(1/s))."""
    if not 2 <= s <= t:
        raise LemmaError("need 2 <= s <= t")
    return (rhoX / (t - 1)) ** (1 / (s - 1)) * (rhoY * sizeY - s * n ** (1 / s))


@dataclass
class KstExpansionReport:
    hypotheses_ok: bool
    violations: list
    rhoX: float
    rhoY: float
    actual: int
    bound: float
    vacuous: bool
    holds: bool | None

    def to_json(self) -> dict:
        return dict(self.__dict__)


REL_TOL = 1e-12


def kst_expansion_check(g: Graph, v: int, X: Sequence[int], Y: Sequence[int], s: int, t: int,
                        rhoX: float | None = None, rhoY: float | None = None,
                        check_free: bool = True) -> KstExpansionReport:
    """Measure |N(X) & Y| against the bound; missing rho's are measured from X and Y.

    Raises :class:`AssertionError` if every hypothesis holds and the bound fails.
    """
    n = g.n
    rows = g.rows
    X, Y = list(X), list(Y)
    my = mask_of(Y)
    viol = []
    if check_free and has_kst(g, s, t, allow_large=True) is not None:
        viol.append(f"graph contains K_{{{s},{t}}}")
    for x in X:
        if not rows[v] >> x & 1:
            viol.append(f"vertex {x} of X is not adjacent to v={v}")
            break
    if my & (mask_of(X) | (1 << v)):
        viol.append("Y meets X or v")
    degY = [(rows[x] & my).bit_count() for x in X]
    if rhoX is None:
        rhoX = len(X) / n ** (1 - 1 / s)
    if rhoY is None:
        rhoY = (min(degY) * n ** (1 / s) / len(Y)) if X and Y else 0.0
    if len(X) < rhoX * n ** (1 - 1 / s) * (1 - REL_TOL):
        viol.append(f"|X| = {len(X)} is below rhoX n^(1-1/s)")
    need = rhoY * len(Y) * n ** (-1 / s) * (1 - REL_TOL)
    for x, d in zip(X, degY):
        if d < need:
            viol.append(f"vertex {x} has only {d} neighbours in Y")
            break
    nb = 0
    for x in X:
        nb |= rows[x]
    actual = (nb & my).bit_count()
    bound = kst_expansion_bound(rhoX, rhoY, len(Y), n, s, t)
    vacuous = bound <= 0
    holds = None
    if not viol:
        holds = actual >= bound * (1 - REL_TOL)
        if not holds:
            raise AssertionError(f"|N(X) & Y| = {actual} < {bound}")
    return KstExpansionReport(not viol, viol, rhoX, rhoY, actual, bound, vacuous, holds)


# -- counting 4-cycles ------------------------------------------------------------

def c4_lower_bound(m: int, n: int, e: int) -> Fraction | None:
    """Lower bound on the 4-cycles of a bipartite graph with parts m, n and e edges.

    Returns ``None`` when e(e-n) < n m (m-1)/2 or m < 2.
    """
    if m < 0 or n < 1 or e < 0:
        raise LemmaError("need m >= 0, n >= 1, e >= 0")
    mm = m * (m - 1)
    if mm == 0 or 2 * e * (e - n) < n * mm:
        return None
    a = e * (e - n)
    return Fraction(a * a - a * n * mm, 4 * n * n * mm)


# -- triangle stability -----------------------------------------------------------

@dataclass
class StabilityOutcome:
    kind: str                      # "triangle_rich" or "bipartition"
    vertex: int | None = None
    triangles: int | None = None
    X: tuple = ()
    Y: tuple = ()
    non_crossing: int | None = None

    def to_json(self) -> dict:
        if self.kind == "triangle_rich":
            return {"kind": self.kind, "vertex": self.vertex, "triangles": self.triangles}
        return {"kind": self.kind, "X": list(self.X), "Y": list(self.Y),
                "non_crossing": self.non_crossing}


def _inside(rows, mask: int) -> int:
    return sum((rows[x] & mask).bit_count() for x in iter_bits(mask)) // 2


def _within_nine_root(value, gamma: Fraction, n: int) -> bool:
    # value <= 9 gamma^(1/4) n^2  <=>  (value / (9 n^2))^4 <= gamma
    return value <= 0 or (Fraction(value) / (9 * n * n)) ** 4 <= gamma


def verify_stability(g: Graph, gamma, out: StabilityOutcome) -> bool:
    gam = frac(gamma)
    n2 = g.n * g.n
    if out.kind == "triangle_rich":
        return triangles_through(g, out.vertex) == out.triangles and out.triangles >= gam * n2
    rows = g.rows
    mx, my = mask_of(out.X), mask_of(out.Y)
    if mx & my or (mx | my) != (1 << g.n) - 1:
        return False
    nc = _inside(rows, mx) + _inside(rows, my)
    return nc == out.non_crossing and _within_nine_root(nc, gam, g.n)


def tri_stab(g: Graph, gamma) -> StabilityOutcome:
    """Either a vertex in >= gamma n^2 triangles or a bipartition with <= 9 gamma^(1/4) n^2
    non-crossing edges, following the max-degree construction."""
    gam = frac(gamma)
    if not 0 < gam < Fraction(1, 8):
        raise LemmaError("need 0 < gamma < 1/8")
    n = g.n
    n2 = n * n
    if g.m < (Fraction(1, 4) - gam) * n2:
        raise LemmaError(f"e = {g.m} is below (1/4 - gamma) n^2 = {float((Fraction(1, 4) - gam) * n2)}")
    rows = g.rows
    deg = g.degrees()
    u = max(range(n), key=lambda x: (deg[x], -x))
    mx = rows[u]
    my = ((1 << n) - 1) & ~mx
    eX, eY = _inside(rows, mx), _inside(rows, my)
    state = {"u": u, "|X|": mx.bit_count(), "e(X)": eX, "e(Y)": eY, "n": n,
             "e": g.m, "gamma": str(gam)}
    if eX >= gam * n2:
        out = StabilityOutcome("triangle_rich", u, triangles_through(g, u))
    elif _within_nine_root(eY + gam * n2, gam, n):
        out = StabilityOutcome("bipartition", X=tuple(iter_bits(mx)), Y=tuple(iter_bits(my)),
                               non_crossing=eX + eY)
    else:
        v = max(iter_bits(mx), key=lambda x: ((rows[x] & my).bit_count(), -x))
        mz = rows[v] & my
        eZ = _inside(rows, mz)
        state.update({"v": v, "|Z|": mz.bit_count(), "e(Z)": eZ})
        if eZ < gam * n2:
            raise StabilityContradiction("no triangle-rich vertex and no sparse side", state)
        out = StabilityOutcome("triangle_rich", v, triangles_through(g, v))
    if not verify_stability(g, gam, out):
        raise StabilityContradiction("outcome failed re-verification", state)
    return out


# -- local max cut ----------------------------------------------------------------

@dataclass
class CutResult:
    sides: list
    cut: int
    moves: int


def cut_size(g: Graph, sides: Sequence[int]) -> int:
    return sum(1 for u, v in g.edges() if sides[u] != sides[v])


def local_max_cut(g: Graph, initial: Sequence[int]) -> CutResult:
    """Move the lowest vertex with strictly more neighbours on its own side, until none."""
    if len(initial) != g.n or any(s not in (0, 1) for s in initial):
        raise LemmaError("initial must assign side 0 or 1 to every vertex")
    sides = list(initial)
    rows = g.rows
    masks = [mask_of(v for v in range(g.n) if sides[v] == 0),
             mask_of(v for v in range(g.n) if sides[v] == 1)]
    moves = 0
    changed = True
    while changed:
        changed = False
        for v in range(g.n):
            s = sides[v]
            own = (rows[v] & masks[s]).bit_count()
            if own > g.degree(v) - own:
                masks[s] &= ~(1 << v)
                masks[1 - s] |= 1 << v
                sides[v] = 1 - s
                moves += 1
                changed = True
                if moves > g.m:
                    raise AssertionError("more moves than edges")
    return CutResult(sides, cut_size(g, sides), moves)


# -- odd cycles through a vertex --------------------------------------------------

@dataclass
class OddCycleConfig:
    """Bookkeeping parameters of the layered embedding; ``preset`` applies the
    default couplings delta = tau^2 d / 64 and delta_tilde = d / 4t."""

    tau: float = 0.1
    d: float = 0.5
    eps: float = 0.01
    delta: float | None = None
    delta_tilde: float | None = None

    @classmethod
    def preset(cls, tau: float, d: float, t: int, eps: float = 0.01) -> "OddCycleConfig":
        return cls(tau, d, eps, tau * tau * d / 64, d / (4 * t))


def _pyramid(rows, v: int, layers: Sequence[int], target: int):
    """Reachable sets N_1..N_l and the end set N(N_l) & target, with parents."""
    front = {v: None}
    levels = [front]
    for D in layers:
        nxt = {}
        for u in sorted(front):
            for w in iter_bits(rows[u] & D):
                nxt.setdefault(w, u)
        if not nxt:
            return levels, {}
        levels.append(nxt)
        front = nxt
    end = {}
    for u in sorted(front):
        for w in iter_bits(rows[u] & target & ~(1 << v)):
            end.setdefault(w, u)
    return levels, end


def _arm(rows, start: int, v: int, layers: Sequence[int], levels, parent, reserved: int):
    """Path start -> D_l -> ... -> D_1 -> v avoiding ``reserved``; parent first."""
    ell = len(layers)
    dead: set = set()

    def rec(x, i, first):
        # x sits just outside layer i (i = ell: the end set); step into layer i-1 or v
        if i == 0:
            return [] if rows[x] >> v & 1 else None
        cands = rows[x] & layers[i - 1] & ~reserved
        order = []
        if first is not None and cands >> first & 1:
            order.append(first)
        order.extend(w for w in iter_bits(cands) if w != first and w in levels[i])
        for w in order:
            if (w, i) in dead:
                continue
            tail = rec(w, i - 1, levels[i].get(w))
            if tail is not None:
                return [w] + tail
            dead.add((w, i))
        return None

    return rec(start, ell, parent)


def verify_cycle(g: Graph, cycle: Sequence[int], k: int, v: int | None = None) -> bool:
    if len(cycle) != k or len(set(cycle)) != k:
        return False
    if v is not None and v not in cycle:
        return False
    return all(g.has_edge(cycle[i], cycle[(i + 1) % k]) for i in range(k))


def find_odd_cycle_via_expansion(g: Graph, v: int, layers: Sequence[Sequence[int]],
                                 B: Sequence[int], Bp: Sequence[int], k: int,
                                 layers_prime: Sequence[Sequence[int]] | None = None,
                                 budget: int = 100_000) -> list[int]:
    """A C_k through v: two arms grown through the layers, joined by a path of
    length k - 2l - 2 alternating between the ends reached in B and in B'.

    The second arm avoids the first arm and the joining path.  Raises
    :class:`CycleNotFound`.
    """
    ell = len(layers)
    if k % 2 == 0 or k < 2 * ell + 3:
        raise LemmaError(f"need odd k >= 2l + 3, got k={k}, l={ell}")
    if layers_prime is None:
        layers_prime = layers
    if len(layers_prime) != ell:
        raise LemmaError("both pyramids need the same number of layers")
    masks = [mask_of(D) for D in layers]
    masks_p = [mask_of(D) for D in layers_prime]
    for ms in (masks, masks_p):
        seen = 0
        for m in ms:
            if m & seen or m >> v & 1:
                raise LemmaError("layers must be pairwise disjoint and avoid v")
            seen |= m
    rows = g.rows
    lv, end = _pyramid(rows, v, masks, mask_of(B))
    lvp, endp = _pyramid(rows, v, masks_p, mask_of(Bp))
    if not end or not endp:
        raise CycleNotFound("expansion died out", "expansion")
    L = k - 2 * ell - 2
    end_mask, endp_mask = mask_of(end), mask_of(endp)
    steps = 0

    def close(path):
        used = mask_of(path)
        a1 = _arm(rows, path[0], v, masks, lv, end[path[0]], used)
        if a1 is None:
            return None
        a2 = _arm(rows, path[-1], v, masks_p, lvp, endp[path[-1]], used | mask_of(a1))
        if a2 is None:
            return None
        return [v] + a1[::-1] + path + a2

    def extend(path, used):
        nonlocal steps
        steps += 1
        if steps > budget:
            raise CycleNotFound(f"search budget of {budget} exhausted", "budget")
        if len(path) == L + 1:
            return close(path)
        side = endp_mask if len(path) % 2 == 1 else end_mask
        for w in iter_bits(rows[path[-1]] & side & ~used):
            res = extend(path + [w], used | (1 << w))
            if res is not None:
                return res
        return None

    for x in iter_bits(end_mask):
        cyc = extend([x], 1 << x | 1 << v)
        if cyc is not None:
            if not verify_cycle(g, cyc, k, v):
                raise AssertionError(f"constructed walk {cyc} is not a C_{k}")
            return cyc
    raise CycleNotFound("no connecting path between the end sets", "no-path")


def bfs_spheres(g: Graph, v: int, depth: int) -> list[list[int]]:
    """Spheres S_1..S_depth around v (S_i at distance exactly i)."""
    dist = {v: 0}
    out = [[] for _ in range(depth)]
    dq = deque([v])
    rows = g.rows
    while dq:
        x = dq.popleft()
        if dist[x] == depth:
            continue
        for w in iter_bits(rows[x]):
            if w not in dist:
                dist[w] = dist[x] + 1
                out[dist[w] - 1].append(w)
                dq.append(w)
    return out


@dataclass
class OddCycleSearch:
    cycle: list | None
    start: int | None
    ell: int | None
    tried: int
    reasons: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"found": self.cycle is not None, "cycle": self.cycle, "start": self.start,
                "ell": self.ell, "starts_tried": self.tried,
                "reasons": dict(sorted(self.reasons.items()))}


def find_odd_cycle(g: Graph, k: int, seed: int = 0, max_starts: int | None = None,
                   budget: int = 20_000) -> OddCycleSearch:
    """Try start vertices in a seeded order; layers are BFS spheres S_1..S_l and
    B = B' = S_(l+1), for l from (k-3)/2 down to 0."""
    import numpy as np
    if k < 3 or k % 2 == 0:
        raise LemmaError("k must be odd and >= 3")
    order = np.random.default_rng([int(seed), k]).permutation(g.n).tolist()
    if max_starts is not None:
        order = order[:max_starts]
    reasons: dict = {}
    top = (k - 3) // 2
    for tried, v in enumerate(order, 1):
        spheres = bfs_spheres(g, v, top + 1)
        for ell in range(top, -1, -1):
            if not spheres[ell]:
                reasons["expansion"] = reasons.get("expansion", 0) + 1
                continue
            try:
                cyc = find_odd_cycle_via_expansion(g, v, spheres[:ell], spheres[ell],
                                                   spheres[ell], k, budget=budget)
            except CycleNotFound as exc:
                reasons[exc.reason] = reasons.get(exc.reason, 0) + 1
                continue
            return OddCycleSearch(cyc, v, ell, tried, reasons)
    return OddCycleSearch(None, None, None, len(order), reasons)


# -- density transfer diagnostics -------------------------------------------------

def transfer_report(g: Graph, P, cls, R, params: SmoothnessParams, gamma: float) -> dict:
    """Compare e(R) and cluster degrees with the thresholds implied by e(G).

    Solves e(G) = (mu^(alpha-1) + gamma) rho p n^2 / 2 for mu, p = n^(alpha-2).
    Nothing is asserted; the conclusions only hold for large n.
    """
    if params.rho == 0:
        raise LemmaError("rho = 0 leaves mu undefined")
    n = g.n
    a = float(params.alpha)
    p = n ** (a - 2)
    base = 2 * g.m / (params.rho * p * n * n) - gamma
    vacuous = base <= 0
    mu = base ** (1 / (a - 1)) if not vacuous else None
    t = P.k
    rows = g.rows
    deg = R.degrees
    irregular = {}
    for (i, j) in cls.irregular():
        irregular[i] = irregular.get(i, 0) + 1
        irregular[j] = irregular.get(j, 0) + 1
    clusters = []
    for i, part in enumerate(P.parts):
        meets = sum(g.degree(x) for x in part) - sum((rows[x] & mask_of(part)).bit_count()
                                                     for x in part) // 2
        entry = {"cluster": i + 1, "size": len(part), "edges_meeting": meets,
                 "degree_R": deg[i], "irregular_pairs": irregular.get(i, 0)}
        if not vacuous:
            # mu_i from  meets = (mu_i^(alpha-1) + gamma) rho n^(alpha-1) |V_i|
            b_i = meets / (params.rho * n ** (a - 1) * len(part)) - gamma
            entry["mu_i"] = b_i ** (1 / (a - 1)) if b_i > 0 else None
            entry["degree_threshold"] = ((entry["mu_i"] - gamma) * t
                                         if entry["mu_i"] is not None else None)
        clusters.append(entry)
    out = {"n": n, "e": g.m, "alpha": str(params.alpha), "rho": params.rho, "gamma": gamma,
           "p": p, "t": t, "vacuous": vacuous, "mu": mu, "e_R": len(R.edges),
           "e_R_threshold": None if vacuous else (mu - gamma) * t * t / 2,
           "clusters": clusters}
    return out
