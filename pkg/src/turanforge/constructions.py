"""Algebraic constructions over prime fields.

Vertex index of coordinate ``(x1, x2)`` in part ``p`` is ``p*q*q + x1*q + x2``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from math import comb, sqrt

from .gf import FieldError, PrimeField, is_prime, quadratic_character
from .graph import BipartiteGraph, Graph, PartLabeledGraph


class NotFound(Exception):
    """No multiplier set found; ``reason`` is ``"budget"`` or ``"exhausted"``."""

    def __init__(self, message: str, reason: str = "exhausted", steps: int = 0):
        super().__init__(message)
        self.reason = reason
        self.steps = steps


class MultiplierError(ValueError):
    pass


def _index(q: int, part: int, x1: int, x2: int) -> int:
    return part * q * q + x1 * q + x2


def _join(q: int, rows: list, pi: int, pj: int, m: int) -> None:
    """Join x in part pi to y in part pj when x - y = m*(c, c^2), c != 0."""
    shifts = [((m * c) % q, (m * c * c) % q) for c in range(1, q)]
    for x1 in range(q):
        for x2 in range(q):
            a = _index(q, pi, x1, x2)
            for d1, d2 in shifts:
                b = _index(q, pj, (x1 - d1) % q, (x2 - d2) % q)
                rows[a] |= 1 << b
                rows[b] |= 1 << a


def _parts(q: int, r: int) -> tuple:
    qq = q * q
    return tuple(tuple(range(p * qq, (p + 1) * qq)) for p in range(r))


def build_gq(q: int) -> PartLabeledGraph:
    """Three copies of F_q x F_q; x in A_i joined to y in A_{i+1} iff x - y = (a, a^2)."""
    if not is_prime(q):
        raise FieldError(f"{q} is not prime")
    if q < 5:
        raise FieldError("need q >= 5")
    if q % 3 != 2:
        raise FieldError(f"need q = 2 mod 3, got q = {q}")
    n = 3 * q * q
    rows = [0] * n
    for i in range(3):
        _join(q, rows, i, (i + 1) % 3, 1)
    return PartLabeledGraph(Graph(n, rows), _parts(q, 3))


# -- multipliers ---------------------------------------------------------------

@dataclass
class MultiplierSet:
    """Multipliers ``m[i, j]`` for ``1 <= i < j <= t + 2`` (1-based parts).

    :meth:`get` applies ``m[j, i] = -m[i, j]`` for reads below the diagonal.
    """

    q: int
    t: int
    m: dict = field(default_factory=dict)

    @property
    def r(self) -> int:
        return self.t + 2

    def get(self, i: int, j: int) -> int:
        if i == j:
            raise MultiplierError("no multiplier on the diagonal")
        if i < j:
            return self.m[(i, j)] % self.q
        return (-self.m[(j, i)]) % self.q

    def triple_value(self, i: int, j: int, k: int) -> int:
        a, b, c = self.get(i, j), self.get(j, k), self.get(k, i)
        return (-a * b * c * (a + b + c)) % self.q

    def violations(self) -> list[str]:
        """Human-readable list of failed conditions (empty when valid)."""
        out = []
        f = PrimeField(self.q)
        need = {(i, j) for i in range(1, self.r + 1) for j in range(i + 1, self.r + 1)}
        if set(self.m) != need:
            out.append("table must cover exactly the pairs i < j <= t+2")
            return out
        for key, v in sorted(self.m.items()):
            if v % self.q == 0:
                out.append(f"m{key} is zero")
        if out:
            return out
        for i, j, k in permutations(range(1, self.r + 1), 3):
            if quadratic_character(f, self.triple_value(i, j, k)) != -1:
                out.append(f"triangle condition fails at ({i},{j},{k})")
            if (self.get(j, k) + self.get(k, i)) % self.q == 0:
                out.append(f"pair condition fails at ({i},{j},{k})")
        return out

    def is_valid(self) -> bool:
        return not self.violations()

    def to_json(self) -> dict:
        entries = [{"i": i, "j": j, "m": v % self.q} for (i, j), v in sorted(self.m.items())]
        return {"q": self.q, "t": self.t, "entries": entries}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data) -> "MultiplierSet":
        if isinstance(data, str):
            data = json.loads(data)
        m = {(int(e["i"]), int(e["j"])): int(e["m"]) for e in data["entries"]}
        return cls(int(data["q"]), int(data["t"]), m)


def _pair_order(r: int) -> list[tuple[int, int]]:
    # column by column, so every triple a < b < c is complete once (b, c) is set
    return [(i, j) for j in range(2, r + 1) for i in range(1, j)]


def _triple_ok(q: int, chi: list, get, a: int, b: int, c: int) -> bool:
    for i, j, k in permutations((a, b, c)):
        x, y, z = get(i, j), get(j, k), get(k, i)
        if chi[(-x * y * z * (x + y + z)) % q] != -1:
            return False
        if (y + z) % q == 0:
            return False
    return True


def _backtrack(q: int, t: int, budget: int) -> tuple[MultiplierSet, int]:
    r = t + 2
    chi = PrimeField(q).character_table()
    order = _pair_order(r)
    table: dict = {}
    steps = 0

    def get(i, j):
        return table[(i, j)] if i < j else (-table[(j, i)]) % q

    def rec(pos):
        nonlocal steps
        if pos == len(order):
            return True
        i, j = order[pos]
        # a common scale factor preserves both conditions, so m[1,2] = 1
        values = [1] if pos == 0 else range(1, q)
        for v in values:
            steps += 1
            if steps > budget:
                raise NotFound(f"budget of {budget} steps exhausted", "budget", steps)
            table[(i, j)] = v
            if all(_triple_ok(q, chi, get, k, i, j) for k in range(1, i)):
                if rec(pos + 1):
                    return True
            del table[(i, j)]
        return False

    if not rec(0):
        raise NotFound(f"no multiplier set exists for q={q}, t={t}", "exhausted", steps)
    return MultiplierSet(q, t, dict(table)), steps


def _paper_greedy(q: int, t: int, budget: int) -> tuple[MultiplierSet, int]:
    f = PrimeField(q)
    chi = f.character_table()
    T = comb(t + 2, 2)
    chosen: list[int] = []
    steps = 0
    while len(chosen) < T:
        pick = None
        for x in range(1, q):
            steps += 1
            if steps > budget:
                raise NotFound(f"budget of {budget} steps exhausted", "budget", steps)
            m = x * x % q
            if any(m == c or m == (-c) % q for c in chosen):
                continue
            ok = all(chi[(-(chosen[i] + chosen[j] + m)) % q] == -1
                     for i in range(len(chosen)) for j in range(i + 1, len(chosen)))
            if ok:
                pick = m
                break
        if pick is None:
            raise NotFound(f"greedy residue scheme stalls at m_{len(chosen) + 1} for q={q}",
                           "exhausted", steps)
        chosen.append(pick)
    ms = MultiplierSet(q, t, dict(zip(_pair_order(t + 2), chosen)))
    if not ms.is_valid():
        raise NotFound(f"greedy residue set fails the multiplier conditions for q={q}",
                       "exhausted", steps)
    return ms, steps


def find_multipliers(q: int, t: int, strategy: str = "backtracking",
                     budget: int = 10 ** 6) -> MultiplierSet:
    """Search for a valid multiplier set; raises :class:`NotFound`."""
    if not is_prime(q):
        raise FieldError(f"{q} is not prime")
    if q < 5:
        raise FieldError("need q >= 5")
    if t < 1:
        raise ValueError("need t >= 1")
    if strategy == "backtracking":
        ms, _ = _backtrack(q, t, budget)
    elif strategy in ("paper_greedy", "greedy"):
        ms, _ = _paper_greedy(q, t, budget)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    bad = ms.violations()
    if bad:
        raise AssertionError(f"search returned an invalid set: {bad[0]}")
    return ms


def build_gqt(q: int, multipliers: MultiplierSet) -> PartLabeledGraph:
    """``t+2`` copies of F_q x F_q; parts i < j joined via m[i,j]*(c, c^2)."""
    if multipliers.q != q:
        raise MultiplierError("multiplier set is for a different q")
    bad = multipliers.violations()
    if bad:
        raise MultiplierError(bad[0])
    r = multipliers.r
    n = r * q * q
    rows = [0] * n
    for i in range(1, r + 1):
        for j in range(i + 1, r + 1):
            _join(q, rows, i - 1, j - 1, multipliers.get(i, j))
    return PartLabeledGraph(Graph(n, rows), _parts(q, r))


def projective_plane_incidence(q: int) -> BipartiteGraph:
    """Point-line incidence graph of PG(2, q); points first, then lines.

    Both points and lines are normalised vectors of F_q^3 (first nonzero
    coordinate 1) in lexicographic order.
    """
    if not is_prime(q):
        raise FieldError(f"{q} is not prime")
    vecs = []
    for a in range(q):
        for b in range(q):
            for c in range(q):
                v = (a, b, c)
                lead = next((x for x in v if x), 0)
                if lead == 1:
                    vecs.append(v)
    N = len(vecs)
    rows = [0] * (2 * N)
    for i, p in enumerate(vecs):
        for j, ln in enumerate(vecs):
            if (p[0] * ln[0] + p[1] * ln[1] + p[2] * ln[2]) % q == 0:
                rows[i] |= 1 << (N + j)
                rows[N + j] |= 1 << i
    return BipartiteGraph(tuple(range(N)), tuple(range(N, 2 * N)), Graph(2 * N, rows))


def density_ratio(t: int) -> float:
    """(t+1)/sqrt(t(t+2))."""
    if t < 1:
        raise ValueError("need t >= 1")
    return (t + 1) / sqrt(t * (t + 2))
