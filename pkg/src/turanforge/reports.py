"""CSV reports over the algebraic constructions."""
from __future__ import annotations

import csv
import io
import math

from .constructions import NotFound, build_gq, build_gqt, find_multipliers
from .detect import has_kst, has_triangle
from .gf import FieldError, primes_below

THEOREM4_HEADER = ["t", "q", "n", "e", "closed_form", "closed_form_exact", "furedi_upper",
                   "ratio", "flag"]
SCAN_HEADER = ["q", "feasible", "reason", "built", "n", "e", "expected_e",
               "triangle_free", "k2_2t1_free", "multipliers"]


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _fmt(x) -> str:
    return "" if x is None else repr(x)


def _construct(q: int, t: int):
    if t == 1:
        return build_gq(q)
    return build_gqt(q, find_multipliers(q, t))


def theorem4_rows(t: int, qs) -> list[list]:
    """Per q: n, e(G_{q,t}), the closed form, the bipartite upper bound and e / bound.

    The closed form ((t+1)/(2 sqrt(t+2))) n^(3/2) - (t+1) n / 2 equals
    C(t+2, 2) q^2 (q-1) exactly when n = (t+2) q^2; both are reported.
    """
    if t < 1:
        raise ValueError("need t >= 1")
    rows = []
    for q in qs:
        n = (t + 2) * q * q
        closed = (t + 1) / (2 * math.sqrt(t + 2)) * n ** 1.5 - (t + 1) * n / 2
        exact = (t + 1) * (t + 2) * q * q * (q - 1) // 2
        upper = math.sqrt(t) / 2 * n ** 1.5 + n / 4
        try:
            e = _construct(q, t).graph.m
        except (FieldError, NotFound) as exc:
            rows.append([t, q, n, "", repr(closed), exact, repr(upper), "",
                         f"construction failed: {exc}"])
            continue
        flag = "" if e == exact else "edge count differs from closed form"
        rows.append([t, q, n, e, repr(closed), exact, repr(upper), repr(e / upper), flag])
    return rows


def report_theorem4(t: int, qs) -> str:
    return _csv(THEOREM4_HEADER, theorem4_rows(t, qs))


def multiplier_scan_rows(t: int, q_max: int, build_max: int | None = None,
                         budget: int = 10 ** 6) -> list[list]:
    """Backtracking feasibility for every prime 5 <= q < q_max; feasible q up to
    ``build_max`` are built and checked for triangles and K_{2,2t+1}."""
    rows = []
    for q in primes_below(q_max):
        if q < 5:
            continue
        try:
            ms = find_multipliers(q, t, "backtracking", budget)
        except NotFound as exc:
            rows.append([q, 0, exc.reason, 0, "", "", "", "", "", ""])
            continue
        expected = (t + 1) * (t + 2) * q * q * (q - 1) // 2
        if build_max is not None and q > build_max:
            rows.append([q, 1, "", 0, "", "", expected, "", "", ms.dumps()])
            continue
        g = build_gqt(q, ms).graph
        tri = has_triangle(g) is None
        kf = has_kst(g, 2, 2 * t + 1) is None
        rows.append([q, 1, "", 1, g.n, g.m, expected, int(tri), int(kf), ms.dumps()])
    return rows


def report_multiplier_scan(t: int, q_max: int, build_max: int | None = None,
                           budget: int = 10 ** 6) -> str:
    return _csv(SCAN_HEADER, multiplier_scan_rows(t, q_max, build_max, budget))
