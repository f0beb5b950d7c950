import math

import pytest

from turanforge.constructions import (MultiplierError, MultiplierSet, NotFound, build_gq,
                                      build_gqt, density_ratio, find_multipliers,
                                      projective_plane_incidence)
from turanforge.detect import girth, has_kst, has_triangle
from turanforge.gf import FieldError, PrimeField, quadratic_character


@pytest.mark.parametrize("q", [5, 11])
def test_gq_counts_and_claims(q):
    pl = build_gq(q)
    g = pl.graph
    assert g.n == 3 * q * q and g.m == 3 * q * q * (q - 1)
    assert set(g.degrees()) == {2 * (q - 1)}
    assert has_triangle(g) is None
    assert has_kst(g, 2, 3) is None
    # e = n^(3/2)/sqrt(3) - n, i.e. e = 3 q^3 - 3 q^2 with n = 3 q^2
    assert g.m == 3 * q ** 3 - 3 * q * q


def test_gq_index_map():
    q = 5
    g = build_gq(q).graph
    # (0,0) in A_1 is joined to (-a, -a^2) in A_2
    for a in range(1, q):
        y = (q + 0 - 0) * 0 + 1 * q * q + ((-a) % q) * q + ((-a * a) % q)
        assert g.has_edge(0, y)


@pytest.mark.parametrize("q", [7, 4, 3, 2, 13])
def test_gq_rejects(q):
    with pytest.raises(FieldError):
        build_gq(q)


def test_multiplier_example_valid():
    ms = MultiplierSet(5, 1, {(1, 2): 1, (2, 3): 1, (1, 3): 4})
    assert ms.is_valid()
    assert ms.get(3, 1) == 1 and ms.get(2, 1) == 4
    assert quadratic_character(PrimeField(5), ms.triple_value(1, 2, 3)) == -1


def test_multiplier_validation_catches_errors():
    assert MultiplierSet(5, 1, {(1, 2): 1, (2, 3): 1}).violations()
    assert MultiplierSet(5, 1, {(1, 2): 1, (2, 3): 0, (1, 3): 4}).violations()
    assert MultiplierSet(5, 1, {(1, 2): 1, (2, 3): 1, (1, 3): 1}).violations()


def test_gqt_reproduces_gq():
    ms = MultiplierSet(5, 1, {(1, 2): 1, (2, 3): 1, (1, 3): 4})
    assert build_gqt(5, ms).graph == build_gq(5).graph


def test_gqt_rejects_invalid_multipliers():
    with pytest.raises(MultiplierError):
        build_gqt(5, MultiplierSet(5, 1, {(1, 2): 1, (2, 3): 1, (1, 3): 1}))
    with pytest.raises(MultiplierError):
        build_gqt(7, MultiplierSet(5, 1, {(1, 2): 1, (2, 3): 1, (1, 3): 4}))


def test_find_multipliers_small():
    ms = find_multipliers(5, 1)
    assert ms.is_valid() and ms.m[(1, 2)] == 1
    with pytest.raises(NotFound) as exc:
        find_multipliers(5, 1, "paper_greedy")
    assert exc.value.reason == "exhausted"
    with pytest.raises(FieldError):
        find_multipliers(2, 1)


def test_find_multipliers_budget():
    with pytest.raises(NotFound) as exc:
        find_multipliers(5, 3, budget=5)
    assert exc.value.reason == "budget"


def test_backtracking_exhausts_when_infeasible():
    # t = 4 needs six parts; the search space over F_5 is empty
    with pytest.raises(NotFound) as exc:
        find_multipliers(5, 4)
    assert exc.value.reason == "exhausted"


@pytest.mark.parametrize("q", [5, 7])
def test_backtracking_agrees_with_brute_force(q):
    # oracle: every table with m[1,2] = 1 for t = 2 (scaling fixes m[1,2])
    keys = [(1, 3), (2, 3), (1, 4), (2, 4), (3, 4)]
    valid = []
    for code in range(q ** 5):
        vals, c = [], code
        for _ in keys:
            vals.append(c % q)
            c //= q
        if 0 in vals:
            continue
        m = dict(zip(keys, vals))
        m[(1, 2)] = 1
        if MultiplierSet(q, 2, m).is_valid():
            valid.append(m)
    found = find_multipliers(q, 2)
    assert bool(valid)
    assert found.m in valid


def test_paper_greedy_success_is_valid():
    ms = find_multipliers(193, 2, "paper_greedy")
    assert ms.is_valid()


@pytest.mark.parametrize("q,t", [(5, 2), (7, 2), (11, 2)])
def test_gqt_claims(q, t):
    ms = find_multipliers(q, t)
    pl = build_gqt(q, ms)
    g = pl.graph
    assert g.n == (t + 2) * q * q
    assert g.m == math.comb(t + 2, 2) * q * q * (q - 1)
    assert has_triangle(g) is None
    assert has_kst(g, 2, 2 * t + 1) is None
    for i in range(t + 2):
        for j in range(i + 1, t + 2):
            assert has_kst(pl.bipartite_between(i, j).graph, 2, 2) is None


def test_multiplier_json_roundtrip():
    ms = find_multipliers(11, 2)
    back = MultiplierSet.from_json(ms.dumps())
    assert back == ms
    data = ms.to_json()
    assert set(data) == {"q", "t", "entries"}
    assert all(set(e) == {"i", "j", "m"} for e in data["entries"])


def test_projective_planes():
    h = projective_plane_incidence(2)
    assert len(h.U) == len(h.V) == 7 and h.m == 21
    assert girth(h.graph) == 6
    assert set(h.graph.degrees()) == {3}
    p3 = projective_plane_incidence(3)
    assert len(p3.U) == 13 and p3.m == 52
    with pytest.raises(FieldError):
        projective_plane_incidence(4)


def test_density_ratio():
    assert density_ratio(1) == pytest.approx(2 / math.sqrt(3))
    assert density_ratio(2) == pytest.approx(3 / math.sqrt(8))
    vals = [density_ratio(t) for t in range(1, 50)]
    assert all(a > b > 1 for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        density_ratio(0)
