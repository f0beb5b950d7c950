import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strategies import graphs, random_graph
from turanforge.constructions import build_gq
from turanforge.graph import Graph, complete_bipartite, complete_graph, from_edge_list
from turanforge.sparsereg import (IRREGULAR, REGULAR, ExceptionalOverflow, InvariantError,
                                  PairClassification, PairStatus, Partition, PartitionError,
                                  capped_energy, capped_energy_diagnostics, classify_pairs,
                                  cluster_graph, energy, energy_bound_check, energy_p,
                                  equitable_partition, phi, phi_literal, pair_restrict_params,
                                  pair_union_params, refine, sparse_regular_partition,
                                  spot_check_pair, validate_witness, witness_irregular)

K4_P = Partition.make([[0, 1], [2, 3]])


def test_energy_k4():
    assert energy(complete_graph(4), K4_P) == Fraction(1, 2)
    assert energy(complete_graph(4), K4_P, exact=False) == pytest.approx(0.5, abs=1e-15)


def test_energy_empty_graph():
    g = Graph(6, [0] * 6)
    assert energy(g, Partition.make([[0, 1], [2, 3], [4, 5]])) == 0


def test_energy_p_k4():
    P = Partition.make([[0, 1], [2, 3]], p=Fraction(1, 2))
    assert energy_p(complete_graph(4), P) == 2
    assert energy_p(complete_graph(4), K4_P) == energy(complete_graph(4), K4_P)


def test_energy_p_rejects_nonpositive_p():
    with pytest.raises(ValueError):
        energy_p(complete_graph(4), Partition.make([[0, 1], [2, 3]], p=0))


def test_invalid_partition_rejected():
    with pytest.raises(PartitionError):
        energy(complete_graph(4), Partition.make([[0, 1], [1, 2, 3]]))
    with pytest.raises(PartitionError):
        energy(complete_graph(4), Partition.make([[0, 1], [2]]))
    with pytest.raises(PartitionError):
        Partition.make([[0, 1], [2, 3, 4]]).validate(5, equitable=True)


def test_phi_continuity_and_cap_example():
    for L in (1, 2, Fraction(5, 2)):
        assert phi(2 * L, L) == 4 * L * L
        assert 4 * L * (2 * L - L) == 4 * L * L
        assert phi(4 * L, L) == 12 * L * L


def test_phi_literal_is_tangent_line():
    # the pointwise min reads as the tangent everywhere, negative below L
    assert phi_literal(Fraction(1, 2), 1) == -2
    assert phi_literal(3, 1) == 8


@given(st.fractions(min_value=0, max_value=50), st.integers(1, 6))
def test_phi_bounds(x, L):
    assert phi(x, L) <= x * x
    assert phi(x, L) <= 4 * L * x


def test_capped_equals_energy_p_below_cap():
    g = complete_graph(4)
    assert capped_energy(g, K4_P, 1) == energy_p(g, K4_P)


def test_capped_single_dense_pair():
    # d = 1, p = 1/8, so d_p = 8 = 4L with L = 2: contribution w * 12 L^2 per ordered pair
    g = complete_bipartite(2, 2)
    P = Partition.make([[0, 1], [2, 3]], p=Fraction(1, 8))
    w = Fraction(4, 16)
    assert capped_energy(g, P, 2) == 2 * w * 12 * 4


def test_capped_rejects_small_cap():
    with pytest.raises(ValueError):
        capped_energy(complete_graph(4), K4_P, Fraction(1, 2))


def test_capped_diagnostics_keys():
    d = capped_energy_diagnostics(complete_graph(4), K4_P, 1)
    assert set(d) == {"piecewise", "literal_min", "energy_p", "bound_8LC", "CL2"}
    assert d["piecewise"] <= d["energy_p"] + 1e-12
    assert d["piecewise"] <= d["bound_8LC"] + 1e-12


def _random_partition(rng, n, k):
    vs = list(range(n))
    rng.shuffle(vs)
    cuts = sorted(rng.sample(range(1, n), k - 1))
    return [vs[a:b] for a, b in zip([0] + cuts, cuts + [n])]


def _split(rng, parts):
    out = []
    for part in parts:
        if len(part) > 1 and rng.random() < 0.6:
            c = rng.randrange(1, len(part))
            out += [part[:c], part[c:]]
        else:
            out.append(part)
    return out


@pytest.mark.parametrize("seed", range(200))
def test_energy_monotone_under_refinement(seed):
    rng = random.Random(seed)
    n = rng.randrange(4, 24)
    g = random_graph(rng, n, rng.random())
    parts = _random_partition(rng, n, rng.randrange(2, min(n, 5) + 1))
    finer = _split(rng, parts)
    p = Fraction(rng.randrange(1, 11), 10)
    P, Q = Partition.make(parts, p=p), Partition.make(finer, p=p)
    assert energy(g, Q) >= energy(g, P)
    assert float(energy(g, Q, exact=False)) >= float(energy(g, P, exact=False)) - 1e-12
    for L in (1, 2):
        assert capped_energy(g, Q, L) >= capped_energy(g, P, L)


@given(graphs(4, 10), st.integers(1, 10), st.randoms(use_true_random=False))
def test_energy_p_identity(g, pn, rnd):
    p = Fraction(pn, 10)
    P = Partition.make(_random_partition(rnd, g.n, 2), p=p)
    assert energy_p(g, P) == energy(g, P) / (p * p)
    assert capped_energy(g, P, 1) <= energy_p(g, P)
    assert capped_energy(g, P, 1) <= 8 * Fraction(g.m) / (p * g.n * g.n)


def test_equitable_partition():
    P = equitable_partition(10, Fraction(1, 4))
    P.validate(10, equitable=True)
    assert P.k == 4 and P.exceptional == (8, 9)
    P = equitable_partition(11, Fraction(1, 4))
    P.validate(11, equitable=True)
    assert P.k >= 4 and len(P.exceptional) <= 11 / 4
    with pytest.raises(PartitionError):
        equitable_partition(3, Fraction(1, 4))


# -- witnesses ----------------------------------------------------------------

def _matching(m):
    return from_edge_list(2 * m, [(i, m + i) for i in range(m)])


def test_witness_complete_pair_regular():
    g = complete_bipartite(5, 5)
    for eps in (0.1, 0.3, 0.45):
        st_ = witness_irregular(g, range(5), range(5, 10), eps, 1)
        assert st_.status == REGULAR and st_.d_p == 1


def test_witness_empty_pair_regular():
    g = Graph(10, [0] * 10)
    assert witness_irregular(g, range(5), range(5, 10), 0.2, 1).status == REGULAR


def test_witness_matching_irregular():
    # single-vertex subsets are admissible only when eps <= 1/m
    m = 2
    g = _matching(m)
    X, Y = list(range(m)), list(range(m, 2 * m))
    st_ = witness_irregular(g, X, Y, Fraction(2, 5), 1)
    assert st_.status == IRREGULAR
    assert validate_witness(g, X, Y, st_, Fraction(2, 5), 1)
    assert len(st_.wx) >= Fraction(2, 5) * m
    # larger matchings have sub-densities within eps of the pair density
    assert witness_irregular(_matching(6), range(6), range(6, 12), Fraction(2, 5), 1).status == REGULAR


def test_witness_rejects_overlap():
    with pytest.raises(PartitionError):
        witness_irregular(complete_graph(4), [0, 1], [1, 2], 0.2, 1)


def test_validate_witness_rejects_forgery():
    g = complete_bipartite(4, 4)
    fake = PairStatus(Fraction(1), IRREGULAR, (0, 1), (4, 5))
    assert not validate_witness(g, range(4), range(4, 8), fake, Fraction(1, 4), 1)


@pytest.mark.parametrize("seed", range(10))
def test_classified_witnesses_revalidate(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 40, 0.3)
    P = equitable_partition(40, Fraction(1, 5), p=Fraction(3, 10))
    cls = classify_pairs(g, P, budget=50, seed=seed)
    for (i, j), st_ in cls.pairs.items():
        assert validate_witness(g, P.parts[i], P.parts[j], st_, P.epsilon, P.p)


def test_classify_thread_independent():
    rng = random.Random(4)
    g = random_graph(rng, 50, 0.2)
    P = equitable_partition(50, Fraction(1, 5), p=Fraction(1, 5))
    a = classify_pairs(g, P, budget=40, seed=9, threads=1)
    b = classify_pairs(g, P, budget=40, seed=9, threads=4)
    assert a.pairs == b.pairs


# -- refinement ---------------------------------------------------------------

def test_refine_no_irregular_unchanged():
    P = equitable_partition(12, Fraction(1, 4))
    cls = PairClassification({(i, j): PairStatus(Fraction(0), REGULAR)
                              for i in range(P.k) for j in range(i + 1, P.k)})
    assert refine(P, cls) is P


def test_refine_two_atoms():
    P = Partition.make([[0, 1, 2, 3], [4, 5, 6, 7]], epsilon=Fraction(1, 4))
    cls = PairClassification({(0, 1): PairStatus(Fraction(1, 2), IRREGULAR, (0, 1), (4, 5))})
    Q = refine(P, cls)
    Q.validate(8, equitable=True)
    assert sorted(Q.parts) == [(0, 1), (2, 3), (4, 5), (6, 7)]


def test_refine_requires_witness():
    P = Partition.make([[0, 1], [2, 3]])
    cls = PairClassification({(0, 1): PairStatus(Fraction(1), IRREGULAR)})
    with pytest.raises(PartitionError):
        refine(P, cls)


def test_refine_overflow():
    # atoms of coprime sizes 7 and 13, a full exceptional set, and a part cap of 20
    P = Partition.make([range(20), range(20, 40)], range(40, 50), epsilon=Fraction(1, 5))
    cls = PairClassification({(0, 1): PairStatus(Fraction(1), IRREGULAR, tuple(range(7)),
                                                 tuple(range(20, 27)))})
    with pytest.raises(ExceptionalOverflow):
        refine(P, cls)


# -- engine -------------------------------------------------------------------

def test_complete_bipartite_converges_round_one():
    m = 10
    g = complete_bipartite(m, m)
    r = sparse_regular_partition(g, Fraction(1, 10), 1, initial=[range(0, 5), range(5, 10),
                                                              range(10, 15), range(15, 20)])
    assert r.converged and r.rounds == 1
    R = cluster_graph(g, r.partition, r.classification, Fraction(1, 2))
    assert sorted(R.edges) == [(0, 2), (0, 3), (1, 2), (1, 3)]
    assert R.degrees == [2, 2, 2, 2]


def test_cluster_graph_extremes():
    g = complete_bipartite(4, 4)
    P = Partition.make([[0, 1], [2, 3], [4, 5], [6, 7]])
    cls = classify_pairs(g, P)
    assert cluster_graph(g, P, cls, 2).edges == []
    full = PairClassification({k: PairStatus(v.d_p, REGULAR) for k, v in cls.pairs.items()})
    assert len(cluster_graph(g, P, full, 0).edges) == 6
    with pytest.raises(PartitionError):
        cluster_graph(g, P, PairClassification({}), 0)


def test_engine_preconditions():
    g = complete_graph(3)
    with pytest.raises(PartitionError):
        sparse_regular_partition(g, Fraction(1, 4), 1)
    with pytest.raises(ValueError):
        sparse_regular_partition(complete_graph(10), Fraction(1, 2), 1)
    with pytest.raises(ValueError):
        sparse_regular_partition(complete_graph(10), Fraction(1, 4), 0)


@pytest.mark.parametrize("seed", range(6))
def test_random_graph_regular_at_quarter(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 40, 0.3)
    r = sparse_regular_partition(g, Fraction(1, 4), Fraction(3, 10), seed=seed, max_rounds=4)
    assert r.converged
    assert all(b >= a for a, b in zip(r.trace, r.trace[1:]))


def test_engine_threads_identical():
    rng = random.Random(11)
    g = random_graph(rng, 48, 0.25)
    a = sparse_regular_partition(g, Fraction(1, 5), Fraction(1, 4), seed=2, permute=True)
    b = sparse_regular_partition(g, Fraction(1, 5), Fraction(1, 4), seed=2, permute=True,
                                 threads=4)
    assert a.partition == b.partition and a.trace == b.trace
    assert a.classification.pairs == b.classification.pairs


# -- parameter algebra -------------------------------------------------------------

def test_pair_union_params():
    assert pair_union_params((0.1, 0.5), (0.1, 0.5)) == (Fraction(1, 10), Fraction(1, 2))
    assert pair_union_params((0.1, 0.6), (0.2, 0.5)) == (Fraction(1, 5), Fraction(1, 2))


def test_pair_restrict_params():
    assert pair_restrict_params(0.1, 0.5, 0.5) == (Fraction(3, 10), Fraction(2, 5))
    with pytest.raises(ValueError):
        pair_restrict_params(0.1, 0.5, 0.05)


def test_spot_check_pair():
    g = complete_bipartite(6, 6)
    r = spot_check_pair(g, range(6), range(6, 9), 0.3, 1, 0.4)
    assert r["status"] == REGULAR and r["density_ok"]


# -- energy bound for K_{s,t}-free graphs --------------------------------------

def _balanced(n, k):
    size = n // k
    return Partition.make([range(i * size, (i + 1) * size) for i in range(k)],
                          range(k * size, n))


@pytest.mark.parametrize("q,k", [(5, 2), (11, 2), (11, 3), (17, 2), (17, 3)])
def test_energy_bound_on_gq(q, k):
    g = build_gq(q).graph
    rng = np.random.default_rng(q * 10 + k)
    order = rng.permutation(g.n).tolist()
    size = g.n // k
    P = Partition.make([order[i * size:(i + 1) * size] for i in range(k)], order[k * size:])
    rep = energy_bound_check(g, P, 2, 3)
    assert rep.applicable, rep.reason
    assert rep.holds and rep.energy_p <= 13


def test_energy_bound_gq5_three_parts_inapplicable():
    # parts of 25 fall below 4 sqrt(75)
    rep = energy_bound_check(build_gq(5).graph, _balanced(75, 3), 2, 3)
    assert not rep.applicable and rep.holds is None


def test_energy_bound_small_part():
    g = build_gq(5).graph
    P = Partition.make([[0], list(range(1, 75))])
    assert not energy_bound_check(g, P, 2, 3).applicable


def test_energy_bound_empty_graph():
    g = Graph(64, [0] * 64)
    rep = energy_bound_check(g, _balanced(64, 2), 2, 3)
    assert rep.applicable and rep.holds and rep.energy_p == 0


def test_energy_bound_reports_containment():
    rep = energy_bound_check(complete_graph(64), _balanced(64, 2), 2, 3)
    assert not rep.applicable and "K_{2,3}" in rep.reason
