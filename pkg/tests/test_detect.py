import itertools
import random

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st
from networkx.algorithms.isomorphism import GraphMatcher

from strategies import bipartite_graphs, graphs
from turanforge.constructions import build_gq, projective_plane_incidence
from turanforge.detect import (INFINITE, Book, CompleteBipartite, Cycle, ForbiddenFamily,
                               OddCycle, PatternError, Triangle, count_c4, count_c4_bipartite,
                               count_triangles, find_pattern, girth, has_book, has_cycle_length,
                               has_kst, has_triangle, is_family_free, odd_girth,
                               parse_pattern, triangles_through)
from turanforge.graph import (BipartiteGraph, complete_bipartite, complete_graph, cycle_graph,
                              from_edge_list, petersen_graph)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges())
    return h


def contains(g, pattern_edges) -> bool:
    p = nx.Graph(pattern_edges)
    return GraphMatcher(to_nx(g), p).subgraph_is_monomorphic()


def book_edges(t):
    edges = [("x", "y")]
    for i in range(t):
        edges += [(f"a{i}", "y"), (f"b{i}", "x"), (f"a{i}", f"b{i}")]
    return edges


def kst_edges(s, t):
    return [(f"s{i}", f"t{j}") for i in range(s) for j in range(t)]


def naive_c4(g):
    count = 0
    for quad in itertools.combinations(range(g.n), 4):
        a, b, c, d = quad
        for cyc in ((a, b, c, d), (a, b, d, c), (a, c, b, d)):
            if all(g.has_edge(cyc[i], cyc[(i + 1) % 4]) for i in range(4)):
                count += 1
    return count


# -- parsing --------------------------------------------------------------------

def test_parse_family():
    fam = ForbiddenFamily.parse("triangle,c5,k{3,2},b3,oddc7")
    assert fam.patterns == (Triangle(), Cycle(5), CompleteBipartite(2, 3), Book(3), OddCycle(7))
    assert str(fam) == "triangle,c5,k{2,3},b3,oddc7"
    assert parse_pattern("C3") == Triangle()


@pytest.mark.parametrize("tok", ["c2", "k{0,3}", "b0", "oddc1", "hexagon", "k{2}"])
def test_parse_rejects(tok):
    with pytest.raises(PatternError):
        parse_pattern(tok)


# -- triangles ------------------------------------------------------------------

def test_triangle_examples():
    k4 = complete_graph(4)
    assert count_triangles(k4) == 4
    assert [triangles_through(k4, v) for v in range(4)] == [3, 3, 3, 3]
    assert has_triangle(k4).vertices == (0, 1, 2)
    assert has_triangle(build_gq(5).graph) is None
    assert has_triangle(cycle_graph(6)) is None


@given(graphs(max_n=9))
def test_triangle_counts_consistent(g):
    t = count_triangles(g)
    assert 3 * t == sum(triangles_through(g, v) for v in range(g.n))
    naive = sum(1 for a, b, c in itertools.combinations(range(g.n), 3)
                if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c))
    assert t == naive
    w = has_triangle(g)
    assert (w is None) == (t == 0)
    if w:
        assert w.validate(g)


# -- cycles ---------------------------------------------------------------------

def test_girth_examples():
    assert girth(petersen_graph()) == 5
    assert girth(projective_plane_incidence(2).graph) == 6
    assert odd_girth(complete_bipartite(3, 3)) == INFINITE
    assert girth(from_edge_list(4, [(0, 1), (1, 2)])) == INFINITE
    assert odd_girth(petersen_graph()) == 5


@given(graphs(max_n=8))
def test_girth_matches_networkx(g):
    h = to_nx(g)
    basis = nx.minimum_cycle_basis(h)
    expect = min((len(c) for c in basis), default=INFINITE)
    assert girth(g) == expect


@given(graphs(min_n=3, max_n=8), st.integers(3, 8))
def test_cycle_length_matches_oracle(g, k):
    w = has_cycle_length(g, k)
    expect = contains(g, [(i, (i + 1) % k) for i in range(k)]) if k <= g.n else False
    assert (w is not None) == expect
    if w is not None:
        assert w.validate(g) and len(w.vertices) == k


@given(graphs(min_n=3, max_n=8))
def test_odd_girth_matches_cycle_search(g):
    og = odd_girth(g)
    lengths = [k for k in range(3, g.n + 1, 2) if has_cycle_length(g, k)]
    assert og == (min(lengths) if lengths else INFINITE)
    assert (og == INFINITE) == nx.is_bipartite(to_nx(g))


# -- complete bipartite and books -------------------------------------------------

def test_kst_examples():
    assert has_kst(complete_bipartite(2, 3), 2, 3) is not None
    assert has_kst(build_gq(5).graph, 2, 3) is None
    assert has_kst(cycle_graph(6), 2, 2) is None
    with pytest.raises(PatternError):
        has_kst(complete_graph(5), 4, 4)
    assert has_kst(complete_graph(8), 4, 4, allow_large=True) is not None


@given(graphs(min_n=2, max_n=8), st.sampled_from([(1, 3), (2, 2), (2, 3), (3, 3), (2, 4)]))
def test_kst_matches_oracle(g, st_):
    s, t = st_
    w = has_kst(g, s, t)
    assert (w is not None) == contains(g, kst_edges(s, t))
    if w is not None:
        assert w.validate(g)


def test_book_examples():
    assert has_book(cycle_graph(4), 1) is not None
    assert has_book(complete_graph(4), 2) is None
    assert has_book(complete_graph(6), 2) is not None


@given(graphs(min_n=4, max_n=8), st.integers(1, 3))
def test_book_matches_oracle(g, t):
    w = has_book(g, t)
    assert (w is not None) == contains(g, book_edges(t))
    if w is not None:
        assert w.validate(g)


def test_book_on_gq_subgraphs_matches_oracle():
    g = build_gq(5).graph
    rng = random.Random(7)
    for _ in range(15):
        v = rng.randrange(g.n)
        ball = [v] + g.neighbors(v)
        rest = [u for u in range(g.n) if u not in ball]
        sub = g.induced(sorted(ball + rng.sample(rest, 12 - len(ball))))
        for t in (1, 2, 3):
            assert (has_book(sub, t) is not None) == contains(sub, book_edges(t))


@given(graphs(min_n=4, max_n=8))
def test_book_one_iff_four_cycle(g):
    assert (has_book(g, 1) is not None) == (has_cycle_length(g, 4) is not None)


# -- 4-cycles -------------------------------------------------------------------

def test_c4_examples():
    assert count_c4(complete_bipartite(3, 3)) == 9
    assert count_c4(cycle_graph(4)) == 1
    assert count_c4(cycle_graph(5)) == 0


@given(graphs(max_n=8))
def test_c4_matches_naive(g):
    c = count_c4(g)
    assert c == naive_c4(g)
    assert (has_kst(g, 2, 2) is not None) == (c > 0)


@given(bipartite_graphs())
def test_c4_bipartite_sides_agree(data):
    m, n, g = data
    b = BipartiteGraph(tuple(range(m)), tuple(range(m, m + n)), g)
    assert count_c4_bipartite(b, "U") == count_c4_bipartite(b, "V") == count_c4(g)


# -- families -------------------------------------------------------------------

def test_family_examples():
    free, w = is_family_free(build_gq(5).graph, ForbiddenFamily.parse("triangle,k{2,3}"))
    assert free and w is None
    free, w = is_family_free(complete_graph(4), ForbiddenFamily.parse("triangle"))
    assert not free and w.kind == Triangle() and w.validate(complete_graph(4))
    assert is_family_free(cycle_graph(5), ForbiddenFamily.parse("c4,c6"))[0]


def test_odd_cycle_family():
    fam = ForbiddenFamily.parse("oddc5")
    assert not is_family_free(cycle_graph(5), fam)[0]
    assert is_family_free(cycle_graph(7), fam)[0]
    w = find_pattern(petersen_graph(), OddCycle(7))
    assert w is not None and len(w.vertices) == 5 and w.validate(petersen_graph())


def test_witness_json():
    w = has_triangle(complete_graph(3))
    assert w.to_json() == {"kind": "triangle", "vertices": [0, 1, 2]}
