"""Matroid oracles, minors, polytope routines, GF(2) linear algebra."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ocrskit.linalg import (det_rational, feasible_nonneg_solution, gf2_basis,
                            gf2_in_span, gf2_nullspace, gf2_rank,
                            solve_rational)
from ocrskit.matroids import (BinaryMatroid, CographicMatroid, GraphicMatroid,
                              LaminarMatroid, MatroidError, Multigraph,
                              TransversalMatroid, UniformMatroid,
                              complete_graph, load_bipartite, load_binary,
                              load_graph, load_laminar, standard_r10)
from ocrskit.polytope import (decompose_point, density, in_scaled_polytope,
                              polytope_violation, verify_decomposition)


def brute_rank(M, subset):
    subset = list(subset)
    best = 0
    for r in range(len(subset), 0, -1):
        for I in itertools.combinations(subset, r):
            if M.is_independent(I):
                return r
    return best


def exchange_axiom_holds(M):
    """Rank submodularity + monotonicity + unit increments on all subsets."""
    E = list(M.elements)
    subsets = [set(c) for r in range(len(E) + 1)
               for c in itertools.combinations(E, r)]
    rank = {frozenset(S): M.rank(S) for S in subsets}
    for S in subsets:
        for e in E:
            if e in S:
                continue
            up = rank[frozenset(S | {e})]
            if not rank[frozenset(S)] <= up <= rank[frozenset(S)] + 1:
                return False
    for A in subsets:
        for B in subsets:
            if rank[frozenset(A | B)] + rank[frozenset(A & B)] > \
                    rank[frozenset(A)] + rank[frozenset(B)]:
                return False
    return True


# ---------------------------------------------------------------------------
# concrete classes
# ---------------------------------------------------------------------------

def test_uniform_matroid():
    U = UniformMatroid(range(5), 2)
    assert U.rank(range(5)) == 2
    assert U.is_independent([0, 1]) and not U.is_independent([0, 1, 2])
    assert exchange_axiom_holds(U)


def test_graphic_k4():
    M = GraphicMatroid(complete_graph(4))
    assert M.full_rank() == 3
    assert M.is_circuit({0, 1, 3})          # triangle 01-02-12
    assert not M.is_independent({0, 1, 2, 3})
    assert M.in_span({0, 1}, 3)
    assert exchange_axiom_holds(M)


def test_graphic_parallel_and_contraction():
    G = Multigraph({0: (0, 1), 1: (0, 1), 2: (1, 2)})
    M = GraphicMatroid(G)
    assert sorted(map(sorted, M.parallel_classes())) == [[0, 1], [2]]
    Mc = M.contract_restrict(contract=[2], keep=[0, 1])
    assert Mc.rank({0, 1}) == 1


def test_cographic_k4_matches_dual_rank():
    G = complete_graph(4)
    M = CographicMatroid(G)
    MG = GraphicMatroid(G)
    n = len(G.edges)
    for r in range(4):
        for S in itertools.combinations(range(n), r):
            co = set(range(n)) - set(S)
            want = len(S) + MG.rank(co) - MG.full_rank()
            assert M.rank(S) == want
    assert exchange_axiom_holds(M)


def test_cographic_rejects_bridge():
    G = Multigraph({0: (0, 1), 1: (1, 2), 2: (1, 2)})
    with pytest.raises(MatroidError):
        CographicMatroid(G)


def test_laminar_rank():
    M = LaminarMatroid([(range(6), 3), ({0, 1, 2}, 2), ({0, 1}, 1)])
    assert M.rank({0, 1}) == 1
    assert M.rank({0, 1, 2}) == 2
    assert M.rank(range(6)) == 3
    assert M.is_independent({0, 2, 5})
    assert not M.is_independent({0, 1})
    assert exchange_axiom_holds(M)


def test_laminar_rejects_crossing_sets():
    with pytest.raises(MatroidError):
        LaminarMatroid([({0, 1}, 1), ({1, 2}, 1)])


def test_transversal_rank_is_max_matching():
    M = TransversalMatroid({0: [0, 1], 1: [0], 2: [1], 3: [0, 1, 2]})
    assert M.rank({0, 1, 2, 3}) == 3
    assert M.rank({0, 1}) == 2
    # Hall violation: {0,1,2} only reaches right vertices {0,1}
    assert M.rank({0, 1, 2}) == 2
    assert M.is_independent({0, 1, 3})
    assert exchange_axiom_holds(M)


def test_binary_matroid_rank():
    M = BinaryMatroid({0: 0b01, 1: 0b10, 2: 0b11}, nrows=2)
    assert M.full_rank() == 2
    assert M.is_circuit({0, 1, 2})
    assert exchange_axiom_holds(M)


def test_minor_rank_identity():
    M = GraphicMatroid(complete_graph(4))
    minor = M.minor(contract=[0], delete=[5])
    for r in range(5):
        for S in itertools.combinations([1, 2, 3, 4], r):
            assert minor.rank(S) == M.rank(set(S) | {0}) - M.rank({0})


def test_r10_properties():
    R10 = standard_r10()
    assert len(list(R10.elements)) == 10
    assert R10.full_rank() == 5
    # every element is in a 4-element circuit complementwise; density is 2
    assert density(R10) == 2
    # single-element deletions stay rank 5 (no coloops)
    for e in range(10):
        assert R10.rank(set(range(10)) - {e}) == 5


# ---------------------------------------------------------------------------
# consistency of rank oracles against brute force
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: GraphicMatroid(complete_graph(4)),
    lambda: CographicMatroid(complete_graph(4)),
    lambda: LaminarMatroid([(range(5), 3), ({0, 1}, 1)]),
    lambda: TransversalMatroid({0: [0], 1: [0, 1], 2: [1, 2], 3: [2]}),
    lambda: BinaryMatroid({0: 0b011, 1: 0b101, 2: 0b110, 3: 0b111}, nrows=3),
])
def test_rank_equals_bruteforce(make):
    M = make()
    E = list(M.elements)
    for r in range(len(E) + 1):
        for S in itertools.combinations(E, r):
            assert M.rank(S) == brute_rank(M, S)


# ---------------------------------------------------------------------------
# multigraph utilities
# ---------------------------------------------------------------------------

def test_multigraph_components_and_bridges():
    G = Multigraph({0: (0, 1), 1: (1, 2), 2: (0, 2), 3: (3, 4)})
    assert len(G.components()) == 2
    assert not G.is_bridgeless()        # edge 3 is a bridge
    assert Multigraph({0: (0, 1), 1: (0, 1)}).is_bridgeless()


def test_contract_edges_merges_endpoints():
    G = complete_graph(4)
    H = G.contract_edges([0])            # contract edge (0,1)
    assert H.graphic_rank(H.edges) == 2


# ---------------------------------------------------------------------------
# polytope routines
# ---------------------------------------------------------------------------

def test_density_values():
    assert density(GraphicMatroid(complete_graph(4))) == 2
    assert density(GraphicMatroid(complete_graph(5))) == Fraction(5, 2)
    tri = GraphicMatroid(Multigraph({0: (0, 1), 1: (1, 2), 2: (0, 2)}))
    assert density(tri) == Fraction(3, 2)


def test_polytope_violation_witness():
    M = GraphicMatroid(complete_graph(4))
    ok = {e: Fraction(1, 2) for e in range(6)}   # exactly on the K4 boundary
    assert polytope_violation(M, ok) is None
    assert in_scaled_polytope(M, ok)
    bad = {e: Fraction(3, 5) for e in range(6)}
    wit = polytope_violation(M, bad)
    assert wit is not None and sum(bad[e] for e in wit) > M.rank(wit)


def test_decompose_point_convex_combination():
    M = GraphicMatroid(complete_graph(4))
    y = {e: Fraction(1, 2) for e in range(6)}
    combo = decompose_point(M, y)
    assert verify_decomposition(M, y, combo)
    assert sum(w for _, w in combo) == 1
    for I, _ in combo:
        assert M.is_independent(I)


def test_decompose_point_r10_half():
    R10 = standard_r10()
    y = {e: Fraction(1, 2) for e in range(10)}
    combo = decompose_point(R10, y)
    assert verify_decomposition(R10, y, combo)


# ---------------------------------------------------------------------------
# GF(2) + rational linear algebra
# ---------------------------------------------------------------------------

def test_gf2_rank_and_span():
    vecs = [0b110, 0b011]
    assert gf2_rank(vecs) == 2
    assert gf2_in_span(vecs, 0b101)
    assert not gf2_in_span(vecs, 0b001)
    assert len(gf2_basis([0b110, 0b011, 0b101])) == 2


def test_gf2_nullspace_orthogonality():
    rows = [0b1001, 0b0101, 0b0011]
    null = gf2_nullspace(rows, 4)
    assert null == [0b1111]
    for v in null:
        for r in rows:
            assert bin(v & r).count("1") % 2 == 0


def test_solve_rational_and_det():
    A = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    x = solve_rational(A, [Fraction(5), Fraction(10)])
    assert x == [Fraction(1), Fraction(3)]
    assert det_rational(A) == 5


def test_feasible_nonneg_solution():
    A = [[Fraction(1), Fraction(1)]]
    sol = feasible_nonneg_solution(A, [Fraction(1)])
    assert sol is not None and all(v >= 0 for v in sol)
    assert sum(a * v for a, v in zip(A[0], sol)) == 1


# ---------------------------------------------------------------------------
# file loaders
# ---------------------------------------------------------------------------

def test_load_graph_roundtrip():
    G = load_graph("graph 3 3\n0 1\n1 2\n0 2\n")
    assert G.edges == {0: (0, 1), 1: (1, 2), 2: (0, 2)}


def test_load_laminar():
    M = load_laminar("cap 2 : 0 1 2 3\ncap 1 : 0 1\n")
    assert M.rank({0, 1}) == 1
    assert M.rank({0, 1, 2, 3}) == 2


def test_load_bipartite():
    M = load_bipartite("bipartite 2 2\n0 0\n1 0\n1 1\n")
    assert M.rank({0, 1}) == 2


def test_load_binary_with_columns():
    M = load_binary("binary 3 4\ncolumns 0 1 3 4\n1 0 0 1\n0 1 0 1\n0 0 1 1\n")
    assert sorted(M.elements) == [0, 1, 3, 4]
    assert M.full_rank() == 3
    assert M.is_circuit({0, 1, 3, 4})


def test_load_graph_rejects_malformed():
    with pytest.raises(MatroidError):
        load_graph("graph 3\n0 1\n")
