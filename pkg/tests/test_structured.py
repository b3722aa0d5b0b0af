"""Graphic, laminar, low-density, cographic and transversal schemes."""

from fractions import Fraction

import numpy as np
import pytest

from ocrskit.distributions import (ExplicitSubsetDist, ProductDist,
                                   kn_cycle_dist, twise_symmetric)
from ocrskit.harness import scale_wrapper, selectability
from ocrskit.matroids import (LaminarMatroid, MatroidError, Multigraph,
                              TransversalMatroid, complete_graph,
                              standard_r10)
from ocrskit.structured import (cographic_prepare, graphic_chain_prepare,
                                laminar_guarantee_constant, laminar_prepare,
                                low_density_prepare, round_laminar,
                                transversal_flow, transversal_prepare)

K4 = complete_graph(4)


# ---------------------------------------------------------------------------
# graphic chain
# ---------------------------------------------------------------------------

def test_chain_k4_single_level():
    b = Fraction(1, 4)
    D = ProductDist({e: b / 2 for e in range(6)})   # b/density, so one level
    gs = graphic_chain_prepare(K4, D, b)
    assert gs.slices == [frozenset(range(6))]
    assert (gs.b, gs.c) == (b, Fraction(1, 2))


def test_chain_k4_exact_minimum():
    b = Fraction(1, 4)
    D = ProductDist({e: b / 2 for e in range(6)})
    rep = selectability(graphic_chain_prepare(K4, D, b), D.to_explicit(),
                        mode="exact")
    assert rep.minimum == Fraction(15827, 16384)
    assert rep.ok and rep.minimum >= 1 - 2 * b


def test_chain_certificate_matches_bruteforce():
    b = Fraction(1, 4)
    D = ProductDist({e: b / 2 for e in range(6)}).to_explicit()
    fam = graphic_chain_prepare(K4, D, b).family
    for S in D.support():
        for e in S:
            assert fam.selectable(e, S) == fam.selectable_bruteforce(e, S)


def test_chain_stalls_outside_polytope():
    # the n-cycle profile puts mass on spanning circuits of K5: at b < 1/2
    # every edge spans with conditional probability 1 > 2b
    with pytest.raises(MatroidError, match="stalled"):
        graphic_chain_prepare(complete_graph(5), kn_cycle_dist(5),
                              Fraction(2, 5))


def test_chain_rejects_bad_rate():
    D = ProductDist({e: Fraction(1, 8) for e in range(6)})
    with pytest.raises(ValueError):
        graphic_chain_prepare(K4, D, Fraction(1, 2))


def test_chain_subsampled_from_full_marginals():
    # keep = b turns x = 1/2 into x = b/2 = b/density; the wrapped scheme
    # has b = 1 and c = keep * (1 - 2 keep) = 1/8
    b = Fraction(1, 4)
    wrapped = scale_wrapper(lambda Dt: graphic_chain_prepare(K4, Dt, b), b)
    Dfull = ProductDist({e: Fraction(1, 2) for e in range(6)})
    ws = wrapped(Dfull)
    assert (ws.b, ws.c) == (1, Fraction(1, 8))
    rep = selectability(ws, Dfull.to_explicit(), mode="exact")
    assert rep.minimum == Fraction(15827, 65536)
    assert rep.minimum == Fraction(15827, 16384) * b   # exact factorization
    assert rep.ok


# ---------------------------------------------------------------------------
# laminar rounding + composite
# ---------------------------------------------------------------------------

def test_round_laminar_frozen():
    M = LaminarMatroid([(range(6), 5), ({0, 1, 2}, 3), ({0, 1}, 3)])
    rl = round_laminar(M)
    assert [(sorted(s), c) for s, c in rl.constraints] == \
        [([0, 1, 2], 2), ([0, 1, 2, 3, 4, 5], 4)]
    assert [(sorted(s), c) for s, c in rl.dropped] == [([0, 1], 2)]


def test_round_laminar_strictly_increasing_powers():
    M = LaminarMatroid([(range(8), 7), ({0, 1, 2, 3}, 3), ({0, 1}, 2),
                        ({5, 6}, 1)])
    rl = round_laminar(M)
    for s, c in rl.constraints:
        assert c & (c - 1) == 0            # power of two
    chains = sorted((len(s), c) for s, c in rl.constraints)
    caps = [c for _, c in chains]
    assert caps == sorted(set(caps))


def test_round_laminar_adds_root():
    M = LaminarMatroid([({0, 1}, 1)], elements=range(4))
    rl = round_laminar(M)
    assert rl.added_root
    assert any(s == frozenset(range(4)) for s, _ in rl.constraints)


def test_laminar_instance_guarantee_exact():
    M = LaminarMatroid([(range(6), 5), ({0, 1, 2}, 3), ({0, 1}, 3)])
    D = ProductDist({i: Fraction(1, 50) for i in range(6)})
    ls = laminar_prepare(M, D)
    # per-constraint Markov failures: (3/50)/2 + (6/50)/4 = 3/50
    assert ls.c == Fraction(47, 50)
    rep = selectability(ls, D.to_explicit(), mode="exact")
    assert rep.minimum >= ls.c
    fam = ls.family
    for S in D.to_explicit().support():
        for e in S:
            assert fam.selectable(e, S) == fam.selectable_bruteforce(e, S)


def test_laminar_rejects_overloaded_constraint():
    M = LaminarMatroid([(range(4), 1)])
    D = ProductDist({i: Fraction(1, 5) for i in range(4)})
    with pytest.raises(MatroidError, match="exceeds"):
        laminar_prepare(M, D)


def test_laminar_universal_constant():
    c = laminar_guarantee_constant()
    assert abs(c - 0.37580647087484403) < 1e-12
    assert c >= 1 / 2.661
    direct = (1 - 13 * Fraction(1, 25)
              - (24 / 25) ** -1.5 * 2 ** -6.5 * 3 * 3 ** 0.5 / (2 - 2 ** 0.5))
    assert abs(c - float(direct)) < 1e-9


def test_laminar_fixture_guarantee():
    from ocrskit.fixtures import fixture_laminar, laminar24_dist
    ls = laminar_prepare(fixture_laminar(), laminar24_dist())
    assert ls.c == Fraction(18, 25)


# ---------------------------------------------------------------------------
# low density
# ---------------------------------------------------------------------------

def test_low_density_r10_exact_half():
    ld = low_density_prepare(standard_r10())
    assert (ld.gamma, ld.c) == (2, Fraction(1, 2))
    rep = selectability(ld, twise_symmetric(10, 2).to_explicit(),
                        mode="exact")
    assert {s.estimate for s in rep.stats} == {Fraction(1, 2)}


def test_low_density_is_distribution_free():
    # same exact selectability under a very different profile
    ld = low_density_prepare(standard_r10())
    D = ProductDist({i: Fraction(1, 3) for i in range(10)})
    rep = selectability(ld, D.to_explicit(), mode="exact")
    assert {s.estimate for s in rep.stats} == {Fraction(1, 2)}


# ---------------------------------------------------------------------------
# cographic
# ---------------------------------------------------------------------------

def test_cographic_k4_parameters():
    cg = cographic_prepare(K4, None, Fraction(1, 2))
    assert cg.gamma == 2
    assert cg.c == Fraction(1, 4)
    assert all(len(cls) == 1 for cls in cg.classes)


def test_cographic_k4_exact_minimum():
    cg = cographic_prepare(K4, None, Fraction(1, 2))
    rep = selectability(cg, twise_symmetric(6, 2).to_explicit(), mode="exact")
    assert rep.minimum == Fraction(1, 2)
    assert rep.minimum >= Fraction(1, 6)   # (1-b)/3


def test_cographic_two_cut_classes():
    # two triangles joined by a doubled edge: edges 6,7 form a 2-edge cut,
    # hence a parallel class of the bond matroid
    tt = Multigraph({0: (0, 1), 1: (1, 2), 2: (0, 2), 3: (3, 4), 4: (4, 5),
                     5: (3, 5), 6: (2, 3), 7: (2, 3)})
    cg = cographic_prepare(tt, None, Fraction(1, 2))
    assert sorted(sorted(c) for c in cg.classes) == \
        [[0, 1, 2], [3, 4, 5], [6, 7]]
    assert cg.gamma == 1
    assert cg.c == Fraction(1, 2)


def test_cographic_rejects_bridge():
    path = Multigraph({0: (0, 1), 1: (1, 2)})
    with pytest.raises(MatroidError, match="bridge"):
        cographic_prepare(path, None)


# ---------------------------------------------------------------------------
# transversal
# ---------------------------------------------------------------------------

TM = TransversalMatroid({0: [0, 1], 1: [0], 2: [1], 3: [0, 1, 2]})
X4 = {i: Fraction(1, 4) for i in range(4)}


def test_transversal_flow_feasible():
    fl = transversal_flow(TM, X4, Fraction(1, 2))
    assert fl.feasible and fl.value == 1
    for e, dist in fl.y.items():
        assert sum(dist.values()) == 1
        assert set(dist) <= set(TM.neighbors[e])


def test_transversal_exact_minimum():
    D = ProductDist(X4)
    ts = transversal_prepare(TM, D, Fraction(1, 2))
    rep = selectability(ts, D.to_explicit(), mode="exact")
    assert rep.minimum == Fraction(3, 4)
    assert rep.minimum >= 1 - Fraction(1, 2)


def test_transversal_single_realization_here():
    # every element routes all its mass through one label in this instance
    ts = transversal_prepare(TM, ProductDist(X4), Fraction(1, 2))
    fams = ts.realizations()
    assert len(fams) == 1
    assert sum(p for _, p in fams) == 1


def test_transversal_label_certificate():
    D = ProductDist(X4).to_explicit()
    ts = transversal_prepare(TM, ProductDist(X4), Fraction(1, 2))
    for fam, _ in ts.realizations():
        for S in D.support():
            for e in S:
                assert fam.selectable(e, S) == fam.selectable_bruteforce(e, S)


def test_transversal_infeasible_witness():
    bad = {0: Fraction(3, 5), 1: Fraction(3, 5), 2: Fraction(1, 4),
           3: Fraction(1, 4)}
    fl = transversal_flow(TM, bad, Fraction(1, 2), allow_shortfall=True)
    assert not fl.feasible
    assert sorted(fl.violation) == [0, 1, 2]
    # the witness really violates the scaled rank constraint
    assert sum(bad[e] for e in fl.violation) > \
        Fraction(1, 2) * TM.rank(fl.violation)


def test_transversal_infeasible_raises_without_shortfall():
    bad = {0: Fraction(3, 5), 1: Fraction(3, 5), 2: Fraction(1, 4),
           3: Fraction(1, 4)}
    with pytest.raises(MatroidError, match="witness"):
        transversal_flow(TM, bad, Fraction(1, 2))


def test_transversal_rejects_heavy_marginal():
    D = ProductDist({0: Fraction(3, 5), 1: Fraction(1, 5), 2: Fraction(1, 5),
                     3: Fraction(1, 5)})
    with pytest.raises(MatroidError, match="exceeds b"):
        transversal_prepare(TM, D, Fraction(1, 2))
