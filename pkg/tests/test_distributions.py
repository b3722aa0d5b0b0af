"""Distribution constructions, exact independence checks, serialization."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ocrskit.distributions import (DistributionError, ExplicitSubsetDist,
                                   ProductDist,
                                   SymmetricSizeDist, dump_explicit_dist,
                                   dump_zvector, kn_cycle_dist,
                                   load_explicit_dist, load_zvector,
                                   pair_singleton_dist, smallest_feasible_n,
                                   solve_twise_z, subsample, twise_symmetric,
                                   twise_z_by_cramer, verify_independence)


# ---------------------------------------------------------------------------
# explicit representation basics
# ---------------------------------------------------------------------------

def test_explicit_merges_duplicates_and_normalizes():
    D = ExplicitSubsetDist([(frozenset({0}), Fraction(1, 4)),
                            ({0}, Fraction(1, 4)),
                            (frozenset(), Fraction(1, 2))])
    assert D.prob({0}) == Fraction(1, 2)
    assert len(D.outcomes) == 2


def test_explicit_requires_total_probability_one():
    with pytest.raises(DistributionError):
        ExplicitSubsetDist([(frozenset({0}), Fraction(1, 3))])


def test_explicit_condition_and_project():
    D = pair_singleton_dist(4)
    C = D.condition_contains(2)
    assert all(2 in S for S in C.support())
    assert sum(C.prob(S) for S in C.support()) == 1
    P = D.project([0, 1])
    assert set(P.elements) == {0, 1}
    assert P.marginals()[0] == D.marginals()[0]


def test_product_to_explicit_marginals():
    P = ProductDist({0: Fraction(1, 2), 1: Fraction(1, 3)})
    E = P.to_explicit()
    assert E.prob({0, 1}) == Fraction(1, 6)
    assert E.marginals() == P.marginals()


def test_symmetric_to_explicit_counts():
    D = SymmetricSizeDist(4, {0: Fraction(1, 2), 2: Fraction(1, 2)})
    E = D.to_explicit()
    assert sum(1 for S in E.support() if len(S) == 2) == 6
    assert E.prob({0, 1}) == Fraction(1, 12)


# ---------------------------------------------------------------------------
# t-wise constructions (exact, zero tolerance)
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [4, 5, 8, 13, 16, 33, 64])
def test_twise_t2_exact(n):
    rep = verify_independence(twise_symmetric(n, 2), 2)
    assert rep.ok, rep.violation


def test_twise_t3_odd_construction_exact():
    n = smallest_feasible_n(3)
    D = twise_symmetric(n, 3)
    assert max(D.z) == n          # the odd construction uses the full set
    rep = verify_independence(D, 3)
    assert rep.ok, rep.violation


def test_twise_t4_smallest_feasible_exact():
    n = smallest_feasible_n(4)
    rep = verify_independence(twise_symmetric(n, 4), 4)
    assert rep.ok, rep.violation


def test_smallest_feasible_n_is_t_itself():
    # at n = t the profile is the binomial one (full independence)
    assert [smallest_feasible_n(t) for t in (2, 3, 4, 5, 6)] == [2, 3, 4, 5, 6]


def test_solve_twise_rejects_n_below_t():
    with pytest.raises(DistributionError):
        solve_twise_z(2, 4)


def test_cramer_crosscheck_agrees():
    for n, t in [(6, 2), (9, 3), (16, 4)]:
        assert solve_twise_z(n, t) == {
            j: p for j, p in twise_z_by_cramer(n, t).items() if p != 0}


@pytest.mark.parametrize("n", [5, 7, 9])
def test_kn_cycle_pairwise_exact(n):
    D = kn_cycle_dist(n)
    rep = verify_independence(D, 2)
    assert rep.ok, rep.violation
    m = n * (n - 1) // 2
    assert set(D.elements) == set(range(m))


@pytest.mark.parametrize("n", list(range(2, 13)))
def test_pair_singleton_pairwise_exact(n):
    rep = verify_independence(pair_singleton_dist(n), 2)
    assert rep.ok, rep.violation


def test_verify_catches_violation():
    # a pair with the wrong joint probability
    D = ExplicitSubsetDist([(frozenset({0, 1}), Fraction(1, 2)),
                            (frozenset(), Fraction(1, 2))])
    rep = verify_independence(D, 2)
    assert not rep
    assert rep.level == 2 and set(rep.violation) == {0, 1}
    assert rep.expected == Fraction(1, 4) and rep.actual == Fraction(1, 2)


def test_twise_is_exactly_t_wise_not_more():
    # the t=2 construction must fail a triple-factorization check
    D = twise_symmetric(8, 2)
    rep3 = verify_independence(D, 3)
    assert not rep3 and len(rep3.violation) == 3


# ---------------------------------------------------------------------------
# subsampling
# ---------------------------------------------------------------------------

def test_subsample_preserves_pairwise_independence():
    for D in (twise_symmetric(6, 2), pair_singleton_dist(5)):
        T = subsample(D, Fraction(1, 3))
        rep = verify_independence(T, 2)
        assert rep.ok, rep.violation
        for e, v in D.marginals().items():
            assert T.marginals()[e] == v / 3


def test_subsample_product_stays_product():
    P = ProductDist({0: Fraction(1, 2), 1: Fraction(1, 4)})
    T = subsample(P, Fraction(1, 2))
    assert isinstance(T, ProductDist)
    assert T.marginals() == {0: Fraction(1, 4), 1: Fraction(1, 8)}


# ---------------------------------------------------------------------------
# sampling calibration
# ---------------------------------------------------------------------------

def test_sampler_matches_marginals():
    rng = np.random.default_rng(11)
    D = kn_cycle_dist(5)
    marg = D.marginals()
    trials = 4000
    counts = {e: 0 for e in D.elements}
    for _ in range(trials):
        for e in D.sample(rng):
            counts[e] += 1
    for e in D.elements:
        est = counts[e] / trials
        assert abs(est - float(marg[e])) < 4 * (float(marg[e]) / trials) ** 0.5 + 0.01


def test_symmetric_sampler_size_profile():
    rng = np.random.default_rng(12)
    D = twise_symmetric(6, 2)
    sizes = [len(D.sample(rng)) for _ in range(3000)]
    assert set(sizes) <= set(D.z)


# ---------------------------------------------------------------------------
# text formats round-trip
# ---------------------------------------------------------------------------

def test_explicit_dump_load_roundtrip():
    D = pair_singleton_dist(4)
    E = load_explicit_dist(dump_explicit_dist(D))
    assert E.outcomes == D.outcomes


def test_zvector_dump_load_roundtrip():
    z = twise_symmetric(9, 2).z
    assert load_zvector(dump_zvector(z)) == z


def test_load_explicit_ignores_comments():
    E = load_explicit_dist("# note\n1/2 : 0 1\n1/2 :\n")
    assert E.prob({0, 1}) == Fraction(1, 2)
    assert E.prob(frozenset()) == Fraction(1, 2)
