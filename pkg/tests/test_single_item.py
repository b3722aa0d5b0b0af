"""Rank-one schemes: quality constants, policies, hard instances, adversaries."""

import math
from fractions import Fraction

import numpy as np
import pytest

from ocrskit.distributions import (ProductDist, pair_singleton_dist,
                                   twise_symmetric)
from ocrskit.single_item import (ALMIGHTY_POLICIES, almighty_experiment,
                                 binomial_union_lower, bonferroni_lower, phi,
                                 phi_series, policy_guarantee,
                                 rank1_crs_quality, rank1_quality_lp,
                                 single_sample_ratio, sqrt2_policy,
                                 sqrt2_policy_search, threshold_alg_enumerate,
                                 threshold_alg_formula, threshold_best_params,
                                 threshold_hard_instance, threshold_opt,
                                 threshold_search, threshold_sup_bound,
                                 truncated_union_objective)

SQRT2M1 = math.sqrt(2) - 1


# ---------------------------------------------------------------------------
# the truncated-inclusion-exclusion constant
# ---------------------------------------------------------------------------

def test_phi_small_values():
    assert phi(2) == Fraction(1, 2)
    assert phi(3) == Fraction(1, 2)
    assert phi(4) == Fraction(5, 8)
    assert phi(6) == Fraction(91, 144)


def test_phi_monotone_even_and_limit():
    vals = [phi(t) for t in range(2, 21, 2)]
    assert vals == sorted(vals)
    assert abs(float(phi(20)) - (1 - math.exp(-1))) < 1e-12


def test_phi_series_is_untruncated_form():
    assert phi_series(3) == Fraction(2, 3)
    assert phi_series(2) == Fraction(1, 2)


def test_bonferroni_even_only():
    assert bonferroni_lower(1, 2) == Fraction(1, 2)
    assert bonferroni_lower(1, 4) == Fraction(5, 8)
    with pytest.raises(ValueError):
        bonferroni_lower(1, 3)


def test_binomial_form_dominates_series():
    for c in range(0, 11):
        for n in (2, 3, 5, 8):
            for t in (2, 4):
                if t > n:
                    continue
                assert binomial_union_lower(Fraction(c, 10), n, t) >= \
                    bonferroni_lower(Fraction(c, 10), t)


def test_uniform_point_minimizes_truncated_objective():
    rng = np.random.default_rng(1)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        t = int(rng.choice([2, 4]))
        if t > n:
            continue
        raw = rng.random(n)
        c = rng.random()
        x = [Fraction(v).limit_denominator(1000) for v in raw / raw.sum() * c]
        cx = sum(x)
        assert truncated_union_objective(x, t) >= \
            truncated_union_objective([cx / n] * n, t) - Fraction(1, 10 ** 9)


# ---------------------------------------------------------------------------
# rank-1 CRS quality
# ---------------------------------------------------------------------------

def test_quality_pairwise_hard_family():
    for n in (4, 8, 16, 64):
        q = rank1_crs_quality(twise_symmetric(n, 2))
        assert q.value == Fraction(n + 1, 2 * n)


def test_quality_product():
    q = rank1_crs_quality(ProductDist({i: Fraction(1, 5) for i in range(5)}))
    assert q.value == 1 - Fraction(4, 5) ** 5


def test_quality_4wise_equals_one_minus_empty_mass():
    D = twise_symmetric(16, 4)
    q = rank1_crs_quality(D)
    assert q.value == 1 - D.z[0] == Fraction(10489, 16384)
    assert q.value >= phi(4)
    assert abs(q.value - phi(4)) <= Fraction(4, 16)


def test_quality_explicit_path_agrees():
    assert rank1_crs_quality(twise_symmetric(6, 2).to_explicit()).value == \
        Fraction(7, 12)


def test_quality_lp_cross_check():
    for D in (pair_singleton_dist(3), twise_symmetric(5, 2).to_explicit(),
              ProductDist({i: Fraction(1, 4) for i in range(4)}).to_explicit()):
        exact = float(rank1_crs_quality(D).value)
        assert abs(exact - rank1_quality_lp(D)) < 1e-7


def test_quality_witness_is_attained():
    D = twise_symmetric(8, 2)
    q = rank1_crs_quality(D)
    S = q.witness
    hit = sum(p for out, p in D.to_explicit().outcomes if out & S)
    mass = sum(D.marginals()[e] for e in S)
    assert hit / mass == q.value


# ---------------------------------------------------------------------------
# the sqrt(2)-1 policy
# ---------------------------------------------------------------------------

def test_sqrt2_first_acceptance_rate():
    pol = sqrt2_policy([Fraction(1, 10)] * 10)
    assert abs(pol.q[0] - SQRT2M1) < 1e-12


def test_sqrt2_guarantee_on_random_marginals():
    rng = np.random.default_rng(2)
    worst = 1.0
    for _ in range(200):
        n = int(rng.integers(1, 12))
        raw = rng.random(n)
        x = [Fraction(v).limit_denominator(10 ** 4)
             for v in raw / raw.sum() * rng.random()]
        worst = min(worst, policy_guarantee(x, sqrt2_policy(x).q))
    assert worst >= SQRT2M1 - 1e-9


def test_sqrt2_policy_is_optimal_adaptive():
    best, _ = sqrt2_policy_search(50, np.random.default_rng(3), restarts=10,
                                  iters=100)
    assert SQRT2M1 - 1e-9 <= best <= SQRT2M1 + 0.05


# ---------------------------------------------------------------------------
# multiple-threshold upper bound
# ---------------------------------------------------------------------------

def test_threshold_best_params():
    r, t = threshold_best_params()
    assert abs(t - (5 - math.sqrt(5)) / 4) < 1e-12
    assert 0 < r < 1


def test_threshold_instance_is_pairwise_independent():
    inst = threshold_hard_instance(8, Fraction(618, 1000),
                                   Fraction(691, 1000))
    inst.verify(2)                         # raises on failure
    assert threshold_opt(inst) == inst.expected_max()


def test_threshold_enumerate_equals_formula():
    inst = threshold_hard_instance(8, Fraction(618, 1000),
                                   Fraction(691, 1000))
    rng = np.random.default_rng(4)
    for _ in range(20):
        q = [Fraction(v).limit_denominator(100) for v in rng.random(10)]
        assert threshold_alg_enumerate(inst, q) == \
            threshold_alg_formula(inst, q)


def test_threshold_sup_bound_approaches_limit():
    r, t = threshold_best_params()
    lim = 2 * math.sqrt(5) - 4
    for n in (50, 200):
        assert threshold_sup_bound(n, r, t) <= lim + 5 / n
    assert threshold_sup_bound(200, r, t) < threshold_sup_bound(50, r, t)


def test_threshold_search_below_bound():
    inst = threshold_hard_instance(40, Fraction(618, 1000),
                                   Fraction(6910, 10000))
    val, _ = threshold_search(inst, grid=15, restarts=5, iters=100)
    ub = threshold_sup_bound(40, Fraction(618, 1000), Fraction(6910, 10000))
    assert val <= ub + 1e-9


# ---------------------------------------------------------------------------
# single sample
# ---------------------------------------------------------------------------

def test_single_sample_meets_constant():
    inst = threshold_hard_instance(8, Fraction(618, 1000),
                                   Fraction(691, 1000))
    rep = single_sample_ratio(inst, trials=20000,
                              rng=np.random.default_rng(5))
    const = 3 - math.sqrt(5) - math.log(2)
    assert rep.ratio >= const - 3 * rep.ci99


def test_single_sample_on_value_fixtures():
    from ocrskit.fixtures import value_fixtures
    const = 3 - math.sqrt(5) - math.log(2)
    for inst in value_fixtures():
        rep = single_sample_ratio(inst, trials=20000,
                                  rng=np.random.default_rng(6))
        assert rep.ratio >= const - 3 * rep.ci99, inst.params["name"]


# ---------------------------------------------------------------------------
# almighty adversary
# ---------------------------------------------------------------------------

def test_almighty_policies_exact():
    for n in (4, 6):
        expected = [Fraction(1, n), Fraction(n + 1, 4 * n), Fraction(1, n)]
        for pol, expect in zip(ALMIGHTY_POLICIES, expected):
            rep = almighty_experiment(n, pol)
            assert set(rep.conditional.values()) == {expect}, (pol.name, n)
            assert rep.ok
            assert rep.bound == Fraction(1, 4) + Fraction(1, n)


def test_almighty_policy_names():
    assert [p.name for p in ALMIGHTY_POLICIES] == \
        ["first-come", "fair-coin", "random-favorite"]
