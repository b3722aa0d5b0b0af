"""Uniform-rank schemes: one counter, averaging, two buckets, offline CRS."""

import math
from fractions import Fraction

import numpy as np
import pytest

from ocrskit.distributions import (ExplicitSubsetDist, ProductDist,
                                   SymmetricSizeDist, pair_singleton_dist,
                                   twise_symmetric)
from ocrskit.harness import selectability
from ocrskit.uniform import (averaging_overflow, offline_uniform_crs,
                             simple_uniform_prepare, two_bucket_prepare)

D6 = twise_symmetric(6, 2)


# ---------------------------------------------------------------------------
# one counter
# ---------------------------------------------------------------------------

def test_simple_scheme_parameters():
    s = simple_uniform_prepare(D6, 2)
    assert s.b == Fraction(1, 2)           # mass 1 over rank 2
    assert s.c == Fraction(1, 2)
    assert s.family.cap == 2


def test_simple_scheme_never_overflows_on_small_support():
    # the 2-wise(6) profile has sets of size <= 2 = k, so selection is sure
    rep = selectability(simple_uniform_prepare(D6, 2), D6, mode="exact")
    assert rep.minimum == 1
    assert rep.ok


def test_simple_scheme_rejects_excess_mass():
    with pytest.raises(ValueError):
        simple_uniform_prepare(D6, 2, b=Fraction(1, 4))


def test_simple_scheme_guarantee_on_product():
    D = ProductDist({i: Fraction(1, 8) for i in range(8)}).to_explicit()
    rep = selectability(simple_uniform_prepare(D, 2, b=Fraction(1, 2)), D,
                        mode="exact")
    assert rep.ok and rep.minimum >= Fraction(1, 2)


# ---------------------------------------------------------------------------
# averaging bound
# ---------------------------------------------------------------------------

def test_averaging_on_twise_fixture():
    rep = averaging_overflow(D6, 2)
    assert rep.total == Fraction(5, 6)
    assert rep.delta == Fraction(1, 2)
    assert rep.bound == 3
    assert rep.ok


def test_averaging_needs_slack():
    with pytest.raises(ValueError):
        averaging_overflow(D6, 1)          # mass 1 = k


def test_averaging_random_products_exact():
    rng = np.random.default_rng(2)
    for _ in range(25):
        n = int(rng.integers(2, 11))
        k = int(rng.integers(1, n + 1))
        raw = rng.random(n)
        tot = Fraction(int(rng.integers(1, 100)), 100) * k
        x = {j: min(Fraction(float(raw[j] / raw.sum())
                             ).limit_denominator(10 ** 3) * tot,
                    Fraction(99, 100)) for j in range(n)}
        rep = averaging_overflow(ProductDist(x).to_explicit(), k)
        assert rep.ok, (n, k, rep.total, rep.bound)


# ---------------------------------------------------------------------------
# two buckets
# ---------------------------------------------------------------------------

def test_two_bucket_toy_parameters():
    Dp = ProductDist({i: Fraction(1, 5) for i in range(8)})
    tb = two_bucket_prepare(Dp, 4)
    # face slack: 1 - (8/5)/4 = 3/5, taken exactly
    assert tb.params.eps == Fraction(3, 5)
    assert (tb.params.good_cap, tb.params.bad_cap) == (3, 1)
    assert tb.params.method == "binomial"
    bstar = math.sqrt(27 / (4 * float(tb.params.eps) ** 3 * 4))
    assert abs(tb.params.bstar - bstar) < 1e-12
    assert tb.b == 1 - tb.params.eps


def test_two_bucket_certificate_exact_on_toy():
    Dp = ProductDist({i: Fraction(1, 5) for i in range(8)})
    tb = two_bucket_prepare(Dp, 4)
    rep = selectability(tb, Dp.to_explicit(), mode="exact")
    assert all(s.exact for s in rep.stats)
    assert float(rep.minimum) > 0.85       # far above the (vacuous) toy bound


def test_two_bucket_symmetric_classification():
    D = twise_symmetric(8, 2)              # symmetric: closed-form overflow
    tb = two_bucket_prepare(D, 2)
    assert tb.params.method == "symmetric"


def test_two_bucket_explicit_classification():
    D = pair_singleton_dist(8)
    tb = two_bucket_prepare(D, 2)
    assert tb.params.method == "explicit"


def test_two_bucket_caps_partition_rank():
    for k in (3, 6, 11):
        Dp = ProductDist({i: Fraction(1, 4) for i in range(2 * k)})
        tb = two_bucket_prepare(Dp, k)
        assert tb.params.good_cap + tb.params.bad_cap == k
        assert set(tb.family.bucket_of) == set(range(2 * k))


# ---------------------------------------------------------------------------
# offline CRS
# ---------------------------------------------------------------------------

def test_offline_crs_scores_on_twise6():
    crs = offline_uniform_crs(D6, 2)
    assert [str(s) for s in crs.scores] == \
        ["0", "1/6", "1/3", "1/2", "2/3", "5/6"]
    assert crs.bound == 3                  # (1+delta)/(delta^2 k), delta=1/2
    assert max(crs.scores) <= crs.bound


def test_offline_crs_symmetric_equals_explicit():
    sym = offline_uniform_crs(D6, 2)
    exp = offline_uniform_crs(D6.to_explicit(), 2)
    assert sym.scores == exp.scores
    # tie-breaking among interchangeable elements may differ per code path
    assert set(sym.order) == set(exp.order)


def test_offline_crs_balancedness_meets_guarantee():
    D = twise_symmetric(6, 2)
    crs = offline_uniform_crs(D, 2)
    bal = crs.balancedness(D)
    assert min(bal.values()) >= crs.guarantee


def test_offline_crs_nonvacuous_fixture():
    from ocrskit.fixtures import offline_crs_dist
    D = offline_crs_dist()
    crs = offline_uniform_crs(D, 10)
    assert crs.bound == Fraction(3, 5)     # delta = 1/2, k = 10
    assert max(crs.scores) == Fraction(3, 28)
    assert crs.guarantee == 1 - Fraction(3, 28)


def test_offline_fixture_is_pairwise_independent():
    from ocrskit.distributions import verify_independence
    from ocrskit.fixtures import offline_crs_dist
    rep = verify_independence(offline_crs_dist(), 2)
    assert rep.ok, rep.violation
