"""Evaluation harness: selectability, worst orders, prophet simulation."""

import json
from fractions import Fraction

import numpy as np
import pytest

from ocrskit.distributions import ProductDist, twise_symmetric
from ocrskit.families import CapFamily, FixedScheme
from ocrskit.harness import (EXHAUSTIVE_ORDER_LIMIT, ValueModel,
                             bucket_mc_selectability, mc_ci99,
                             opt_membership_thresholds, prophet_simulate,
                             rows_to_csv, rows_to_json, selectability,
                             uniform_prophet_simulate,
                             worst_order_balancedness)
from ocrskit.matroids import UniformMatroid
from ocrskit.uniform import simple_uniform_prepare, two_bucket_prepare

D6 = twise_symmetric(6, 2)
SCHEME = simple_uniform_prepare(D6, 2)


# ---------------------------------------------------------------------------
# selectability report plumbing
# ---------------------------------------------------------------------------

def test_exact_mode_flags_and_bound():
    rep = selectability(SCHEME, D6, mode="exact")
    assert rep.mode == "exact"
    assert all(s.exact and s.ci99 == 0 for s in rep.stats)
    assert rep.bound == SCHEME.guarantee
    assert rep.minimum == rep.min_stat.estimate


def test_mc_mode_tracks_exact_within_3sigma():
    exact = {s.item: s.estimate
             for s in selectability(SCHEME, D6, mode="exact").stats}
    rep = selectability(SCHEME, D6, mode="mc", trials=20000,
                        rng=np.random.default_rng(11))
    assert rep.mode == "mc"
    for s in rep.stats:
        assert abs(s.estimate - float(exact[s.item])) <= max(3 * s.ci99, 1e-9)


def test_item_restriction():
    rep = selectability(SCHEME, D6, mode="exact", items=[0, 3])
    assert sorted(s.item for s in rep.stats) == [0, 3]


def test_report_rows_columns():
    rep = selectability(SCHEME, D6, mode="exact")
    rows = rep.rows()
    assert list(rows[0]) == ["item", "estimate", "exact_flag", "ci99",
                             "bound", "pass"]
    assert all(r["exact_flag"] == 1 and r["pass"] == 1 for r in rows)


def test_mc_ci_shrinks():
    assert mc_ci99(0.5, 400) > mc_ci99(0.5, 40000)
    assert mc_ci99(0.5, 0) == float("inf")


def test_csv_and_json_rendering():
    rows = [{"item": 0, "estimate": "1/2"}, {"item": 1, "estimate": "0.25"}]
    csv_text = rows_to_csv(rows)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "item,estimate"
    assert lines[1] == "0,1/2"
    parsed = json.loads(rows_to_json(rows))
    assert parsed[1]["estimate"] == "0.25"


# ---------------------------------------------------------------------------
# adversarial orders
# ---------------------------------------------------------------------------

def test_worst_order_exhaustive_on_small_ground():
    wob = worst_order_balancedness(SCHEME, D6)
    assert wob["exhaustive"] is True
    assert len(D6.elements) <= EXHAUSTIVE_ORDER_LIMIT
    # greedy certificates are order-free here: worst order == selectability
    assert wob["balancedness"] == 1
    assert wob["balancedness"] >= wob["bound"]


def test_worst_order_never_beats_selectability():
    D = ProductDist({i: Fraction(1, 4) for i in range(5)}).to_explicit()
    scheme = FixedScheme(CapFamily(2, range(5)), b=Fraction(1, 2),
                         c=Fraction(1, 2), name="cap")
    wob = worst_order_balancedness(scheme, D)
    rep = selectability(scheme, D, mode="exact")
    assert wob["balancedness"] <= rep.minimum


# ---------------------------------------------------------------------------
# bucketed MC fast path
# ---------------------------------------------------------------------------

def test_bucket_mc_matches_exact():
    Dp = ProductDist({i: Fraction(1, 5) for i in range(8)})
    tb = two_bucket_prepare(Dp, 4)
    exact = selectability(tb, Dp.to_explicit(), mode="exact")
    fast = bucket_mc_selectability(tb, Dp, trials=40000,
                                   rng=np.random.default_rng(5))
    ex = {s.item: float(s.estimate) for s in exact.stats}
    for s in fast.stats:
        assert abs(s.estimate - ex[s.item]) <= 3 * s.ci99 + 1e-9


# ---------------------------------------------------------------------------
# prophet reductions
# ---------------------------------------------------------------------------

def test_membership_thresholds_are_probabilities():
    U = UniformMatroid(range(6), 2)
    model = ValueModel({i: 6 - i for i in range(6)}, D6)
    p, bias = opt_membership_thresholds(U, model)
    assert all(0 <= p[e] <= D6.marginals()[e] for e in range(6))
    assert sum(p.values()) <= 2            # at most the rank in expectation
    assert sum(p.values()) == 1            # the 2-wise profile has <=2 actives


def test_prophet_on_rank2_uniform():
    U = UniformMatroid(range(6), 2)
    model = ValueModel({i: 6 - i for i in range(6)}, D6)
    pr = prophet_simulate(U, model, lambda Dc: simple_uniform_prepare(Dc, 2),
                          trials=4000, rng=np.random.default_rng(7))
    assert pr.ok
    assert pr.ratio >= float(pr.bound) - 3 * pr.ci99
    # supports of size <= 2 = rank: greedy takes every crossing item
    assert pr.ratio == pytest.approx(1.0, abs=3 * pr.ci99)


def test_uniform_prophet_small_k():
    rep = uniform_prophet_simulate(25, trials=4000,
                                   rng=np.random.default_rng(9))
    assert rep.ratio >= float(rep.bound) - 3 * rep.ci99
    assert rep.ok


def test_uniform_prophet_deterministic_given_seed():
    a = uniform_prophet_simulate(25, trials=2000,
                                 rng=np.random.default_rng(1))
    b = uniform_prophet_simulate(25, trials=2000,
                                 rng=np.random.default_rng(1))
    assert a.ratio == b.ratio
