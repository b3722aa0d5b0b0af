"""Measurement harness: selectability, worst-order balancedness, the
subsampling wrapper, and the prophet reduction.

Selectability of a prepared scheme on a distribution D is estimated two
ways.  Exact mode enumerates prepare-time randomness (scheme.realizations())
against the explicit support of D and evaluates each family's selection
certificate, producing per-item rational probabilities.  MC mode redraws the
prepare-time randomness every trial together with a fresh active set, so the
estimate covers both layers of randomness.

The prophet reduction turns any c-selectable scheme into a c-competitive
threshold rule: compute p_i = Pr[i in the max-weight independent set], set
item i's threshold to its own weight with an acceptance coin of bias
p_i / x_i, and hand the set of threshold-crossers (pairwise-independent with
marginals p) to the scheme.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .distributions import ExplicitSubsetDist, subsample
from .families import PreparedScheme, ScaledScheme

Z99 = 2.5758293035489004  # two-sided 99% normal quantile

EXACT_PAIR_BUDGET = 2_000_000
EXHAUSTIVE_ORDER_LIMIT = 8


def mc_ci99(mean, trials):
    """Half-width of a 99% normal-approximation CI for a [0,1] mean."""
    if trials <= 0:
        return float("inf")
    var = max(mean * (1.0 - mean), 0.0)
    return Z99 * math.sqrt(var / trials) + Z99 / trials


@dataclass
class ItemStat:
    item: int
    estimate: object          # Fraction (exact) or float (MC)
    exact: bool
    ci99: float = 0.0
    trials: int = 0

    @property
    def lower(self):
        if self.exact:
            return self.estimate
        return self.estimate - self.ci99


@dataclass
class SelectabilityReport:
    stats: list
    bound: object
    mode: str
    notes: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    @property
    def min_stat(self):
        return min(self.stats, key=lambda s: s.lower)

    @property
    def minimum(self):
        return self.min_stat.estimate

    @property
    def ok(self):
        b = float(self.bound)
        if self.mode == "exact":
            return all(float(s.estimate) >= b - 1e-12 for s in self.stats)
        return all(float(s.estimate) >= b - 3 * s.ci99 for s in self.stats)

    def rows(self):
        out = []
        for s in sorted(self.stats, key=lambda t: t.item):
            ok = (float(s.estimate) >= float(self.bound) - 1e-12) if s.exact \
                else (float(s.estimate) >= float(self.bound) - 3 * s.ci99)
            out.append({
                "item": s.item,
                "estimate": str(s.estimate) if s.exact else f"{s.estimate:.6f}",
                "exact_flag": int(s.exact),
                "ci99": f"{s.ci99:.6f}",
                "bound": str(self.bound),
                "pass": int(ok),
            })
        return out


def _explicit_for(D, limit=200000):
    if isinstance(D, ExplicitSubsetDist):
        return D
    to_explicit = getattr(D, "to_explicit", None)
    if to_explicit is None:
        return None
    try:
        return to_explicit(limit)
    except Exception:
        return None


def selectability(scheme: PreparedScheme, D, mode="auto", trials=20000,
                  rng=None, items=None):
    """Per-item Pr[sel(e,R) | e in R] for a prepared scheme on D."""
    marg = D.marginals()
    wanted = list(items) if items is not None else \
        [e for e in D.elements if marg[e] > 0]
    skipped = [e for e in D.elements if marg[e] == 0]

    if mode in ("auto", "exact"):
        realizations = scheme.realizations()
        ex = _explicit_for(D)
        feasible = realizations is not None and ex is not None
        if feasible:
            pairs = len(realizations) * len(ex.support())
            feasible = pairs <= EXACT_PAIR_BUDGET or mode == "exact"
        if mode == "exact" and not feasible:
            raise ValueError("exact selectability not available here")
        if feasible:
            num = {e: Fraction(0) for e in wanted}
            for fam, pf in realizations:
                if pf == 0:
                    continue
                for S in ex.support():
                    pS = ex.prob(S)
                    for e in wanted:
                        if e in S and fam.selectable(e, S):
                            num[e] += pf * pS
            stats = [ItemStat(e, num[e] / marg[e], True) for e in wanted]
            return SelectabilityReport(stats, scheme.guarantee, "exact",
                                       skipped=skipped)

    if rng is None:
        rng = np.random.default_rng(0)
    hit = {e: 0 for e in wanted}
    seen = {e: 0 for e in wanted}
    for _ in range(trials):
        fam = scheme.realize(rng)
        R = D.sample(rng)
        for e in R:
            if e in seen:
                seen[e] += 1
                if fam.selectable(e, R):
                    hit[e] += 1
    stats = []
    for e in wanted:
        if seen[e] == 0:
            stats.append(ItemStat(e, 0.0, False, float("inf"), 0))
            continue
        m = hit[e] / seen[e]
        stats.append(ItemStat(e, m, False, mc_ci99(m, seen[e]), seen[e]))
    return SelectabilityReport(stats, scheme.guarantee, "mc", skipped=skipped)


def worst_order_balancedness(scheme: PreparedScheme, D, restarts=200,
                             rng=None):
    """min over fixed arrival orders of the per-item conditional selection
    probability of the greedy run.  Exhaustive for grounds of size <= 8,
    otherwise a random-restart heuristic (flagged in the report)."""
    ex = _explicit_for(D)
    realizations = scheme.realizations()
    if ex is None or realizations is None:
        raise ValueError("worst-order balancedness needs explicit support")
    marg = D.marginals()
    items = [e for e in D.elements if marg[e] > 0]
    ground = list(D.elements)
    support = [(S, ex.prob(S)) for S in ex.support()]

    def eval_order(order):
        num = {e: Fraction(0) for e in items}
        for fam, pf in realizations:
            if pf == 0:
                continue
            for S, pS in support:
                got = fam.run(order, S)
                for e in got:
                    if e in num:
                        num[e] += pf * pS
        worst = min(num[e] / marg[e] for e in items)
        return worst

    exhaustive = len(ground) <= EXHAUSTIVE_ORDER_LIMIT
    if exhaustive:
        orders = itertools.permutations(ground)
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        orders = (tuple(rng.permutation(ground)) for _ in range(restarts))

    best, best_order = None, None
    for order in orders:
        w = eval_order(order)
        if best is None or w < best:
            best, best_order = w, tuple(order)
    return {"balancedness": best, "order": best_order,
            "exhaustive": exhaustive, "bound": scheme.guarantee}


def scale_wrapper(inner_prepare, keep):
    """Lift a scheme preparation to the subsampling wrapper: thin D by
    `keep`, prepare the inner scheme on the thinned distribution, restrict
    its family to the kept set."""
    keep = Fraction(keep)

    def prepare(D, *args, **kwargs):
        inner = inner_prepare(subsample(D, keep), *args, **kwargs)
        return ScaledScheme(inner, keep)

    return prepare


def bucket_mc_selectability(scheme, D, trials=10000, rng=None, chunk=200):
    """Vectorized MC selectability for a fixed bucket-counter family on a
    product distribution.

    Semantics match `selectability(..., mode="mc")`: the bucket certificate
    for an active item e is "other same-bucket actives <= cap - 1", which
    equals "bucket load <= cap", identical for every active item of the
    bucket — so whole trials batch into boolean matrices.  Intended for the
    large-k uniform scheme where the generic per-element loop is too slow.
    """
    from .families import BucketFamily
    if rng is None:
        rng = np.random.default_rng(0)
    fam = scheme.realize(rng)
    if not isinstance(fam, BucketFamily):
        raise ValueError("fast path only applies to bucket-counter families")
    order = list(fam.elements)
    x = D.marginals()
    xv = np.array([float(x[e]) for e in order])
    keys = sorted(set(fam.bucket_of.values()))
    masks = {k: np.array([fam.bucket_of[e] == k for e in order]) for k in keys}
    caps = {k: fam.caps[k] for k in keys}

    seen = np.zeros(len(order))
    hit = np.zeros(len(order))
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        A = rng.random((c, len(order))) < xv
        ok = np.zeros((c, len(order)), dtype=bool)
        for k in keys:
            load = A[:, masks[k]].sum(axis=1)
            ok[:, masks[k]] = (load <= caps[k])[:, None]
        seen += A.sum(axis=0)
        hit += (A & ok).sum(axis=0)
        done += c
    stats = []
    for i, e in enumerate(order):
        if x[e] == 0:
            continue
        if seen[i] == 0:
            stats.append(ItemStat(e, 0.0, False, float("inf"), 0))
            continue
        m = hit[i] / seen[i]
        stats.append(ItemStat(e, m, False, mc_ci99(m, int(seen[i])),
                              int(seen[i])))
    return SelectabilityReport(stats, scheme.guarantee, "mc")


# ---------------------------------------------------------------------------
# prophet reduction
# ---------------------------------------------------------------------------

@dataclass
class ValueModel:
    """Indicator value model: item i is worth weights[i] when active."""
    weights: dict
    dist: object

    def __post_init__(self):
        if set(self.weights) != set(self.dist.elements):
            raise ValueError("weights must cover the activity ground set")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("negative weight")


def _greedy_max_weight(matroid, active, weights):
    """Max-weight independent subset of `active` (matroid greedy; ties by
    lower item id)."""
    order = sorted(active, key=lambda e: (-float(weights[e]), e))
    I = []
    for e in order:
        if matroid.is_independent(I + [e]):
            I.append(e)
    return I


def opt_membership_thresholds(matroid, model: ValueModel):
    """p_i = Pr[i in the max-weight independent set of the active items],
    computed exactly over the explicit support.  Returns (p, coin biases
    p_i/x_i); items with x_i = 0 get p_i = 0 and bias 0."""
    ex = _explicit_for(model.dist)
    if ex is None:
        raise ValueError("threshold computation needs explicit support")
    marg = model.dist.marginals()
    p = {e: Fraction(0) for e in model.dist.elements}
    for S in ex.support():
        pS = ex.prob(S)
        for e in _greedy_max_weight(matroid, S, model.weights):
            p[e] += pS
    bias = {}
    for e, pe in p.items():
        x = marg[e]
        if x == 0:
            bias[e] = Fraction(0)
            continue
        if pe > x:
            raise AssertionError("membership probability exceeds marginal")
        bias[e] = pe / x
    return p, bias


@dataclass
class ProphetReport:
    alg_mean: float
    opt_mean: float
    bound: float
    trials: int

    @property
    def ratio(self):
        return self.alg_mean / self.opt_mean if self.opt_mean else float("nan")

    @property
    def ok(self):
        return self.ratio >= self.bound - 3 * self.ci99

    @property
    def ci99(self):
        # conservative half-width for the ratio via per-mean CIs
        if self.trials <= 0 or self.opt_mean == 0:
            return float("inf")
        return 3.0 / math.sqrt(self.trials)


def prophet_simulate(matroid, model: ValueModel, prepare, trials=5000,
                     rng=None, order=None):
    """Run the threshold reduction: prepare the scheme on the distribution
    of threshold-crossers, then per trial sample activity + coins, feed the
    crossers to the greedy family in arrival order, compare against the
    per-trial offline optimum."""
    if rng is None:
        rng = np.random.default_rng(0)
    p, bias = opt_membership_thresholds(matroid, model)
    ground = list(model.dist.elements)
    crossers_dist = _crosser_dist(model.dist, bias)
    scheme = prepare(crossers_dist)
    if order is None:
        order = sorted(ground)
    w = {e: float(model.weights[e]) for e in ground}

    alg_total = 0.0
    opt_total = 0.0
    for _ in range(trials):
        fam = scheme.realize(rng)
        R = model.dist.sample(rng)
        coins = rng.random(len(ground))
        crossers = {e for e, u in zip(ground, coins)
                    if e in R and u < float(bias[e])}
        got = fam.run(order, crossers)
        alg_total += sum(w[e] for e in got)
        opt_total += sum(w[e] for e in _greedy_max_weight(matroid, R, w))
    return ProphetReport(alg_total / trials, opt_total / trials,
                         float(scheme.guarantee), trials)


def _crosser_dist(D, bias):
    """Distribution of the threshold-crossing set: independent thinning of D
    with per-item keep probabilities (pairwise independence is preserved)."""
    ex = _explicit_for(D)
    if ex is None:
        raise ValueError("crosser distribution needs explicit support")
    outcomes = {}
    for S in ex.support():
        pS = ex.prob(S)
        S = tuple(sorted(S))
        for kept_mask in itertools.product(*[(0, 1)] * len(S)):
            pk = pS
            kept = []
            for e, m in zip(S, kept_mask):
                pk *= bias[e] if m else (1 - bias[e])
                if m:
                    kept.append(e)
            if pk > 0:
                key = frozenset(kept)
                outcomes[key] = outcomes.get(key, Fraction(0)) + pk
    return ExplicitSubsetDist(list(outcomes.items()), elements=D.elements)


def uniform_prophet_simulate(k, n=None, x=None, trials=10000, rng=None,
                             chunk=100):
    """End-to-end prophet run for the rank-k uniform matroid at scales where
    explicit support enumeration is impossible.

    The value model has strictly decreasing deterministic weights
    w_i = 2 - i/n and independent activity with equal marginal x, so the
    max-weight independent set is the lowest-id k actives and the membership
    probability has the closed form p_i = x * Pr[Binomial(i, x) <= k - 1]
    (i lower-id items compete).  Thresholds are each item's own weight with
    acceptance bias p_i/x as in `prophet_simulate`; the crossers are thinned
    by keep = 1 - k**(-1/5) and fed to the two-bucket scheme, whose greedy
    run (first cap arrivals per bucket) is evaluated with cumulative sums.
    """
    from scipy.stats import binom as _binom

    from .uniform import two_bucket_prepare
    from .distributions import ProductDist

    if rng is None:
        rng = np.random.default_rng(0)
    n = 2 * k if n is None else int(n)
    x = 0.5 if x is None else float(x)
    w = 2.0 - np.arange(n) / n
    p = x * _binom.cdf(k - 1, np.arange(n), x)
    if p.sum() > k + 1e-9:
        raise AssertionError("membership probabilities exceed the rank")
    keep = 1.0 - k ** (-0.2)
    # common denominator keeps the exact mass bookkeeping cheap at this n
    den = 10 ** 9
    thinned = ProductDist({i: Fraction(int(keep * p[i] * den), den)
                           for i in range(n)})
    scheme = two_bucket_prepare(thinned, k, rng=rng)
    fam = scheme.realize(rng)
    good = np.array([fam.bucket_of[i] == "good" for i in range(n)])
    gcap, bcap = fam.caps["good"], fam.caps["bad"]
    bias = keep * p / x          # Pr[item crosses and survives thinning | active]

    alg_total = 0.0
    opt_total = 0.0
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        active = rng.random((c, n)) < x
        cross = active & (rng.random((c, n)) < bias)
        opt_take = active & (np.cumsum(active, axis=1) <= k)
        opt_total += float((opt_take * w).sum())
        for mask, cap in ((good, gcap), (~good, bcap)):
            sub = cross & mask
            take = sub & (np.cumsum(sub, axis=1) <= cap)
            alg_total += float((take * w).sum())
        done += c
    guarantee = keep * float(scheme.guarantee)
    return ProphetReport(alg_total / trials, opt_total / trials,
                         guarantee, trials)


# ---------------------------------------------------------------------------
# report output
# ---------------------------------------------------------------------------

def rows_to_csv(rows, header=None):
    buf = io.StringIO()
    if not rows:
        return ""
    fields = header or list(rows[0].keys())
    wr = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    wr.writeheader()
    for r in rows:
        wr.writerow(r)
    return buf.getvalue()


def rows_to_json(rows):
    return json.dumps(rows, indent=2, default=str) + "\n"


__all__ = [
    "mc_ci99", "ItemStat", "SelectabilityReport", "selectability",
    "bucket_mc_selectability", "worst_order_balancedness", "scale_wrapper",
    "ValueModel", "opt_membership_thresholds", "ProphetReport",
    "prophet_simulate", "uniform_prophet_simulate", "rows_to_csv",
    "rows_to_json", "Z99",
]
