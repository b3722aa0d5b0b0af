"""Single-item selection under limited independence.

Contents:

* the truncated alternating series bounding the best single-item quality
  under t-wise independence, plus the Bonferroni-style union lower bounds
  behind it;

* the exact quality of the optimal single-item offline scheme for a given
  distribution, reduced to a finite minimum over subsets (cross-checkable
  against a direct LP);

* the online threshold policy whose per-item guarantee is sqrt(2)-1, with a
  search routine showing that constant is essentially best possible for
  fixed-coin policies;

* the hard pairwise-independent value instance on which every fixed
  multiple-threshold policy loses a 2*sqrt(5)-4 factor;

* the single-sample algorithm (threshold = max of one offline sample) and
  its Monte Carlo evaluation;

* the almighty-adversary experiment showing no single-item scheme is better
  than (1/4 + 1/n)-selectable on the pair/singleton distribution.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .distributions import (DistributionError, ExplicitSubsetDist,
                            ProductDist, SymmetricSizeDist,
                            pair_singleton_dist, verify_independence)

SQRT2_GUARANTEE = math.sqrt(2) - 1
MULTI_THRESHOLD_LIMIT = 2 * math.sqrt(5) - 4
SINGLE_SAMPLE_GUARANTEE = 3 - math.sqrt(5) - math.log(2)


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------

def phi(t):
    """Best single-item quality under t-wise independence: the alternating
    series for 1-1/e truncated after 2*floor(t/2) terms (exact rational).
    Odd t gives the same value as t-1."""
    t = int(t)
    if t < 1:
        raise ValueError("t must be >= 1")
    m = 2 * (t // 2)
    return 1 - sum(Fraction((-1) ** k, factorial(k)) for k in range(m + 1))


def phi_series(t):
    """Companion form truncating the same series after t terms exactly (no
    rounding down to even); overshoots 1-1/e for odd t."""
    t = int(t)
    if t < 1:
        raise ValueError("t must be >= 1")
    return 1 - sum(Fraction((-1) ** k, factorial(k)) for k in range(t + 1))


def bonferroni_lower(c, t):
    """Lower bound on Pr[union of n events] when the events are t-wise
    independent with probabilities summing to c <= 1 (t even):
    sum_{k=1}^{t} (-1)^(k-1) c^k / k!."""
    t = int(t)
    if t < 1 or t % 2:
        raise ValueError("t must be a positive even integer")
    c = Fraction(c)
    if not 0 <= c <= 1:
        raise ValueError("c must lie in [0,1]")
    return sum(Fraction((-1) ** (k - 1)) * c ** k / factorial(k)
               for k in range(1, t + 1))


def binomial_union_lower(c, n, t):
    """The n-point form sum_{k=1}^t (-1)^(k-1) (c/n)^k C(n,k); dominates
    bonferroni_lower(c, t) for even t and c <= 1."""
    t = int(t)
    c = Fraction(c)
    return sum(Fraction((-1) ** (k - 1)) * (c / n) ** k * comb(n, k)
               for k in range(1, t + 1))


def truncated_union_objective(x, t):
    """sum_{k=1}^t (-1)^(k-1) e_k(x) with e_k the elementary symmetric
    polynomials: the truncated inclusion-exclusion estimate of a union of
    independent events with probabilities x."""
    t = int(t)
    xs = [Fraction(v) for v in x]
    # e_k via the coefficient DP for prod (1 + x_i y)
    e = [Fraction(1)] + [Fraction(0)] * len(xs)
    for v in xs:
        for k in range(len(xs), 0, -1):
            e[k] += e[k - 1] * v
    return sum(Fraction((-1) ** (k - 1)) * e[k] for k in range(1, min(t, len(xs)) + 1))


# ---------------------------------------------------------------------------
# exact quality of the optimal single-item scheme
# ---------------------------------------------------------------------------

@dataclass
class QualityReport:
    value: Fraction
    witness: frozenset

    def __float__(self):
        return float(self.value)


QUALITY_SUBSET_LIMIT = 22


def rank1_crs_quality(D):
    """Exact quality of the best offline single-item scheme for D:
    min over nonempty S of Pr[R cap S nonempty] / x(S).

    (The classical variational form minimizes E[max_{j in R} y_j] / <x, y>
    over weight vectors y >= 0; for each ordering of y the inner LP is
    minimized at a prefix set, so ranging over orderings gives the finite
    subset form.  rank1_quality_lp solves the variational form directly as
    a cross-check.)"""
    if isinstance(D, SymmetricSizeDist):
        # all size-s witnesses tie, so scan sizes
        mu = D.marginals()[D.elements[0]]
        if mu == 0:
            raise DistributionError("all marginals are zero")
        best, best_s = None, None
        for s in range(1, D.n + 1):
            hit = 1 - D.miss_prob_by_size(s)
            ratio = hit / (s * mu)
            if best is None or ratio < best:
                best, best_s = ratio, s
        return QualityReport(best, frozenset(D.elements[:best_s]))
    if isinstance(D, ProductDist):
        D = D.to_explicit(2 ** QUALITY_SUBSET_LIMIT)
    if not isinstance(D, ExplicitSubsetDist):
        raise DistributionError("need an explicit, symmetric, or product distribution")
    order, masks, nums, den = D.bitmask_view()
    n = len(order)
    if n > QUALITY_SUBSET_LIMIT:
        raise DistributionError(f"{n} elements is over the subset scan limit")
    xnum = [0] * n
    for m, p in zip(masks, nums):
        for i in range(n):
            if m >> i & 1:
                xnum[i] += p
    best, best_mask = None, 0
    for Smask in range(1, 1 << n):
        xS = sum(xnum[i] for i in range(n) if Smask >> i & 1)
        if xS == 0:
            continue
        hit = sum(p for m, p in zip(masks, nums) if m & Smask)
        ratio = Fraction(hit, xS)
        if best is None or ratio < best:
            best, best_mask = ratio, Smask
    if best is None:
        raise DistributionError("all marginals are zero")
    witness = frozenset(order[i] for i in range(n) if best_mask >> i & 1)
    return QualityReport(best, witness)


def rank1_quality_lp(D: ExplicitSubsetDist):
    """Variational form solved as one LP (float): minimize
    sum_R p_R m_R over y >= 0, m_R >= y_j for j in R, sum x_i y_i = 1."""
    from scipy.optimize import linprog
    order = list(D.elements)
    pos = {e: i for i, e in enumerate(order)}
    n = len(order)
    support = [(S, p) for S, p in D.outcomes if S]
    m = len(support)
    # variables: y_0..y_{n-1}, m_0..m_{m-1}
    cost = [0.0] * n + [float(p) for _, p in support]
    A_ub, b_ub = [], []
    for k, (S, _) in enumerate(support):
        for e in S:
            row = [0.0] * (n + m)
            row[pos[e]] = 1.0
            row[n + k] = -1.0
            A_ub.append(row)          # y_e - m_k <= 0
            b_ub.append(0.0)
    x = D.marginals()
    A_eq = [[float(x[e]) for e in order] + [0.0] * m]
    res = linprog(cost, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * (n + m), method="highs")
    if not res.success:
        raise RuntimeError(f"quality LP failed: {res.message}")
    return res.fun


# ---------------------------------------------------------------------------
# the sqrt(2)-1 online threshold policy
# ---------------------------------------------------------------------------

@dataclass
class ThresholdPolicy:
    """Acceptance probabilities for a single-item online rule: when item i
    arrives active and nothing is selected yet, keep it with probability
    q[i].  Computable online: q[i] depends only on x[0..i-1]."""
    q: list

    def run(self, active, rng, order=None):
        order = range(len(self.q)) if order is None else order
        for i in order:
            if i in active and rng.random() < float(self.q[i]):
                return i
        return None


def sqrt2_acceptance(prefix_mass):
    """f(s) = 1/sqrt((3+2*sqrt2) - (2+2*sqrt2)*s) for s = mass seen so far."""
    s = float(prefix_mass)
    if not 0 <= s <= 1 + 1e-12:
        raise ValueError("prefix mass outside [0,1]")
    r2 = math.sqrt(2)
    return 1.0 / math.sqrt((3 + 2 * r2) - (2 + 2 * r2) * min(s, 1.0))


def policy_guarantee(x, q):
    """min_i q_i (1 - sum_{j<i} x_j q_j): the per-item selection guarantee
    of the acceptance vector q under any pairwise-independent arrivals."""
    worst = None
    blocked = 0.0
    for xi, qi in zip(x, q):
        val = float(qi) * (1 - blocked)
        worst = val if worst is None else min(worst, val)
        blocked += float(xi) * float(qi)
    return worst


def sqrt2_policy(x):
    """The online policy q_i = f(x_1 + ... + x_{i-1}); its guarantee is at
    least sqrt(2)-1 whenever the marginals sum to at most 1."""
    xs = [Fraction(v) for v in x]
    if sum(xs) > 1:
        raise ValueError("marginals must sum to at most 1")
    q, s = [], Fraction(0)
    for xi in xs:
        q.append(sqrt2_acceptance(s))
        s += xi
    return ThresholdPolicy(q)


def sqrt2_policy_search(n, rng=None, restarts=40, iters=300):
    """Best min_i q_i (1 - (1/n) sum_{j<i} q_j) found by hill-climbing over
    acceptance vectors for uniform marginals 1/n.  An upper bound of
    sqrt(2)-1 + O(1/n) holds for every q, so the search result documents
    how tight the online policy is."""
    if rng is None:
        rng = np.random.default_rng(0)
    x = [1.0 / n] * n

    def score(q):
        return policy_guarantee(x, q)

    best_q = [sqrt2_acceptance(i / n) for i in range(n)]
    best = score(best_q)
    for _ in range(restarts):
        q = np.clip(np.array(best_q) + rng.normal(0, 0.05, n), 0, 1)
        cur = score(q)
        step = 0.05
        for _ in range(iters):
            cand = np.clip(q + rng.normal(0, step, n), 0, 1)
            s = score(cand)
            if s > cur:
                q, cur = cand, s
            else:
                step *= 0.97
        if cur > best:
            best, best_q = cur, list(q)
    return best, list(best_q)


# ---------------------------------------------------------------------------
# the hard multiple-threshold value instance
# ---------------------------------------------------------------------------

@dataclass
class ValueInstance:
    """Explicit pairwise-independent value coupling: weights[i] is the value
    of item i when active, dist the joint active-set distribution."""
    weights: dict
    dist: ExplicitSubsetDist
    params: dict

    def verify(self, t=2):
        rep = verify_independence(self.dist, t)
        if not rep:
            raise DistributionError(
                f"instance is not {t}-wise independent: tuple {rep.violation} "
                f"has probability {rep.actual}, expected {rep.expected}")
        return rep

    def expected_max(self):
        return sum((p * max((self.weights[i] for i in S), default=Fraction(0))
                    for S, p in self.dist.outcomes), Fraction(0))


def threshold_hard_instance(n, r, t):
    """n+2 items: item 0 deterministically worth t; items 1..n worth 1 and
    item n+1 worth r*n, each active with probability 1/n, coupled so that
    with probability (n+1)/(2n) exactly two of items 1..n+1 are active and
    otherwise none are.  Pairwise independent, and no fixed acceptance
    vector beats a 2*sqrt(5)-4 fraction of the expected maximum."""
    n = int(n)
    r, t = Fraction(r), Fraction(t)
    if not 0 < t < 1:
        raise ValueError("need 0 < t < 1")
    if r * n < 1:
        raise ValueError("need r*n >= 1 so the heavy item dominates")
    weights = {0: t}
    weights.update({i: Fraction(1) for i in range(1, n + 1)})
    weights[n + 1] = r * n
    unit = Fraction(1, n * n)           # (n+1)/(2n) / C(n+1,2)
    outcomes = [(frozenset({0}) | frozenset(pair), unit)
                for pair in itertools.combinations(range(1, n + 2), 2)]
    outcomes.append((frozenset({0}), 1 - unit * comb(n + 1, 2)))
    dist = ExplicitSubsetDist(outcomes, elements=range(n + 2))
    return ValueInstance(weights, dist, {"n": n, "r": r, "t": t})


def threshold_opt(inst: ValueInstance):
    """E[max value] = r + (n-1)(1+t)/(2n), exactly."""
    n, r, t = inst.params["n"], inst.params["r"], inst.params["t"]
    return r + Fraction(n - 1, 2 * n) * (1 + t)


def threshold_alg_enumerate(inst: ValueInstance, q):
    """Exact expected value of the acceptance vector q on the instance, by
    enumerating the joint outcomes (items arrive in index order; at most
    two random items are active, so each outcome needs one short product)."""
    q = [Fraction(v) for v in q]
    total = Fraction(0)
    for S, p in inst.dist.outcomes:
        rest = sorted(S - {0})
        val = q[0] * inst.weights[0]
        hold = 1 - q[0]
        for i in rest:
            val += hold * q[i] * inst.weights[i]
            hold *= 1 - q[i]
        total += p * val
    return total


def threshold_alg_formula(inst: ValueInstance, q):
    """The same expectation in closed form: with u the mean acceptance over
    the unit items and s their mean squared acceptance / n,
    ALG = q_0 t + (1-q_0) [ q_{n+1} r (1-u) + u - u^2/2 + s/2 ]."""
    n, r, t = inst.params["n"], inst.params["r"], inst.params["t"]
    q = [Fraction(v) for v in q]
    u = sum(q[1:n + 1]) / n
    s = sum(v * v for v in q[1:n + 1]) / n ** 2
    return q[0] * t + (1 - q[0]) * (q[n + 1] * r * (1 - u) + u - u * u / 2 + s / 2)


def threshold_sup_bound(n, r, t):
    """Closed-form upper bound on sup_q ALG(q)/OPT:
    (max(t, (1+r^2)/2) + 1/(2n)) / (r + (n-1)(1+t)/(2n))."""
    n = int(n)
    r, t = float(r), float(t)
    num = max(t, (1 + r * r) / 2) + 1 / (2 * n)
    den = r + (n - 1) * (1 + t) / (2 * n)
    return num / den


def threshold_best_params():
    """(r, t) minimizing the limiting bound: r = (sqrt5-1)/2, t = (1+r^2)/2;
    the limit value is 2*sqrt(5)-4."""
    r = (math.sqrt(5) - 1) / 2
    return r, (1 + r * r) / 2


def threshold_search(inst: ValueInstance, grid=21, rng=None, restarts=20,
                     iters=200):
    """Search over acceptance vectors (symmetric in the unit items:
    q = (q0, v, ..., v, 1)) maximizing ALG/OPT; any value found is a lower
    bound on the sup, which the closed form bounds from above."""
    if rng is None:
        rng = np.random.default_rng(0)
    n = inst.params["n"]
    opt = float(threshold_opt(inst))

    def ratio(q0, v, qlast=1.0):
        q = [q0] + [v] * n + [qlast]
        return float(threshold_alg_formula(inst, [Fraction(x).limit_denominator(10 ** 6)
                                                  for x in q])) / opt

    best = (0.0, 0.0, 0.0)
    for q0 in np.linspace(0, 1, grid):
        for v in np.linspace(0, 1, grid):
            val = ratio(q0, v)
            if val > best[0]:
                best = (val, q0, v)
    val, q0, v = best
    step = 1.0 / grid
    for _ in range(restarts):
        for _ in range(iters // restarts):
            c0 = min(1.0, max(0.0, q0 + rng.normal(0, step)))
            cv = min(1.0, max(0.0, v + rng.normal(0, step)))
            cval = ratio(c0, cv)
            if cval > val:
                val, q0, v = cval, c0, cv
        step *= 0.7
    return val, (q0, v)


# ---------------------------------------------------------------------------
# single-sample selection
# ---------------------------------------------------------------------------

def single_sample_select(sample, stream, order=None):
    """Threshold rule with one offline draw: v* = max(sample); pick the
    first stream item whose value reaches v*.  Returns the index or None."""
    vstar = max(sample)
    order = range(len(stream)) if order is None else order
    for i in order:
        if stream[i] >= vstar:
            return i
    return None


@dataclass
class SingleSampleReport:
    alg_mean: float
    opt_mean: float
    trials: int

    @property
    def ratio(self):
        return self.alg_mean / self.opt_mean

    @property
    def ci99(self):
        return 2.5758 / math.sqrt(self.trials)


def single_sample_ratio(inst: ValueInstance, trials=100000, rng=None):
    """Monte Carlo competitive ratio of the single-sample rule on a value
    instance: sample and stream are independent joint draws; the prophet
    benchmark E[max] is computed exactly."""
    if rng is None:
        rng = np.random.default_rng(0)
    items = list(inst.dist.elements)
    w = [float(inst.weights[i]) for i in items]
    opt = float(inst.expected_max())
    total = 0.0
    for _ in range(trials):
        Rs = inst.dist.sample(rng)
        Rt = inst.dist.sample(rng)
        sample = [w[k] if items[k] in Rs else 0.0 for k in range(len(items))]
        stream = [w[k] if items[k] in Rt else 0.0 for k in range(len(items))]
        pick = single_sample_select(sample, stream)
        if pick is not None:
            total += stream[pick]
    return SingleSampleReport(total / trials, opt, trials)


# ---------------------------------------------------------------------------
# almighty-adversary experiment
# ---------------------------------------------------------------------------

class CoinPolicy:
    """Single-item online rule that is deterministic once its coin draw is
    fixed: coin_space(n) enumerates the draws with probabilities, accept()
    answers whether an arriving active item is taken."""

    name = "base"

    def coin_space(self, n):
        raise NotImplementedError

    def accepts(self, coins, item):
        raise NotImplementedError


class FirstComePolicy(CoinPolicy):
    name = "first-come"

    def coin_space(self, n):
        return [(None, Fraction(1))]

    def accepts(self, coins, item):
        return True


class FairCoinPolicy(CoinPolicy):
    """Accept each arriving active item on an independent fair coin."""

    name = "fair-coin"

    def coin_space(self, n):
        share = Fraction(1, 2 ** n)
        return [(bits, share) for bits in itertools.product((0, 1), repeat=n)]

    def accepts(self, coins, item):
        return coins[item] == 1


class RandomFavoritePolicy(CoinPolicy):
    """Pick a uniformly random favorite up front; accept only it."""

    name = "random-favorite"

    def coin_space(self, n):
        return [(i, Fraction(1, n)) for i in range(n)]

    def accepts(self, coins, item):
        return item == coins


def _always_selected(policy, coins, R, item):
    """True iff the policy takes `item` for every arrival order of R (the
    adversary sees R and the coins before ordering)."""
    for order in itertools.permutations(sorted(R)):
        taken = None
        for e in order:
            if policy.accepts(coins, e):
                taken = e
                break
        if taken != item:
            return False
    return True


@dataclass
class AlmightyReport:
    n: int
    policy: str
    conditional: dict          # item -> exact Pr[selected in all orders | active]
    bound: Fraction

    @property
    def minimum(self):
        return min(self.conditional.values())

    @property
    def ok(self):
        return self.minimum <= self.bound


def almighty_experiment(n, policy: CoinPolicy):
    """Exact worst-case conditional selection probability per item on the
    pair/singleton distribution, with the adversary choosing the arrival
    order after seeing the active set and the policy's coins.  The minimum
    over items can never exceed 1/4 + 1/n."""
    n = int(n)
    D = pair_singleton_dist(n)
    x = D.marginals()
    win = {i: Fraction(0) for i in range(n)}
    for coins, pc in policy.coin_space(n):
        for R, pr in D.outcomes:
            if not R:
                continue
            for i in R:
                if _always_selected(policy, coins, R, i):
                    win[i] += pc * pr
    conditional = {i: win[i] / x[i] for i in range(n)}
    return AlmightyReport(n, policy.name, conditional, Fraction(1, 4) + Fraction(1, n))


ALMIGHTY_POLICIES = (FirstComePolicy(), FairCoinPolicy(), RandomFavoritePolicy())


__all__ = [
    "SQRT2_GUARANTEE", "MULTI_THRESHOLD_LIMIT", "SINGLE_SAMPLE_GUARANTEE",
    "phi", "phi_series", "bonferroni_lower", "binomial_union_lower",
    "truncated_union_objective", "QualityReport", "rank1_crs_quality",
    "rank1_quality_lp", "ThresholdPolicy", "sqrt2_acceptance",
    "policy_guarantee", "sqrt2_policy", "sqrt2_policy_search",
    "ValueInstance", "threshold_hard_instance", "threshold_opt",
    "threshold_alg_enumerate", "threshold_alg_formula",
    "threshold_sup_bound", "threshold_best_params", "threshold_search",
    "single_sample_select", "SingleSampleReport", "single_sample_ratio",
    "CoinPolicy", "FirstComePolicy", "FairCoinPolicy",
    "RandomFavoritePolicy", "_always_selected", "AlmightyReport",
    "almighty_experiment", "ALMIGHTY_POLICIES",
]
