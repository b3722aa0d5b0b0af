"""Rank-k (uniform) schemes under pairwise independence.

Three constructions:

* `simple_uniform_prepare` — one counter with capacity k.  Markov on the
  conditioned mass gives per-item failure at most x(E)/k, so at arrival
  rate b the scheme is (b, 1-b)-selectable with no independence needed
  beyond the marginals.

* `two_bucket_prepare` — items are split by how likely the pool is to
  overflow around them.  Rare-overflow ("good") items share a counter with
  capacity floor((1-r*eps)k); the rest share the remaining ceil(r*eps*k)
  slots, where eps is the mass slack 1 - x(E)/k.  A Chebyshev argument
  (pairwise independence only) bounds every item's failure probability by
  bstar = ((1-r)^2 * r * eps^3 * k)^(-1/2).

* `offline_uniform_crs` — a fixed arrival order built back to front: each
  round removes the surviving item with the smallest overflow certificate
  Pr[|R ∩ survivors| >= k and i in R] / Pr[i in R]; greedy with capacity k
  in the resulting order is balanced to 1 - (1+d)/(d^2 k) where d is the
  mass slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.stats import binom as _binom

from .distributions import ExplicitSubsetDist, ProductDist, SymmetricSizeDist
from .families import BucketFamily, CapFamily, FixedScheme


def _mass(x):
    return sum(x.values(), Fraction(0))


def simple_uniform_family(k, elements):
    return CapFamily(k, elements)


def simple_uniform_prepare(D, k, b=None):
    """One-counter scheme; guarantee 1 - b with b defaulting to x(E)/k."""
    x = D.marginals()
    mass = _mass(x)
    if b is None:
        b = mass / Fraction(k)
    else:
        b = Fraction(b)
        if mass > b * k:
            raise ValueError(f"x(E) = {mass} exceeds b*k = {b * k}")
    return FixedScheme(CapFamily(k, D.elements), b=b, c=1 - b,
                       name="uniform-simple")


# ---------------------------------------------------------------------------
# the averaging bound
# ---------------------------------------------------------------------------

@dataclass
class AveragingReport:
    total: Fraction          # sum_i Pr[|R| >= k and i in R]
    bound: Fraction          # (1 - delta^2) / delta^2
    delta: Fraction

    @property
    def ok(self):
        return self.total <= self.bound


def averaging_overflow(D, k):
    """Exact check of the pairwise-independence averaging bound: with
    x(E) = (1-delta)k, sum_i Pr[|R| >= k, i in R] <= (1-delta^2)/delta^2."""
    x = D.marginals()
    mass = _mass(x)
    delta = 1 - mass / Fraction(k)
    if delta <= 0:
        raise ValueError("needs mass slack: x(E) < k")
    if isinstance(D, SymmetricSizeDist):
        total = sum((p * j for j, p in D.z.items() if j >= k), Fraction(0))
    else:
        ex = D if isinstance(D, ExplicitSubsetDist) else D.to_explicit()
        total = sum((ex.prob(S) * len(S) for S in ex.support() if len(S) >= k),
                    Fraction(0))
    bound = (1 - delta * delta) / (delta * delta)
    return AveragingReport(total, bound, delta)


# ---------------------------------------------------------------------------
# two-bucket scheme
# ---------------------------------------------------------------------------

@dataclass
class TwoBucketParams:
    k: int
    r: Fraction
    eps: object              # Fraction when derived from the mass, else float
    good_cap: int
    bad_cap: int
    bstar: float
    good: frozenset
    bad: frozenset
    method: str
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        assert self.good_cap + self.bad_cap == self.k
        assert 0 <= self.good_cap <= self.k
        assert 0 < float(self.eps) < 1
        assert 0 < float(self.r) < 1


def _overflow_given_item(D, g, rng, mc_trials):
    """Per-item Pr[|R \\ {e}| >= g | e in R] plus the method tag and any
    MC tie warnings (estimate within 3 CI of the classification line is
    reported by the caller)."""
    x = D.marginals()
    items = [e for e in D.elements if x[e] > 0]
    n = len(D.elements)

    if isinstance(D, SymmetricSizeDist):
        mu = D.marginal(D.elements[0])
        # Pr[|R| = j | i in R] = z_j (j/n) / mu ; overflow iff j - 1 >= g
        val = sum((p * Fraction(j, n) for j, p in D.z.items() if j - 1 >= g),
                  Fraction(0)) / mu
        return {e: val for e in items}, "symmetric", []

    if isinstance(D, ProductDist) and len(set(x[e] for e in items)) == 1 \
            and all(x[e] > 0 for e in D.elements):
        xe = float(x[items[0]])
        val = float(_binom.sf(g - 1, n - 1, xe))
        return {e: val for e in items}, "binomial", []

    if isinstance(D, ProductDist):
        if n <= 400:
            probs = {e: float(x[e]) for e in D.elements}
            out = {}
            for e in items:
                others = [probs[f] for f in D.elements if f != e]
                dist = np.zeros(len(others) + 1)
                dist[0] = 1.0
                for pf in others:
                    dist[1:] = dist[1:] * (1 - pf) + dist[:-1] * pf
                    dist[0] *= (1 - pf)
                out[e] = float(dist[g:].sum()) if g <= len(others) else 0.0
            return out, "poisson-binomial", []
        # big product instance: vectorized MC on the activity matrix
        if rng is None:
            rng = np.random.default_rng(0)
        T = max(1000, min(mc_trials, int(8e7 // max(n, 1))))
        pv = np.array([float(x[e]) for e in D.elements])
        hits = np.zeros(n)
        for _ in range(T):
            row = rng.random(n) < pv
            tot = int(row.sum())
            hits += (tot - row.astype(int)) >= g
        est = hits / T
        return ({e: float(est[i]) for i, e in enumerate(D.elements) if x[e] > 0},
                "mc-product", [f"MC classification with {T} trials"])

    try:
        ex = D if isinstance(D, ExplicitSubsetDist) else D.to_explicit()
    except Exception:
        ex = None
    if ex is not None:
        out = {e: Fraction(0) for e in items}
        for S in ex.support():
            pS = ex.prob(S)
            if len(S) - 1 < g:
                continue
            for e in S:
                if e in out:
                    out[e] += pS
        return {e: out[e] / x[e] for e in items}, "explicit", []

    if rng is None:
        rng = np.random.default_rng(0)
    hit = {e: 0 for e in items}
    seen = {e: 0 for e in items}
    for _ in range(mc_trials):
        R = set(D.sample(rng))
        for e in R & set(items):
            seen[e] += 1
            if len(R) - 1 >= g:
                hit[e] += 1
    out = {e: (hit[e] / seen[e] if seen[e] else 0.0) for e in items}
    return out, "mc-sampler", [f"MC classification with {mc_trials} trials"]


def two_bucket_prepare(D, k, eps=None, r=Fraction(1, 3), rng=None,
                       mc_trials=4000):
    """Prepare the two-bucket scheme for D at rank k.

    eps defaults to k**(-1/5); whenever the actual mass slack 1 - x(E)/k is
    larger than eps, eps is upgraded to that exact slack.  Classification is
    strict: an item is good iff its conditional overflow probability is
    <= bstar (MC estimates within 3 CI of bstar count as good, with a
    warning recorded in the params).
    """
    k = int(k)
    if k < 1:
        raise ValueError("k must be positive")
    r = Fraction(r)
    x = D.marginals()
    mass = _mass(x)
    if mass >= k:
        raise ValueError("needs mass slack: x(E) < k")
    face_eps = 1 - mass / Fraction(k)   # exact slack; x(E) <= (1-eps)k iff eps <= face_eps
    warnings = []
    if eps is not None and float(face_eps) < float(eps) - 1e-15:
        raise ValueError("x(E) exceeds (1-eps)k for the requested eps")
    if eps is None and float(face_eps) < k ** (-1 / 5):
        warnings.append("mass slack below the default k**(-1/5) parameterization")
    if eps is None or Fraction(eps) != face_eps:
        warnings.append("eps set to the exact mass slack 1 - x(E)/k")
    eps = face_eps

    good_cap = int((1 - r * eps) * k)   # exact floor for a nonnegative Fraction
    bstar = math.sqrt(1.0 / float((1 - r) ** 2 * r * eps ** 3 * k))
    bad_cap = k - good_cap

    over, method, w2 = _overflow_given_item(D, good_cap, rng, mc_trials)
    warnings += w2
    good, bad = set(), set()
    for e, val in over.items():
        if isinstance(val, Fraction):
            is_good = float(val) <= bstar
        else:
            ci = 3 * math.sqrt(max(val * (1 - val), 1e-12) / max(mc_trials, 1))
            is_good = val <= bstar or (method.startswith("mc") and val <= bstar + ci)
            if method.startswith("mc") and bstar < val <= bstar + ci:
                warnings.append(f"item {e}: MC tie at the classification line, kept good")
        (good if is_good else bad).add(e)
    for e in D.elements:
        if x[e] == 0:
            good.add(e)  # inactive items never arrive; park them as good

    bucket_of = {e: ("good" if e in good else "bad") for e in D.elements}
    fam = BucketFamily(bucket_of, {"good": good_cap, "bad": bad_cap})
    params = TwoBucketParams(k, r, eps, good_cap, bad_cap, bstar,
                             frozenset(good), frozenset(bad), method, warnings)
    scheme = FixedScheme(fam, b=1 - Fraction(eps), c=1 - bstar,
                         name="uniform-two-bucket")
    scheme.params = params
    return scheme


# ---------------------------------------------------------------------------
# offline ordered CRS
# ---------------------------------------------------------------------------

@dataclass
class OfflineCRS:
    order: tuple
    scores: tuple            # elimination certificate per position
    bound: object            # (1+d)/(d^2 k) at the mass slack d
    k: int
    family: CapFamily

    @property
    def guarantee(self):
        return 1 - max(self.scores) if self.scores else Fraction(1)

    def run(self, active):
        return self.family.run(self.order, active)

    def balancedness(self, D):
        """Exact per-item Pr[selected | active] for the fixed order."""
        ex = D if isinstance(D, ExplicitSubsetDist) else D.to_explicit()
        x = D.marginals()
        num = {e: Fraction(0) for e in D.elements if x[e] > 0}
        for S in ex.support():
            pS = ex.prob(S)
            for e in self.run(S):
                if e in num:
                    num[e] += pS
        return {e: num[e] / x[e] for e in num}


def _hyper_tail(n, m, j, kk):
    """Pr[|R ∩ P| >= kk] for R a uniform j-subset of [n] and |P| = m."""
    if kk <= 0:
        return Fraction(1)
    total = math.comb(n, j)
    good = sum(math.comb(m, a) * math.comb(n - m, j - a)
               for a in range(kk, min(m, j) + 1))
    return Fraction(good, total)


def offline_uniform_crs(D, k, eps=None):
    """Build the back-to-front elimination order and its certificates."""
    k = int(k)
    x = D.marginals()
    mass = _mass(x)
    if mass >= k:
        raise ValueError("needs mass slack: x(E) < k")
    delta = 1 - mass / Fraction(k)
    if eps is not None and Fraction(eps) > delta:
        raise ValueError("requested eps exceeds the actual mass slack")
    d = Fraction(eps) if eps is not None else delta
    bound = (1 + d) / (d * d * k)

    items = [e for e in D.elements if x[e] > 0]

    if isinstance(D, SymmetricSizeDist) and len(items) == len(D.elements):
        # symmetric: all orders are equivalent; report the id order with the
        # per-position certificates in closed hypergeometric form
        n = len(D.elements)
        mu = D.marginal(D.elements[0])
        order = tuple(sorted(D.elements))
        scores = []
        for pos in range(n):          # prefix size pos+1 when placed
            m = pos + 1
            s = Fraction(0)
            for j, p in D.z.items():
                if j == 0:
                    continue
                # Pr[i in R, |R ∩ P_m| >= k | |R|=j]; i is one of the m
                pr_i = Fraction(j, n)
                tail = _hyper_tail(n - 1, m - 1, j - 1, k - 1)
                s += p * pr_i * tail
            scores.append(s / mu)
        return OfflineCRS(order, tuple(scores), bound, k,
                          CapFamily(k, D.elements))

    ex = D if isinstance(D, ExplicitSubsetDist) else D.to_explicit()
    survivors = list(items)
    placed_rev, scores_rev = [], []
    while survivors:
        sset = set(survivors)
        best, best_score = None, None
        for i in sorted(survivors):
            num = Fraction(0)
            for S in ex.support():
                if i in S and len(S & sset) >= k:
                    num += ex.prob(S)
            score = num / x[i]
            if best_score is None or score < best_score:
                best, best_score = i, score
        placed_rev.append(best)
        scores_rev.append(best_score)
        survivors.remove(best)
    order = tuple(reversed(placed_rev)) + tuple(e for e in D.elements if x[e] == 0)
    scores = tuple(reversed(scores_rev))
    return OfflineCRS(order, scores, bound, k, CapFamily(k, D.elements))


__all__ = [
    "simple_uniform_family", "simple_uniform_prepare", "AveragingReport",
    "averaging_overflow", "TwoBucketParams", "two_bucket_prepare",
    "OfflineCRS", "offline_uniform_crs",
]
