"""Distributions over subsets of a ground set with limited independence.

A distribution D over subsets R is consistent-to-level-t with a marginal
vector x if every tuple T of at most t distinct elements has
Pr[T subseteq R] = prod_{i in T} x_i.  t=2 is the pairwise-independent case
the schemes in this package are built for.

Three concrete representations:
  * ExplicitSubsetDist -- finite list of (outcome, rational probability);
  * SymmetricSizeDist  -- exchangeable distribution given by its size profile
    z (Pr[R=S] = z_{|S|}/C(n,|S|)), kept compact so n=64 works;
  * ProductDist        -- independent Bernoulli marginals (sampling-friendly).

File formats: explicit distributions are lines `<prob> : <id id ...>`
(empty id list for the empty set), z-profiles are lines `z <j> <prob>`,
probabilities as exact rationals like 3/8.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb


class DistributionError(ValueError):
    pass


EXPAND_LIMIT = 300000


@dataclass
class IndependenceReport:
    ok: bool
    level: int
    violation: tuple | None = None   # offending element tuple
    expected: Fraction | None = None
    actual: Fraction | None = None

    def __bool__(self):
        return self.ok


class SubsetDistribution:
    """Base: elements tuple + exact marginals; subclasses add sampling and,
    where available, exact outcome iteration."""

    elements: tuple

    def marginals(self):
        raise NotImplementedError

    def marginal(self, e):
        return self.marginals()[e]

    def sample(self, rng):
        raise NotImplementedError

    def is_explicit(self):
        return False


class ExplicitSubsetDist(SubsetDistribution):
    def __init__(self, outcomes, elements=None):
        """outcomes: iterable of (subset, probability). Probabilities must be
        nonnegative rationals summing to exactly one."""
        merged = {}
        for S, p in outcomes:
            key = frozenset(int(e) for e in S)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(p)
        self.outcomes = sorted(merged.items(), key=lambda kv: sorted(kv[0]))
        total = sum((p for _, p in self.outcomes), Fraction(0))
        if total != 1:
            raise DistributionError(f"probabilities sum to {total}, not 1")
        if any(p < 0 for _, p in self.outcomes):
            raise DistributionError("negative probability")
        ground = set()
        for S, _ in self.outcomes:
            ground |= S
        if elements is not None:
            ground |= set(int(e) for e in elements)
        self.elements = tuple(sorted(ground))
        self._marginals = None
        self._bitview = None
        self._cum = None

    def is_explicit(self):
        return True

    def support(self):
        return [S for S, p in self.outcomes if p > 0]

    def prob(self, S):
        S = frozenset(S)
        for T, p in self.outcomes:
            if T == S:
                return p
        return Fraction(0)

    def marginals(self):
        if self._marginals is None:
            m = {e: Fraction(0) for e in self.elements}
            for S, p in self.outcomes:
                for e in S:
                    m[e] += p
            self._marginals = m
        return self._marginals

    def tuple_prob(self, T):
        T = set(T)
        return sum((p for S, p in self.outcomes if T <= S), Fraction(0))

    def bitmask_view(self):
        """(element order, outcome masks, integer numerators, denominator):
        integer view over a common denominator for fast exact sweeps."""
        if self._bitview is None:
            order = self.elements
            pos = {e: i for i, e in enumerate(order)}
            den = 1
            for _, p in self.outcomes:
                den = den * p.denominator // _gcd(den, p.denominator)
            masks, nums = [], []
            for S, p in self.outcomes:
                m = 0
                for e in S:
                    m |= 1 << pos[e]
                masks.append(m)
                nums.append(int(p * den))
            self._bitview = (order, masks, nums, den)
        return self._bitview

    def project(self, keep):
        """Marginal distribution of R ∩ keep."""
        keep = frozenset(keep)
        return ExplicitSubsetDist(
            [(S & keep, p) for S, p in self.outcomes],
            elements=[e for e in self.elements if e in keep])

    def condition_contains(self, e):
        """Distribution of R given e in R."""
        xe = self.marginal(e)
        if xe == 0:
            raise DistributionError(f"conditioning on zero-probability element {e}")
        return ExplicitSubsetDist(
            [(S, p / xe) for S, p in self.outcomes if e in S],
            elements=self.elements)

    def sample(self, rng):
        if self._cum is None:
            sets = [S for S, _ in self.outcomes]
            probs = [float(p) for _, p in self.outcomes]
            cum = []
            acc = 0.0
            for p in probs:
                acc += p
                cum.append(acc)
            cum[-1] = 1.0
            self._cum = (sets, cum)
        sets, cum = self._cum
        u = rng.random()
        lo, hi = 0, len(cum) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if u <= cum[mid]:
                hi = mid
            else:
                lo = mid + 1
        return sets[lo]


class SymmetricSizeDist(SubsetDistribution):
    def __init__(self, n, z, elements=None):
        """z: dict size -> probability of drawing a uniform subset of that
        size.  Pr[R=S] = z_{|S|}/C(n,|S|)."""
        self.n = int(n)
        self.z = {int(j): Fraction(p) for j, p in dict(z).items() if Fraction(p) != 0}
        if any(p < 0 for p in self.z.values()):
            raise DistributionError("negative size probability")
        if sum(self.z.values(), Fraction(0)) != 1:
            raise DistributionError("size probabilities do not sum to 1")
        if any(not 0 <= j <= self.n for j in self.z):
            raise DistributionError("size out of range")
        self.elements = tuple(range(self.n)) if elements is None else tuple(sorted(elements))
        if len(self.elements) != self.n:
            raise DistributionError("element list does not match n")

    def marginals(self):
        mu = sum((p * Fraction(j, self.n) for j, p in self.z.items()), Fraction(0))
        return {e: mu for e in self.elements}

    def tuple_prob_by_size(self, ell):
        """Pr[T subseteq R] for any tuple of ell distinct elements."""
        n = self.n
        return sum((p * Fraction(comb(n - ell, j - ell), comb(n, j))
                    for j, p in self.z.items() if j >= ell), Fraction(0))

    def tuple_prob(self, T):
        return self.tuple_prob_by_size(len(set(T)))

    def miss_prob_by_size(self, s):
        """Pr[R ∩ S = emptyset] for any |S| = s."""
        n = self.n
        return sum((p * Fraction(comb(n - s, j), comb(n, j))
                    for j, p in self.z.items() if j <= n - s), Fraction(0))

    def support_size(self):
        return sum(comb(self.n, j) for j in self.z)

    def to_explicit(self, limit=EXPAND_LIMIT):
        if self.support_size() > limit:
            raise DistributionError(
                f"support has {self.support_size()} sets, over the expand limit {limit}")
        outcomes = []
        for j, p in self.z.items():
            share = p / comb(self.n, j)
            for S in itertools.combinations(self.elements, j):
                outcomes.append((frozenset(S), share))
        return ExplicitSubsetDist(outcomes, elements=self.elements)

    def sample(self, rng):
        sizes = sorted(self.z)
        probs = [float(self.z[j]) for j in sizes]
        u = rng.random()
        acc = 0.0
        pick = sizes[-1]
        for j, p in zip(sizes, probs):
            acc += p
            if u <= acc:
                pick = j
                break
        chosen = rng.choice(len(self.elements), size=pick, replace=False)
        return frozenset(self.elements[i] for i in chosen)


class ProductDist(SubsetDistribution):
    def __init__(self, x):
        """Independent Bernoulli inclusion with exact marginals x (dict)."""
        self.x = {int(e): Fraction(v) for e, v in dict(x).items()}
        if any(not 0 <= v <= 1 for v in self.x.values()):
            raise DistributionError("marginal outside [0,1]")
        self.elements = tuple(sorted(self.x))

    def marginals(self):
        return dict(self.x)

    def tuple_prob(self, T):
        out = Fraction(1)
        for e in set(T):
            out *= self.x[e]
        return out

    def to_explicit(self, limit=EXPAND_LIMIT):
        n = len(self.elements)
        if 2 ** n > limit:
            raise DistributionError("product expansion too large")
        outcomes = []
        for r in range(n + 1):
            for S in itertools.combinations(self.elements, r):
                Sset = frozenset(S)
                p = Fraction(1)
                for e in self.elements:
                    p *= self.x[e] if e in Sset else 1 - self.x[e]
                outcomes.append((Sset, p))
        return ExplicitSubsetDist(outcomes, elements=self.elements)

    def sample(self, rng):
        u = rng.random(len(self.elements))
        return frozenset(e for e, ue in zip(self.elements, u) if ue < float(self.x[e]))

    def project(self, keep):
        """Marginal distribution of R ∩ keep (still a product)."""
        keep = set(keep)
        return ProductDist({e: v for e, v in self.x.items() if e in keep})


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------

class InfeasibleZ(DistributionError):
    def __init__(self, n, t, smallest_feasible):
        self.n = n
        self.t = t
        self.smallest_feasible = smallest_feasible
        msg = f"no nonnegative size profile for n={n}, t={t}"
        if smallest_feasible is not None:
            msg += f"; smallest feasible n is {smallest_feasible}"
        super().__init__(msg)


def _twise_system_solve(n, t):
    """Solve the moment system for the exactly-t-wise symmetric profile.

    Even t: support sizes 0..t.  Odd t: support 0..t-1 plus the full set with
    z_n = n^-t.  The system is upper triangular in the size index, so plain
    back substitution.  May return negative entries; feasibility is the
    caller's problem.
    """
    n = int(n)
    t = int(t)
    if t < 1 or n < t:
        raise DistributionError("need n >= t >= 1")

    def G(ell):
        # n^ell * (n-ell)! / n!  ==  n^ell / (n * (n-1) * ... * (n-ell+1))
        denom = 1
        for i in range(ell):
            denom *= n - i
        return Fraction(n ** ell, denom)

    def c(ell, j):
        out = 1
        for i in range(ell):
            out *= j - i
        return out

    if t % 2 == 0:
        sizes = list(range(t + 1))
        z = {}
        for ell in range(t, -1, -1):
            acc = sum((G(ell) * c(ell, j) * z[j] for j in sizes if j > ell), Fraction(0))
            z[ell] = (1 - acc) / (G(ell) * c(ell, ell))
        return z
    # odd t: z_n pinned by the ell = t equation (only the full set survives)
    zn = Fraction(1, n ** t)
    sizes = list(range(t))
    z = {n: zn}
    for ell in range(t - 1, -1, -1):
        acc = Fraction(n ** ell) * zn
        acc += sum((G(ell) * c(ell, j) * z[j] for j in sizes if j > ell), Fraction(0))
        z[ell] = (1 - acc) / (G(ell) * c(ell, ell))
    return z


def solve_twise_z(n, t, search_bound=4096):
    """Nonnegative exactly-t-wise size profile for marginal 1/n, or raise
    InfeasibleZ carrying the smallest feasible n found by search."""
    z = _twise_system_solve(n, t)
    if all(v >= 0 for v in z.values()):
        return z
    smallest = None
    for m in range(t, search_bound + 1):
        zz = _twise_system_solve(m, t)
        if all(v >= 0 for v in zz.values()):
            smallest = m
            break
    raise InfeasibleZ(n, t, smallest)


def smallest_feasible_n(t, search_bound=4096):
    for m in range(t, search_bound + 1):
        z = _twise_system_solve(m, t)
        if all(v >= 0 for v in z.values()):
            return m
    raise DistributionError(f"no feasible n up to {search_bound} for t={t}")


def twise_symmetric(n, t):
    """The exactly-t-wise-independent symmetric distribution with marginal
    1/n on ground set 0..n-1 (compact size-profile representation)."""
    return SymmetricSizeDist(n, solve_twise_z(n, t))


def twise_z_by_cramer(n, t):
    """Same system solved by Cramer's rule (cross-check path, not the
    production algorithm)."""
    from .linalg import det_rational
    n = int(n)
    t = int(t)
    if t % 2 == 0:
        sizes = list(range(t + 1))
    else:
        sizes = list(range(t)) + [n]

    def G(ell, j):
        if j == n and t % 2 == 1:
            return Fraction(n ** ell)
        denom = 1
        for i in range(ell):
            denom *= n - i
        coef = 1
        for i in range(ell):
            coef *= j - i
        return Fraction(n ** ell * coef, denom)

    A = [[G(ell, j) for j in sizes] for ell in range(t + 1)]
    d = det_rational(A)
    out = {}
    for col, j in enumerate(sizes):
        Acol = [[A[r][c] if c != col else Fraction(1) for c in range(len(sizes))]
                for r in range(t + 1)]
        out[j] = det_rational(Acol) / d
    return out


def symmetric_from_z(n, z, limit=EXPAND_LIMIT):
    """Explicit distribution from a size profile (materialized support)."""
    return SymmetricSizeDist(n, z).to_explicit(limit=limit)


def kn_cycle_dist(n):
    """The hard pairwise-independent instance on the edges of K_n (n odd,
    >= 5): with probability n(n-1)/((n+3)(n-2)) draw a uniformly random
    cycle of length (n+3)/2, otherwise the empty set.  Edge ids follow
    lexicographic pair order (matching complete_graph)."""
    n = int(n)
    if n < 5 or n % 2 == 0:
        raise DistributionError("needs odd n >= 5")
    L = (n + 3) // 2
    pairs = list(itertools.combinations(range(n), 2))
    eid = {p: i for i, p in enumerate(pairs)}

    def edge(u, v):
        return eid[(u, v) if u < v else (v, u)]

    cycles = []
    for verts in itertools.combinations(range(n), L):
        first = verts[0]
        rest = verts[1:]
        for perm in itertools.permutations(rest):
            if perm[0] > perm[-1]:
                continue  # fix direction: one representative per cycle
            cyc = (first,) + perm
            edges = frozenset(edge(cyc[i], cyc[(i + 1) % L]) for i in range(L))
            cycles.append(edges)
    p_cycle_total = Fraction(n * (n - 1), (n + 3) * (n - 2))
    share = p_cycle_total / len(cycles)
    outcomes = [(c, share) for c in cycles]
    outcomes.append((frozenset(), 1 - p_cycle_total))
    return ExplicitSubsetDist(outcomes, elements=range(len(pairs)))


def pair_singleton_dist(n):
    """Pairwise-independent hard instance for single-item selection: each
    singleton with probability 1/n^2, each pair with probability 1/n^2, the
    empty set otherwise; marginals are exactly 1/n."""
    n = int(n)
    if n < 2:
        raise DistributionError("needs n >= 2")
    unit = Fraction(1, n * n)
    outcomes = [(frozenset([i]), unit) for i in range(n)]
    outcomes += [(frozenset(p), unit) for p in itertools.combinations(range(n), 2)]
    used = sum((p for _, p in outcomes), Fraction(0))
    outcomes.append((frozenset(), 1 - used))
    return ExplicitSubsetDist(outcomes, elements=range(n))


def subsample(D, p, limit=EXPAND_LIMIT):
    """Independent p-thinning of D: every element of the drawn set is kept
    independently with probability p.  Consistency-to-level-t with x becomes
    consistency with p*x.  Exact for the explicit / symmetric / product
    representations."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise DistributionError("keep probability outside [0,1]")
    if isinstance(D, ProductDist):
        return ProductDist({e: p * v for e, v in D.x.items()})
    if isinstance(D, SymmetricSizeDist):
        # thinning a uniform j-set gives a uniform m-set, binomially in m
        z = {}
        for j, w in D.z.items():
            for m in range(j + 1):
                z[m] = z.get(m, Fraction(0)) + w * comb(j, m) * p ** m * (1 - p) ** (j - m)
        return SymmetricSizeDist(D.n, z, elements=D.elements)
    if isinstance(D, ExplicitSubsetDist):
        est = sum(2 ** len(S) for S in D.support())
        if est > limit:
            raise DistributionError(f"subsample expansion ~{est} sets over limit {limit}")
        out = {}
        for S, w in D.outcomes:
            S = sorted(S)
            for r in range(len(S) + 1):
                for T in itertools.combinations(S, r):
                    key = frozenset(T)
                    out[key] = out.get(key, Fraction(0)) + \
                        w * p ** r * (1 - p) ** (len(S) - r)
        return ExplicitSubsetDist(list(out.items()), elements=D.elements)
    raise DistributionError(f"cannot subsample {type(D).__name__}")


class ThinnedSamplerDist(SubsetDistribution):
    """Sampling-only p-thinning wrapper for distributions that cannot be
    expanded (keeps exact declared marginals)."""

    def __init__(self, base, p):
        self.base = base
        self.p = Fraction(p)
        self.elements = base.elements

    def marginals(self):
        return {e: self.p * v for e, v in self.base.marginals().items()}

    def sample(self, rng):
        R = self.base.sample(rng)
        if not R:
            return R
        keep = rng.random(len(R))
        fp = float(self.p)
        return frozenset(e for e, u in zip(sorted(R), keep) if u < fp)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

def verify_independence(D, t):
    """Exact check that D is consistent-to-level-t with its own marginals:
    every tuple of ell <= t distinct elements has joint probability equal to
    the product of marginals.  Returns the first violation found."""
    t = int(t)
    if isinstance(D, SymmetricSizeDist):
        mu = D.marginal(D.elements[0])
        for ell in range(1, t + 1):
            if ell > D.n:
                break
            actual = D.tuple_prob_by_size(ell)
            expected = mu ** ell
            if actual != expected:
                return IndependenceReport(False, ell, tuple(D.elements[:ell]),
                                          expected, actual)
        return IndependenceReport(True, t)
    if isinstance(D, ProductDist):
        D = D.to_explicit()
    if not isinstance(D, ExplicitSubsetDist):
        raise DistributionError("exact verification needs an explicit form")
    x = D.marginals()
    for ell in range(1, t + 1):
        joint = {}
        for S, p in D.outcomes:
            if p == 0 or len(S) < ell:
                continue
            for T in itertools.combinations(sorted(S), ell):
                joint[T] = joint.get(T, Fraction(0)) + p
        for T in itertools.combinations(D.elements, ell):
            expected = Fraction(1)
            for e in T:
                expected *= x[e]
            actual = joint.get(T, Fraction(0))
            if actual != expected:
                return IndependenceReport(False, ell, T, expected, actual)
    return IndependenceReport(True, t)


# ---------------------------------------------------------------------------
# file format
# ---------------------------------------------------------------------------

def load_explicit_dist(text):
    outcomes = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        prob, _, ids = line.partition(":")
        outcomes.append((frozenset(int(x) for x in ids.split()), Fraction(prob.strip())))
    return ExplicitSubsetDist(outcomes)


def dump_explicit_dist(D: ExplicitSubsetDist):
    lines = []
    for S, p in D.outcomes:
        lines.append(f"{p} : {' '.join(str(e) for e in sorted(S))}".rstrip())
    return "\n".join(lines) + "\n"


def load_zvector(text):
    z = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "z":
            raise DistributionError(f"bad z line: {line!r}")
        z[int(parts[1])] = Fraction(parts[2])
    return z


def dump_zvector(z):
    return "\n".join(f"z {j} {z[j]}" for j in sorted(z)) + "\n"


__all__ = [
    "DistributionError", "IndependenceReport", "SubsetDistribution",
    "ExplicitSubsetDist", "SymmetricSizeDist", "ProductDist", "InfeasibleZ",
    "solve_twise_z", "smallest_feasible_n", "twise_symmetric",
    "twise_z_by_cramer", "symmetric_from_z", "kn_cycle_dist",
    "pair_singleton_dist", "subsample", "ThinnedSamplerDist",
    "verify_independence", "load_explicit_dist", "dump_explicit_dist",
    "load_zvector", "dump_zvector",
]
