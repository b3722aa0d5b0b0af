"""Greedy feasible-set families and prepared schemes.

A greedy scheme keeps a selected set I and accepts an arriving active
element e iff I ∪ {e} stays in a down-closed family F fixed before arrivals.
The guarantee object is the order-free selection event

    sel(e, R) :=  [ I ∪ {e} ∈ F  for every I ∈ F with I ⊆ R ],

whose probability conditioned on e ∈ R is the scheme's selectability.  Each
concrete family implements `selectable` as a closed-form certificate for
that event; `selectable_bruteforce` is the reference semantics (enumerate
all I) that certificates are tested against.

PreparedScheme separates the deterministic description of a scheme from its
prepare-time randomness (a sampled independent set, sampled labels, or the
element coins of a subsampling wrapper): `realize(rng)` draws one concrete
family, and `realizations()` enumerates all (family, probability) pairs when
that is tractable, which is what makes exact selectability computations
possible.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .matroids import MatroidError


class GreedyFamily:
    """Down-closed family over a fixed ground tuple `elements`.  Arrivals
    outside the ground set are rejected by membership."""

    elements: tuple

    def member(self, I) -> bool:
        raise NotImplementedError

    def selectable(self, e, R) -> bool:
        return self.selectable_bruteforce(e, R)

    def selectable_bruteforce(self, e, R):
        """Reference semantics: every F-member inside R must accept e."""
        R = set(R)
        if e not in R:
            return False
        if not self.member({e}):
            return False
        pool = sorted(f for f in R if f != e and f in set(self.elements))
        for r in range(len(pool) + 1):
            for I in itertools.combinations(pool, r):
                I = set(I)
                if self.member(I) and not self.member(I | {e}):
                    return False
        return True

    def run(self, order, active):
        """Sequential greedy execution: returns the selected set."""
        active = set(active)
        I = set()
        for e in order:
            if e in active and self.member(I | {e}):
                I.add(e)
        return frozenset(I)


class SubsetFamily(GreedyFamily):
    """F = all subsets of a fixed independent set (low-density schemes)."""

    def __init__(self, allowed, elements):
        self.allowed = frozenset(allowed)
        self.elements = tuple(elements)

    def member(self, I):
        return set(I) <= self.allowed

    def selectable(self, e, R):
        return e in set(R) and e in self.allowed


class CapFamily(GreedyFamily):
    """F = subsets of `scope` of size at most cap (uniform-matroid greedy)."""

    def __init__(self, cap, scope):
        self.cap = int(cap)
        self.scope = frozenset(scope)
        self.elements = tuple(sorted(self.scope))
        if self.cap < 0:
            raise ValueError("negative capacity")

    def member(self, I):
        I = set(I)
        return I <= self.scope and len(I) <= self.cap

    def selectable(self, e, R):
        if e not in set(R) or e not in self.scope or self.cap < 1:
            return False
        return len(self.scope & set(R)) - 1 <= self.cap - 1


class BucketFamily(GreedyFamily):
    """F = sets respecting one counter per bucket (two-bucket uniform
    scheme).  `bucket_of` maps each coverable element to a bucket key."""

    def __init__(self, bucket_of, caps):
        self.bucket_of = dict(bucket_of)
        self.caps = {k: int(v) for k, v in dict(caps).items()}
        self.elements = tuple(sorted(self.bucket_of))

    def member(self, I):
        I = set(I)
        if not I <= set(self.bucket_of):
            return False
        counts = {}
        for f in I:
            k = self.bucket_of[f]
            counts[k] = counts.get(k, 0) + 1
            if counts[k] > self.caps[k]:
                return False
        return True

    def selectable(self, e, R):
        R = set(R)
        if e not in R or e not in self.bucket_of:
            return False
        k = self.bucket_of[e]
        if self.caps[k] < 1:
            return False
        same = sum(1 for f in R if f != e and self.bucket_of.get(f) == k)
        return same <= self.caps[k] - 1


class LabelFamily(GreedyFamily):
    """F = sets whose sampled labels are pairwise distinct (transversal)."""

    def __init__(self, labels):
        self.labels = dict(labels)
        self.elements = tuple(sorted(self.labels))

    def member(self, I):
        I = set(I)
        if not I <= set(self.labels):
            return False
        seen = set()
        for f in I:
            lab = self.labels[f]
            if lab in seen:
                return False
            seen.add(lab)
        return True

    def selectable(self, e, R):
        R = set(R)
        if e not in R or e not in self.labels:
            return False
        lab = self.labels[e]
        return all(self.labels.get(f) != lab for f in R if f != e and f in self.labels)


class ClassFamily(GreedyFamily):
    """F = at most one element per parallel class, and only from classes
    whose representative landed in the sampled base set (cographic)."""

    def __init__(self, class_of, open_classes, elements):
        self.class_of = dict(class_of)
        self.open_classes = frozenset(open_classes)
        self.elements = tuple(elements)

    def member(self, I):
        I = set(I)
        if not I <= set(self.class_of):
            return False
        seen = set()
        for f in I:
            c = self.class_of[f]
            if c not in self.open_classes or c in seen:
                return False
            seen.add(c)
        return True

    def selectable(self, e, R):
        R = set(R)
        if e not in R or e not in self.class_of:
            return False
        c = self.class_of[e]
        if c not in self.open_classes:
            return False
        return all(self.class_of.get(f) != c for f in R if f != e)


class ChainFamily(GreedyFamily):
    """F = sets whose slice at every chain level is independent in that
    level's contraction minor (graphic scheme).  `levels` is a list of
    (slice, minor) pairs; slices partition the ground set."""

    def __init__(self, levels):
        self.levels = [(frozenset(S), M) for S, M in levels]
        self.level_of = {}
        for idx, (S, _) in enumerate(self.levels):
            for f in S:
                if f in self.level_of:
                    raise MatroidError("chain slices overlap")
                self.level_of[f] = idx
        self.elements = tuple(sorted(self.level_of))

    def member(self, I):
        I = set(I)
        if not I <= set(self.level_of):
            return False
        for S, M in self.levels:
            part = I & S
            if part and not M.is_independent(part):
                return False
        return True

    def selectable(self, e, R):
        R = set(R)
        if e not in R or e not in self.level_of:
            return False
        S, M = self.levels[self.level_of[e]]
        return not M.in_span((R & S) - {e}, e)


class LaminarCapFamily(GreedyFamily):
    """F = sets respecting a nested system of capacities (rounded laminar
    scheme with per-constraint simple subschemes).

    The selection certificate: e is blocked exactly when some constraint A
    containing e can be filled to capacity by an F-feasible subset of
    R ∖ {e}.  That fill number is the laminar-matroid rank of (R ∖ {e}) ∩ A
    under the constraints nested inside A (a witness of size c(A) never
    violates the strictly larger caps outside A), computed greedily.
    """

    def __init__(self, constraints, elements):
        """constraints: list of (frozenset members, cap), laminar."""
        self.constraints = [(frozenset(A), int(c)) for A, c in constraints]
        self.elements = tuple(elements)
        self._scope = frozenset().union(*(A for A, _ in self.constraints)) \
            if self.constraints else frozenset()

    def member(self, I):
        I = set(I)
        if not I <= set(self.elements):
            return False
        return all(len(I & A) <= c for A, c in self.constraints)

    def _fill_rank(self, pool, inside):
        """Greedy laminar rank of `pool` under the constraints nested in
        `inside` (including `inside` itself)."""
        caps = [(A, c) for A, c in self.constraints if A <= inside]
        counts = [0] * len(caps)
        got = 0
        for f in sorted(pool):
            ok = all(counts[i] < c for i, (A, c) in enumerate(caps) if f in A)
            if ok:
                got += 1
                for i, (A, c) in enumerate(caps):
                    if f in A:
                        counts[i] += 1
        return got

    def selectable(self, e, R):
        R = set(R)
        if e not in R or e not in set(self.elements):
            return False
        for A, c in self.constraints:
            if e not in A:
                continue
            if c < 1:
                return False
            if self._fill_rank((R - {e}) & A, A) >= c:
                return False
        return True


class IntersectionFamily(GreedyFamily):
    """F = intersection of sub-families whose ground sets partition E.
    With disjoint grounds the selection event is local to e's own
    sub-family (used for gluing regular-matroid leaf schemes)."""

    def __init__(self, parts, elements):
        self.parts = list(parts)
        self.elements = tuple(elements)
        self._owner = {}
        for idx, fam in enumerate(self.parts):
            for f in fam.elements:
                if f in self._owner:
                    raise MatroidError("sub-family grounds overlap")
                self._owner[f] = idx

    def member(self, I):
        I = set(I)
        if not I <= set(self._owner):
            return False
        for idx, fam in enumerate(self.parts):
            part = {f for f in I if self._owner[f] == idx}
            if not fam.member(part):
                return False
        return True

    def selectable(self, e, R):
        R = set(R)
        if e not in R or e not in self._owner:
            return False
        fam = self.parts[self._owner[e]]
        return fam.selectable(e, R & set(fam.elements))


class RestrictedFamily(GreedyFamily):
    """Inner family intersected with the subsets of a kept set S — the
    realized form of the subsampling wrapper: F' = {I in F : I ⊆ S}."""

    def __init__(self, inner, kept):
        self.inner = inner
        self.kept = frozenset(kept)
        self.elements = inner.elements

    def member(self, I):
        I = set(I)
        return I <= self.kept and self.inner.member(I)

    def selectable(self, e, R):
        if e not in self.kept:
            return False
        return self.inner.selectable(e, set(R) & self.kept)

    def selectable_bruteforce(self, e, R):
        if e not in self.kept:
            return False
        return super().selectable_bruteforce(e, R)


# ---------------------------------------------------------------------------
# prepared schemes
# ---------------------------------------------------------------------------

class PreparedScheme:
    """A scheme whose deterministic preparation is done; what remains is the
    prepare-time randomness.  `realize(rng)` draws one concrete family.
    `realizations()` returns the full list of (family, probability) pairs,
    or None when enumeration is intractable (then only MC modes apply).

    b: arrival-rate scaling the guarantee assumes (marginals in b·P);
    c: the guaranteed selectability at that rate.
    """

    def __init__(self, b, c, name=""):
        self.b = Fraction(b)
        self.c = Fraction(c) if not isinstance(c, float) else c
        self.name = name

    def realize(self, rng) -> GreedyFamily:
        raise NotImplementedError

    def realizations(self):
        return None

    @property
    def guarantee(self):
        return self.c


class FixedScheme(PreparedScheme):
    """No prepare-time randomness: a single concrete family."""

    def __init__(self, family, b, c, name=""):
        super().__init__(b, c, name)
        self.family = family

    def realize(self, rng):
        return self.family

    def realizations(self):
        return [(self.family, Fraction(1))]


class MixtureScheme(PreparedScheme):
    """Explicit distribution over concrete families (sampled base set,
    sampled labels...)."""

    def __init__(self, weighted_families, b, c, name=""):
        super().__init__(b, c, name)
        self.weighted = [(fam, Fraction(p)) for fam, p in weighted_families]
        total = sum((p for _, p in self.weighted), Fraction(0))
        if total != 1:
            raise ValueError(f"family weights sum to {total}")
        self._cum = None

    def realize(self, rng):
        if self._cum is None:
            acc, cum = 0.0, []
            for _, p in self.weighted:
                acc += float(p)
                cum.append(acc)
            cum[-1] = 1.0
            self._cum = cum
        u = rng.random()
        for (fam, _), edge in zip(self.weighted, self._cum):
            if u <= edge:
                return fam
        return self.weighted[-1][0]

    def realizations(self):
        return list(self.weighted)


class ScaledScheme(PreparedScheme):
    """Subsampling wrapper: draw a kept set S elementwise with probability
    keep, prepare the inner scheme for the thinned distribution, and use
    F' = {I in inner F : I ⊆ S}.  Turns a (b0·keep... ) — precisely: an
    inner (b_in, c_in) scheme consuming the thinned distribution becomes a
    (b_in/keep, keep·c_in) scheme for the original one.
    """

    REALIZE_LIMIT = 18

    def __init__(self, inner: PreparedScheme, keep, name=""):
        keep = Fraction(keep)
        if not 0 <= keep <= 1:
            raise ValueError("keep probability outside [0,1]")
        cin = inner.c
        c = keep * cin if not isinstance(cin, float) else float(keep) * cin
        super().__init__(inner.b / keep if keep else Fraction(0), c,
                         name or f"scaled({inner.name})")
        self.inner = inner
        self.keep = keep
        self.elements = None  # set at prepare time by callers if needed

    def realize(self, rng):
        fam = self.inner.realize(rng)
        u = rng.random(len(fam.elements))
        kept = frozenset(e for e, ue in zip(fam.elements, u) if ue < float(self.keep))
        return RestrictedFamily(fam, kept)

    def realizations(self):
        inner_real = self.inner.realizations()
        if inner_real is None:
            return None
        ground = inner_real[0][0].elements
        if len(ground) > self.REALIZE_LIMIT:
            return None
        out = []
        for r in range(len(ground) + 1):
            for kept in itertools.combinations(ground, r):
                pk = self.keep ** r * (1 - self.keep) ** (len(ground) - r)
                if pk == 0:
                    continue
                for fam, p in inner_real:
                    out.append((RestrictedFamily(fam, frozenset(kept)), pk * p))
        return out


__all__ = [
    "GreedyFamily", "SubsetFamily", "CapFamily", "BucketFamily",
    "LabelFamily", "ClassFamily", "ChainFamily", "LaminarCapFamily",
    "IntersectionFamily", "RestrictedFamily", "PreparedScheme",
    "FixedScheme", "MixtureScheme", "ScaledScheme",
]
