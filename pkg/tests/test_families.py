"""Greedy families: membership, certificates vs brute force, scheme algebra."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from ocrskit.distributions import ProductDist, twise_symmetric
from ocrskit.families import (BucketFamily, CapFamily, ChainFamily,
                              ClassFamily, FixedScheme, GreedyFamily,
                              IntersectionFamily, LabelFamily,
                              LaminarCapFamily, MixtureScheme, ScaledScheme,
                              SubsetFamily)
from ocrskit.matroids import GraphicMatroid, MatroidError, complete_graph


def sweep_agreement(fam, n):
    """Certificate == brute force over every (e, R) with R <= ground."""
    ground = sorted(fam.elements)[:n]
    for r in range(1, len(ground) + 1):
        for R in itertools.combinations(ground, r):
            R = frozenset(R)
            for e in R:
                assert fam.selectable(e, R) == \
                    fam.selectable_bruteforce(e, R), (type(fam).__name__, e, R)


def test_cap_family():
    fam = CapFamily(2, range(5))
    assert fam.member({0, 1}) and not fam.member({0, 1, 2})
    assert fam.selectable(0, {0, 1}) and not fam.selectable(0, {0, 1, 2})
    sweep_agreement(fam, 5)


def test_cap_family_rejects_negative():
    with pytest.raises(ValueError):
        CapFamily(-1, range(3))


def test_bucket_family():
    fam = BucketFamily({0: "a", 1: "a", 2: "a", 3: "b", 4: "b"},
                       {"a": 2, "b": 1})
    assert fam.member({0, 1, 3})
    assert not fam.member({0, 1, 2})
    assert not fam.member({3, 4})
    sweep_agreement(fam, 5)


def test_subset_family():
    fam = SubsetFamily({0, 2}, range(4))
    assert fam.selectable(0, {0, 1, 2, 3})
    assert not fam.selectable(1, {0, 1})
    sweep_agreement(fam, 4)


def test_label_family():
    fam = LabelFamily({0: "x", 1: "x", 2: "y", 3: "z"})
    assert fam.member({0, 2, 3})
    assert not fam.member({0, 1})
    assert fam.selectable(2, {0, 1, 2})
    assert not fam.selectable(0, {0, 1, 2})
    sweep_agreement(fam, 4)


def test_class_family():
    fam = ClassFamily({0: "p", 1: "p", 2: "q", 3: "r"},
                      open_classes={"p", "q"}, elements=range(4))
    assert fam.member({0, 2}) and not fam.member({3}) and not fam.member({0, 1})
    assert fam.selectable(2, {2, 3})
    assert not fam.selectable(3, {3})          # class closed
    assert not fam.selectable(0, {0, 1})       # class mate active
    sweep_agreement(fam, 4)


def test_chain_family_single_level_is_forest_rule():
    G = complete_graph(4)
    M = GraphicMatroid(G)
    fam = ChainFamily([(frozenset(range(6)), M)])
    assert fam.member({0, 1, 2})               # a star is a forest
    assert not fam.member({0, 1, 3})           # triangle
    assert not fam.selectable(3, {0, 1, 3})    # spanned by companions
    sweep_agreement(fam, 6)


def test_chain_family_rejects_overlapping_slices():
    M = GraphicMatroid(complete_graph(3))
    with pytest.raises(MatroidError):
        ChainFamily([(frozenset({0, 1}), M), (frozenset({1, 2}), M)])


def test_laminar_cap_family_nested_certificate():
    # outer cap 4 over 0..6, inner cap 2 over 0..4: filling the inner
    # constraint also consumes the outer budget, which a naive per-
    # constraint conjunction would miss.
    fam = LaminarCapFamily([(frozenset(range(7)), 4),
                            (frozenset(range(5)), 2)], range(8))
    R = frozenset({0, 1, 2, 3, 4, 6})
    assert fam.selectable(6, R)
    sweep_agreement(fam, 7)


def test_intersection_family_disjoint_grounds():
    a = CapFamily(1, {0, 1})
    b = CapFamily(1, {2, 3})
    fam = IntersectionFamily([a, b], elements=range(4))
    assert fam.member({0, 2}) and not fam.member({0, 1})
    assert not fam.member({0, 2, 3})
    # selection is local to the owning sub-family
    assert fam.selectable(0, {0, 2, 3}) and not fam.selectable(0, {0, 1})
    sweep_agreement(fam, 4)


def test_intersection_family_rejects_overlap():
    with pytest.raises(MatroidError):
        IntersectionFamily([CapFamily(1, {0, 1}), CapFamily(1, {1, 2})],
                           elements=range(3))


def test_run_is_greedy_in_order():
    fam = CapFamily(1, range(3))
    assert fam.run([2, 1, 0], {0, 1, 2}) == frozenset({2})
    assert fam.run([0, 1, 2], {1, 2}) == frozenset({1})


def test_down_closed_on_random_families():
    rng = np.random.default_rng(5)
    fams = [
        CapFamily(2, range(6)),
        BucketFamily({i: i % 2 for i in range(6)}, {0: 2, 1: 1}),
        LabelFamily({i: i // 2 for i in range(6)}),
        LaminarCapFamily([(frozenset(range(6)), 3),
                          (frozenset(range(3)), 1)], range(6)),
    ]
    for fam in fams:
        for _ in range(200):
            I = {e for e in range(6) if rng.random() < 0.5}
            if fam.member(I):
                for e in list(I):
                    assert fam.member(I - {e}), (type(fam).__name__, I, e)


# ---------------------------------------------------------------------------
# schemes
# ---------------------------------------------------------------------------

def test_fixed_scheme_realizations():
    fam = CapFamily(1, range(3))
    s = FixedScheme(fam, b=Fraction(1, 2), c=Fraction(1, 2))
    assert s.realizations() == [(fam, Fraction(1))]
    assert s.realize(np.random.default_rng(0)) is fam
    assert s.guarantee == Fraction(1, 2)


def test_mixture_scheme_weights():
    a, b = CapFamily(1, range(2)), CapFamily(2, range(2))
    s = MixtureScheme([(a, Fraction(1, 3)), (b, Fraction(2, 3))],
                      b=Fraction(1, 2), c=Fraction(1, 4))
    assert sum(w for _, w in s.realizations()) == 1
    counts = {1: 0, 2: 0}
    rng = np.random.default_rng(3)
    for _ in range(3000):
        counts[s.realize(rng).cap] += 1
    assert abs(counts[1] / 3000 - 1 / 3) < 0.05


def test_scaled_scheme_guarantee_and_masking():
    inner = FixedScheme(CapFamily(1, range(4)), b=Fraction(1, 2),
                        c=Fraction(1, 2))
    s = ScaledScheme(inner, keep=Fraction(1, 2))
    assert s.b == 1                       # any marginals in the full polytope
    assert s.c == Fraction(1, 4)          # keep * inner.c
    rng = np.random.default_rng(1)
    fam = s.realize(rng)
    # the realized family only admits kept elements
    assert set(fam.elements) <= set(range(4))


def test_scaled_scheme_exact_factorization():
    """Exact selectability of the wrapped scheme = keep * inner selectability
    on the thinned distribution (independent thinning)."""
    from ocrskit.harness import scale_wrapper, selectability
    from ocrskit.structured import graphic_chain_prepare
    G = complete_graph(4)
    b = Fraction(1, 4)
    Dfull = ProductDist({e: Fraction(1, 2) for e in range(6)})
    Dthin = ProductDist({e: Fraction(1, 8) for e in range(6)})
    inner = graphic_chain_prepare(G, Dthin, b)
    rep_in = selectability(inner, Dthin, mode="exact")
    wrapped = scale_wrapper(lambda Dt: graphic_chain_prepare(G, Dt, b), b)
    rep_out = selectability(wrapped(Dfull), Dfull, mode="exact")
    by_item_in = {s.item: s.estimate for s in rep_in.stats}
    for s in rep_out.stats:
        assert s.estimate == by_item_in[s.item] * Fraction(1, 4)


def test_inherited_selectable_is_bruteforce():
    class Plain(GreedyFamily):
        def __init__(self):
            self.elements = (0, 1)

        def member(self, I):
            return len(set(I)) <= 1
    p = Plain()
    assert p.selectable(0, {0}) and not p.selectable(0, {0, 1})
