"""Shipped fixtures and instance generators.

The `data/` directory next to this module holds small graphs, a laminar
family, a bipartite graph, binary matrices, and decomposition trees; the
functions here load them and build the distributions, value instances, and
prepared schemes that the tests, the acceptance gate, and the CLI share.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .distributions import (ExplicitSubsetDist, ProductDist,
                            pair_singleton_dist, twise_symmetric)
from .matroids import (LaminarMatroid, Multigraph, load_binary,
                       load_bipartite, load_graph, load_laminar)
from .regular import DecompositionTree, load_decomposition
from .single_item import ValueInstance, threshold_hard_instance

DATA_DIR = Path(__file__).resolve().parent / "data"

GOOD_TREES = ("two_triangles", "k4_3sum", "r10_triangle")
BAD_TREES = ("bad_3sum", "bad_root", "doubled_root")


def data_path(name) -> Path:
    p = DATA_DIR / name
    if not p.exists():
        raise FileNotFoundError(f"no shipped fixture named {name!r}")
    return p


def read_data(name) -> str:
    return data_path(name).read_text()


def fixture_graph(name) -> Multigraph:
    """triangle, k4, k5, or prism."""
    return load_graph(read_data(f"{name}.graph"))


def fixture_laminar() -> LaminarMatroid:
    return load_laminar(read_data("laminar24.lam"))


def fixture_transversal():
    return load_bipartite(read_data("fan43.bipartite"))


def fixture_binary(name):
    return load_binary(read_data(f"{name}.bin"))


def fixture_tree(name) -> DecompositionTree:
    return load_decomposition(read_data(f"{name}.dcmp"), base_dir=DATA_DIR)


# ---------------------------------------------------------------------------
# distributions paired with the shipped matroids
# ---------------------------------------------------------------------------

def laminar24_dist() -> ProductDist:
    """Product marginals 2/75 on the 24-element laminar fixture: every
    rounded constraint (16/8/4 over 24/12/6 elements) sits exactly on its
    1/25 slack face."""
    M = fixture_laminar()
    return ProductDist({e: Fraction(2, 75) for e in M.elements})


def two_triangles_dist() -> ProductDist:
    """Product marginals 1/4 on the glued 4-cycle {0,1,3,4}: the full
    circuit is exactly on the one-third polytope face."""
    tree = fixture_tree("two_triangles")
    return ProductDist({e: Fraction(1, 4) for e in sorted(tree.ground)})


def k4_3sum_dist() -> ProductDist:
    """Product marginals 1/6 on the glued K_{2,3} ground {2,4,5,6,7,8}
    (rank 4, so the full set needs x(E) = 1 <= 4/3)."""
    tree = fixture_tree("k4_3sum")
    return ProductDist({e: Fraction(1, 6) for e in sorted(tree.ground)})


def r10_triangle_dist() -> ProductDist:
    """Product marginals 1/6 on the 11-element R10 + triangle ground
    (composed rank 6: x(E) = 11/6 <= (1/3) * 6 = 2)."""
    tree = fixture_tree("r10_triangle")
    return ProductDist({e: Fraction(1, 6) for e in sorted(tree.ground)})


def offline_crs_dist():
    """Pairwise-independent symmetric distribution on 20 elements with
    sizes {0, 5, 12} and marginal 1/4 (mass 5): large enough that a rank-10
    counter can actually overflow, so the offline-CRS certificates are
    non-vacuous.  z solves the two moment equations exactly."""
    from .distributions import SymmetricSizeDist
    return SymmetricSizeDist(20, {0: Fraction(7, 112),
                                  5: Fraction(100, 112),
                                  12: Fraction(5, 112)})


# ---------------------------------------------------------------------------
# value instances (single-sample / prophet fixtures)
# ---------------------------------------------------------------------------

def value_fixtures():
    """Three pairwise-independent value instances for the single-sample
    rule: the hard multiple-threshold coupling, weighted pairs/singletons,
    and a fully independent geometric-weight instance."""
    out = []

    inst = threshold_hard_instance(8, Fraction(618, 1000), Fraction(691, 1000))
    inst.params["name"] = "hard-pairs"
    out.append(inst)

    D = pair_singleton_dist(6)
    weights = {i: Fraction(i + 1) for i in range(6)}
    out.append(ValueInstance(weights, D, {"name": "weighted-pairs"}))

    P = ProductDist({i: Fraction(1, 8) for i in range(8)})
    weights = {i: Fraction(2 ** i) for i in range(8)}
    out.append(ValueInstance(weights, P.to_explicit(),
                             {"name": "geometric-product"}))
    return out


# ---------------------------------------------------------------------------
# the scheme fixture corpus
# ---------------------------------------------------------------------------

@dataclass
class SchemeFixture:
    name: str
    scheme: object            # PreparedScheme
    dist: object              # distribution with explicit support


def scheme_fixture_corpus():
    """Every scheme family paired with a small explicit distribution whose
    marginals satisfy the scheme's polytope precondition.  This is the
    corpus behind the master invariant table (exact selectability >=
    declared c) and the certificate-vs-brute-force sweep."""
    from .harness import scale_wrapper
    from .matroids import standard_r10
    from .regular import regular_prepare
    from .structured import (cographic_prepare, graphic_chain_prepare,
                             laminar_prepare, low_density_prepare,
                             transversal_prepare)
    from .uniform import simple_uniform_prepare, two_bucket_prepare

    out = []

    D = twise_symmetric(6, 2)
    out.append(SchemeFixture("uniform-simple-k2",
                             simple_uniform_prepare(D, 2), D))

    Db = ProductDist({i: Fraction(1, 8) for i in range(8)}).to_explicit()
    out.append(SchemeFixture("uniform-two-bucket-k3",
                             two_bucket_prepare(Db, 3), Db))

    lam = LaminarMatroid([(range(6), 5), (range(3), 3), (range(3, 6), 3)])
    Dl = ProductDist({e: Fraction(1, 40) for e in range(6)})
    out.append(SchemeFixture("laminar-small",
                             laminar_prepare(lam, Dl), Dl.to_explicit()))

    tri = fixture_graph("triangle")
    Dt = ProductDist({e: Fraction(1, 5) for e in tri.edges}).to_explicit()
    out.append(SchemeFixture("graphic-triangle",
                             graphic_chain_prepare(tri, Dt, Fraction(3, 10)),
                             Dt))

    k4 = fixture_graph("k4")
    Dk = ProductDist({e: Fraction(9, 40) for e in k4.edges}).to_explicit()
    out.append(SchemeFixture("graphic-k4",
                             graphic_chain_prepare(k4, Dk, Fraction(9, 20)),
                             Dk))

    Dc = ProductDist({e: Fraction(1, 6) for e in k4.edges}).to_explicit()
    out.append(SchemeFixture("cographic-k4",
                             cographic_prepare(k4, Dc, Fraction(1, 2)), Dc))
    out.append(SchemeFixture(
        "cographic-k4-composite",
        scale_wrapper(lambda D: cographic_prepare(k4, D, Fraction(1, 2)),
                      Fraction(1, 2))(Dc), Dc))

    r10 = standard_r10()
    Dr = ProductDist({e: Fraction(2, 5) for e in r10.elements})
    out.append(SchemeFixture("low-density-r10",
                             low_density_prepare(r10, Dr), Dr.to_explicit()))

    fan = fixture_transversal()
    Df = ProductDist({e: Fraction(1, 8) for e in fan.elements}).to_explicit()
    out.append(SchemeFixture("transversal-fan",
                             transversal_prepare(fan, Df, Fraction(1, 2)), Df))
    out.append(SchemeFixture(
        "transversal-fan-composite",
        scale_wrapper(lambda D: transversal_prepare(fan, D, Fraction(1, 2)),
                      Fraction(1, 2))(Df), Df))

    tree = fixture_tree("two_triangles")
    Dg = two_triangles_dist()
    out.append(SchemeFixture("glued-two-triangles",
                             regular_prepare(tree, Dg), Dg.to_explicit()))

    return out


# ---------------------------------------------------------------------------
# instance generators for the sweep-style criteria
# ---------------------------------------------------------------------------

def all_multigraphs(max_vertices=5, max_edges=8):
    """All loopless multigraphs with at most `max_vertices` vertices and
    1..`max_edges` edges, one representative per isomorphism class
    (canonical = lexicographically minimal edge-multiplicity vector over
    vertex permutations).  Yields Multigraph objects."""
    pairs = list(itertools.combinations(range(max_vertices), 2))
    perms = []
    for perm in itertools.permutations(range(max_vertices)):
        perms.append(tuple(pairs.index(tuple(sorted((perm[u], perm[v]))))
                           for (u, v) in pairs))

    def vectors(i, left, cur):
        if i == len(pairs):
            yield tuple(cur)
            return
        for v in range(left + 1):
            cur.append(v)
            yield from vectors(i + 1, left - v, cur)
            cur.pop()

    for vec in vectors(0, max_edges, []):
        if sum(vec) == 0:
            continue
        if any(tuple(vec[i] for i in pm) < vec for pm in perms):
            continue
        edges, eid = {}, 0
        for (u, v), mult in zip(pairs, vec):
            for _ in range(mult):
                edges[eid] = (u, v)
                eid += 1
        yield Multigraph(edges)


def random_multigraph(rng, n_vertices, n_edges, min_degree=None):
    """Uniform random multigraph; with `min_degree`, rejection-sample until
    every non-isolated vertex clears it and no vertex is isolated."""
    pairs = list(itertools.combinations(range(n_vertices), 2))
    while True:
        picks = rng.integers(0, len(pairs), size=n_edges)
        edges = {i: pairs[int(k)] for i, k in enumerate(picks)}
        if min_degree is None:
            return Multigraph(edges)
        deg = {v: 0 for v in range(n_vertices)}
        for (u, v) in edges.values():
            deg[u] += 1
            deg[v] += 1
        if min(deg.values()) >= min_degree:
            return Multigraph(edges)


def random_bipartite(rng, n_left=6, n_right=4):
    """Random bipartite adjacency with every left vertex covered."""
    from .matroids import TransversalMatroid
    adj = {}
    for u in range(n_left):
        deg = int(rng.integers(1, n_right + 1))
        nbrs = rng.choice(n_right, size=deg, replace=False)
        adj[u] = frozenset(int(v) for v in nbrs)
    return TransversalMatroid(adj)


__all__ = [
    "DATA_DIR", "GOOD_TREES", "BAD_TREES", "data_path", "read_data",
    "fixture_graph", "fixture_laminar", "fixture_transversal",
    "fixture_binary", "fixture_tree", "laminar24_dist", "two_triangles_dist",
    "k4_3sum_dist", "r10_triangle_dist", "offline_crs_dist",
    "value_fixtures", "SchemeFixture",
    "scheme_fixture_corpus", "all_multigraphs", "random_multigraph",
    "random_bipartite",
]
