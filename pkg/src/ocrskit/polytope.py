"""Matroid polytope utilities: density max|S|/rank(S), membership of a
marginal vector in the scaled polytope b*P_M, and exact convex decomposition
of a polytope point into independent sets.

Marginal vectors are dicts element -> Fraction (ints accepted).  Everything
is exact; brute-force paths refuse ground sets beyond a configured limit
instead of silently approximating.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .linalg import feasible_nonneg_solution
from .matroids import (CographicMatroid, GraphicMatroid, LaminarMatroid,
                       Matroid, MatroidError, TransversalMatroid, UniformMatroid)

BRUTE_FORCE_LIMIT = 22


def as_fraction_vector(x, elements):
    return {e: Fraction(x[e]) for e in elements}


def vector_sum(x, subset):
    return sum((x[e] for e in subset), Fraction(0))


# ---------------------------------------------------------------------------
# density
# ---------------------------------------------------------------------------

def density(M: Matroid, limit=BRUTE_FORCE_LIMIT):
    """max over nonempty S of |S|/rank(S), exact Fraction.

    Uniform and graphic matroids get closed-form / vertex-subset paths,
    cographic matroids a partition DP; everything else is a brute-force
    subset sweep (refused beyond `limit` elements).
    """
    if not M.elements:
        raise MatroidError("density of an empty ground set")
    if isinstance(M, UniformMatroid):
        n = len(M.elements)
        return Fraction(max(n, M.k), M.k)
    if isinstance(M, GraphicMatroid):
        return _graphic_density(M)
    if isinstance(M, CographicMatroid):
        return _cographic_density(M)
    return _brute_density(M, limit)


def _brute_density(M, limit):
    n = len(M.elements)
    if n > limit:
        raise MatroidError(f"brute-force density refused for |E|={n} > {limit}")
    best = Fraction(0)
    for r in range(1, n + 1):
        for S in itertools.combinations(M.elements, r):
            rk = M.rank(S)
            if rk == 0:
                raise MatroidError("loop encountered")  # construction should prevent
            best = max(best, Fraction(len(S), rk))
    return best


def _graphic_density(M: GraphicMatroid):
    """max over vertex subsets W of |E(W)| / rank(E(W)); any violating edge
    set is dominated componentwise by an induced subgraph."""
    g = M.graph
    verts = sorted(g.vertices)
    if len(verts) > BRUTE_FORCE_LIMIT:
        raise MatroidError("graphic density: too many vertices")
    best = Fraction(0)
    for r in range(2, len(verts) + 1):
        for W in itertools.combinations(verts, r):
            Wset = set(W)
            induced = [e for e, (u, v) in g.edges.items() if u in Wset and v in Wset]
            if not induced:
                continue
            best = max(best, Fraction(len(induced), g.graphic_rank(induced)))
    return best


def _cographic_density(M: CographicMatroid):
    """Bond-matroid density via vertex partitions.

    For connected G, rank*(S) = |S| + 1 - comp(V, E-S); the maximum ratio is
    attained when E-S is a disjoint union of induced connected chunks, i.e.
    S is the cross-edge set of a partition of V into connected parts:
    gamma* = max over partitions (cross)/(cross - parts + 1).  Computed per
    component by a subset DP maximizing intra-part edges for each part count.
    """
    g = M.graph
    best = Fraction(1)
    for comp in g.components():
        vs = sorted(comp)
        n = len(vs)
        if n > 16:
            raise MatroidError("cographic density: component too large for the DP")
        pos = {v: i for i, v in enumerate(vs)}
        edge_masks = []
        for (u, v) in g.edges.values():
            if u in pos:
                edge_masks.append((1 << pos[u]) | (1 << pos[v]))
        m = len(edge_masks)
        full = (1 << n) - 1
        intra = [0] * (full + 1)
        for mask in range(full + 1):
            intra[mask] = sum(1 for em in edge_masks if em & mask == em)
        # adjacency masks for connectivity tests
        adj = [0] * n
        for (u, v) in g.edges.values():
            if u in pos:
                adj[pos[u]] |= 1 << pos[v]
                adj[pos[v]] |= 1 << pos[u]
        connected = [False] * (full + 1)
        for mask in range(1, full + 1):
            seed = mask & -mask
            reach = seed
            frontier = seed
            while frontier:
                nxt = 0
                mm = frontier
                while mm:
                    b = mm & -mm
                    nxt |= adj[b.bit_length() - 1]
                    mm ^= b
                frontier = nxt & mask & ~reach
                reach |= frontier
            connected[mask] = reach == mask
        NEG = -(10 ** 9)
        # h[p][mask]: max total intra-part edges over partitions of mask
        # into p connected parts
        h = [[NEG] * (full + 1) for _ in range(n + 1)]
        h[0][0] = 0
        for p in range(1, n + 1):
            hp, hp1 = h[p], h[p - 1]
            for mask in range(1, full + 1):
                low = mask & -mask
                rest0 = mask ^ low
                # enumerate submasks of mask containing `low`
                sub = mask
                bestv = NEG
                while True:
                    if sub & low and connected[sub]:
                        prev = hp1[mask ^ sub]
                        if prev != NEG:
                            v = prev + intra[sub]
                            if v > bestv:
                                bestv = v
                    if sub == 0:
                        break
                    sub = (sub - 1) & mask
                hp[mask] = bestv
                _ = rest0
        for p in range(2, n + 1):
            if h[p][full] == NEG:
                continue
            cross = m - h[p][full]
            denom = cross - (p - 1)
            if denom <= 0:
                raise MatroidError("bond-matroid rank 0 on a nonempty set (bridge?)")
            best = max(best, Fraction(cross, denom))
    return best


# ---------------------------------------------------------------------------
# scaled polytope membership
# ---------------------------------------------------------------------------

def polytope_violation(M: Matroid, x, b=1, limit=BRUTE_FORCE_LIMIT):
    """Return a subset S with x(S) > b*rank(S), or None if x lies in b*P_M.

    Exact separation for uniform / graphic / laminar / transversal; constant
    vectors on any matroid reduce to the density; otherwise brute force.
    """
    b = Fraction(b)
    x = as_fraction_vector(x, M.elements)
    if any(v < 0 for v in x.values()):
        raise MatroidError("marginal vector has a negative entry")
    if isinstance(M, UniformMatroid):
        for e in M.elements:
            if x[e] > b:
                return frozenset([e])
        if vector_sum(x, M.elements) > b * M.k:
            return frozenset(M.elements)
        return None
    if isinstance(M, GraphicMatroid):
        g = M.graph
        verts = sorted(g.vertices)
        if len(verts) > BRUTE_FORCE_LIMIT:
            raise MatroidError("graphic separation: too many vertices")
        for r in range(2, len(verts) + 1):
            for W in itertools.combinations(verts, r):
                Wset = set(W)
                induced = [e for e, (u, v) in g.edges.items()
                           if u in Wset and v in Wset]
                if induced and vector_sum(x, induced) > b * g.graphic_rank(induced):
                    return frozenset(induced)
        return None
    if isinstance(M, LaminarMatroid):
        # laminar constraint matrices are network matrices, so the box plus
        # the capacity rows describe the independence polytope exactly
        for e in M.elements:
            if x[e] > b:
                return frozenset([e])
        for s, c in M.constraints:
            if vector_sum(x, s) > b * c:
                return frozenset(s)
        return None
    if isinstance(M, TransversalMatroid):
        from .structured import transversal_flow  # local import, no cycle at runtime
        for e in M.elements:
            if x[e] > b:
                return frozenset([e])
        res = transversal_flow(M, x, b, allow_shortfall=True)
        if res.violation is not None:
            return res.violation
        return None
    if len(set(x.values())) == 1:
        c = next(iter(x.values()))
        if c == 0:
            return None
        if c * density(M, limit) > b:
            # find the densest subset as witness
            return _brute_violation(M, x, b, limit)
        return None
    return _brute_violation(M, x, b, limit)


def _brute_violation(M, x, b, limit):
    n = len(M.elements)
    if n > limit:
        raise MatroidError(f"brute-force separation refused for |E|={n} > {limit}")
    for r in range(1, n + 1):
        for S in itertools.combinations(M.elements, r):
            if vector_sum(x, S) > b * M.rank(S):
                return frozenset(S)
    return None


def in_scaled_polytope(M: Matroid, x, b=1, limit=BRUTE_FORCE_LIMIT):
    return polytope_violation(M, x, b, limit) is None


# ---------------------------------------------------------------------------
# convex decomposition into independent sets
# ---------------------------------------------------------------------------

def decompose_point(M: Matroid, y, limit=200000):
    """Write y in P_M as a convex combination of independent-set indicators.

    Returns a list of (frozenset, Fraction weight) with positive weights
    summing to one.  Exact: enumerates the independent sets and solves the
    marginal-matching system with a rational phase-1 simplex.
    """
    y = as_fraction_vector(y, M.elements)
    wit = polytope_violation(M, y, 1)
    if wit is not None:
        raise MatroidError(f"point outside the matroid polytope, witness {sorted(wit)}")
    indep = M.independent_sets(limit=limit)
    elems = list(M.elements)
    rows = []
    rhs = []
    for e in elems:
        rows.append([Fraction(1) if e in I else Fraction(0) for I in indep])
        rhs.append(y[e])
    rows.append([Fraction(1)] * len(indep))
    rhs.append(Fraction(1))
    sol = feasible_nonneg_solution(rows, rhs)
    if sol is None:
        raise MatroidError("decomposition infeasible (should not happen for y in P_M)")
    out = [(indep[i], sol[i]) for i in range(len(indep)) if sol[i] > 0]
    return out


def verify_decomposition(M: Matroid, y, combo):
    """Check a convex combination reproduces y and uses independent sets."""
    y = as_fraction_vector(y, M.elements)
    total = sum((w for _, w in combo), Fraction(0))
    if total != 1:
        return False
    if any(w < 0 for _, w in combo):
        return False
    if any(not M.is_independent(I) for I, _ in combo):
        return False
    for e in M.elements:
        if sum((w for I, w in combo if e in I), Fraction(0)) != y[e]:
            return False
    return True
