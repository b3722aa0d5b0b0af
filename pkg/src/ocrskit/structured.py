"""Schemes for graphic, laminar, low-density, cographic, and transversal
matroids under pairwise independence.

* graphic: peel the edge set into slices.  A slice collects the edges whose
  conditional span probability (inside the contraction of everything deeper)
  exceeds 2b; greedy then only has to respect independence slice by slice,
  and each edge fails with probability at most 2b.

* laminar: round capacities down to powers of two (costing a factor two in
  the polytope), then intersect one small uniform scheme per surviving
  constraint.  An element lies in at most one constraint per power of two,
  so a union bound over its chain gives a universal constant.

* low density: sample an independent set I0 with elementwise marginals
  1/density and accept exactly the arrivals inside I0 — selectability is
  1/density for every consistent distribution.

* cographic: contract away all but one representative of each parallel
  class of the bond matroid; the remainder has density at most 3, so the
  low-density sampler plus a one-per-class rule gives (1-b)/3.

* transversal: route the mass x through the bipartite graph with capacity b
  on every right vertex (max-flow, exact rationals); normalizing the flow
  gives each left element a label distribution, and keeping one element per
  sampled label is (b, 1-b)-selectable.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .distributions import ExplicitSubsetDist, ProductDist
from .families import (CapFamily, ClassFamily, ChainFamily, FixedScheme,
                       GreedyFamily, LabelFamily, LaminarCapFamily,
                       MixtureScheme, PreparedScheme, SubsetFamily)
from .matroids import (CographicMatroid, GraphicMatroid, LaminarMatroid,
                       Matroid, MatroidError, Multigraph, TransversalMatroid)
from .polytope import decompose_point, density

EXPLICIT_SPAN_LIMIT = 4096


# ---------------------------------------------------------------------------
# graphic chain scheme
# ---------------------------------------------------------------------------

def _span_prob(D, e, pool, minor, rng, trials):
    """Pr[e in span_minor(R ∩ pool \\ {e}) | e in R]; exact on explicit /
    small supports, MC elsewhere.  Returns (value, ci99_halfwidth)."""
    pool = frozenset(pool) - {e}
    if D.marginal(e) == 0:
        return Fraction(0), 0.0   # never arrives; any slice placement works
    ex = None
    if isinstance(D, ExplicitSubsetDist):
        ex = D
    else:
        try:
            ex = D.to_explicit(EXPLICIT_SPAN_LIMIT)
        except Exception:
            ex = None
    if ex is not None:
        x_e = D.marginal(e)
        num = Fraction(0)
        for S in ex.support():
            if e in S and minor.in_span(S & pool, e):
                num += ex.prob(S)
        return num / x_e, 0.0

    if isinstance(D, ProductDist):
        # others are independent of e's activity: sample the pool directly
        probs = [float(D.marginal(f)) for f in sorted(pool)]
        ids = sorted(pool)
        hits = 0
        for _ in range(trials):
            row = rng.random(len(ids)) < np.array(probs)
            S = {f for f, on in zip(ids, row) if on}
            if minor.in_span(S, e):
                hits += 1
        m = hits / trials
        return m, 2.5758 * math.sqrt(max(m * (1 - m), 1e-12) / trials)

    hits, seen = 0, 0
    for _ in range(trials):
        R = set(D.sample(rng))
        if e not in R:
            continue
        seen += 1
        if minor.in_span(R & pool, e):
            hits += 1
    if seen == 0:
        return 0.0, float("inf")
    m = hits / seen
    return m, 2.5758 * math.sqrt(max(m * (1 - m), 1e-12) / seen)


def _minor_of(M, contract, keep):
    """Contract/restrict with the concrete representation when available,
    falling back to the generic rank-oracle minor."""
    contract, keep = set(contract), set(keep)
    if hasattr(M, "contract_restrict"):
        try:
            return M.contract_restrict(contract=sorted(contract), keep=sorted(keep))
        except MatroidError:
            pass
    return M.minor(contract=sorted(contract),
                   delete=[e for e in M.elements
                           if e not in keep and e not in contract])


def graphic_chain_prepare(G, D, b, rng=None, trials=4000):
    """Chain scheme for the graphic matroid of G at rate b < 1/2.

    Level i keeps the minor (M / E_{i+1}) restricted to its slice; an edge
    stays out of deeper levels once its conditional span probability drops
    to 2b or below.  If a peeling round stalls (every remaining edge spans
    with probability > 2b), x lies outside b times the polytope and the
    preparation aborts.
    """
    b = Fraction(b)
    if not 0 < b < Fraction(1, 2):
        raise ValueError("the chain scheme needs 0 < b < 1/2")
    M = GraphicMatroid(G) if isinstance(G, Multigraph) else G
    if rng is None:
        rng = np.random.default_rng(0)

    levels = []
    warnings = []
    E_i = set(M.elements)
    while E_i:
        S = set()
        changed = True
        while changed:
            changed = False
            # elements already spanned by S are loops of M/S: span
            # probability 1, so they always move down
            spanned = {e for e in E_i - S if M.in_span(S, e)}
            if spanned and spanned != E_i - S:
                S |= spanned
                changed = True
                continue
            if spanned:
                S |= spanned
                break
            minor = _minor_of(M, S, E_i - S)
            for e in sorted(E_i - S):
                val, ci = _span_prob(D, e, E_i - S, minor, rng, trials)
                if isinstance(val, Fraction):
                    high = val > 2 * b
                else:
                    high = val > float(2 * b) - 3 * ci
                    if ci and float(2 * b) - 3 * ci < val <= float(2 * b):
                        warnings.append(f"edge {e}: MC near the 2b line, demoted")
                if high:
                    S.add(e)
                    changed = True
                    break
        if S == E_i:
            raise MatroidError(
                "chain peeling stalled: the marginals lie outside b * P")
        slice_i = frozenset(E_i - S)
        minor_i = _minor_of(M, S, slice_i)
        levels.append((slice_i, minor_i))
        E_i = S

    fam = ChainFamily(levels)
    scheme = FixedScheme(fam, b=b, c=1 - 2 * b, name="graphic-chain")
    scheme.slices = [lvl[0] for lvl in levels]
    scheme.warnings = warnings
    return scheme


# ---------------------------------------------------------------------------
# laminar rounding + composition
# ---------------------------------------------------------------------------

@dataclass
class RoundedLaminar:
    original: LaminarMatroid
    rounded: LaminarMatroid
    dropped: list
    added_root: bool

    @property
    def constraints(self):
        return self.rounded.constraints


def round_laminar(M: LaminarMatroid):
    """Round every capacity down to the largest power of two (losing less
    than a factor two), add the full-ground constraint if missing, and drop
    constraints implied by a larger set with an equal-or-smaller rounded
    capacity.  Along any nested chain the surviving capacities are strictly
    increasing powers of two."""
    ground = frozenset(M.elements)
    constraints = [(frozenset(s), int(c)) for s, c in M.constraints]
    added_root = not any(s == ground for s, _ in constraints)
    if added_root:
        constraints.append((ground, M.rank(ground)))

    rounded = {}
    for s, c in constraints:
        if c < 1:
            raise MatroidError("capacity < 1 cannot be rounded")
        cp = 1 << (c.bit_length() - 1)     # largest power of two <= c
        rounded[s] = min(rounded.get(s, cp), cp)

    kept, dropped = [], []
    for s, cp in rounded.items():
        implied = any(s < t and cq <= cp for t, cq in rounded.items())
        if implied:
            dropped.append((s, cp))
        else:
            kept.append((s, cp))
    kept.sort(key=lambda sc: (len(sc[0]), sorted(sc[0])))
    M2 = LaminarMatroid(kept, elements=M.elements)
    return RoundedLaminar(M, M2, dropped, added_root)


class _ConjunctionFamily(GreedyFamily):
    """Intersection of per-constraint families over overlapping grounds.
    Membership is exact; `selectable` is the conjunction of the local
    certificates, which is a sound lower bound for the true selection event
    but not equal to it when constraints nest (the exact certificate is
    only implemented for the all-cap case, see LaminarCapFamily)."""

    cert_exact = False

    def __init__(self, parts, elements):
        self.parts = list(parts)
        self.elements = tuple(elements)

    def member(self, I):
        I = set(I)
        if not I <= set(self.elements):
            return False
        return all(fam.member(I & set(fam.elements)) for fam in self.parts)

    def selectable(self, e, R):
        R = set(R)
        if e not in R or e not in set(self.elements):
            return False
        for fam in self.parts:
            if e in set(fam.elements):
                if not fam.selectable(e, R & set(fam.elements)):
                    return False
        return True


def laminar_guarantee_constant(t_threshold=13, b=Fraction(24, 25)):
    """1 - t(1-b) - sum_{i>=t} (4/27 b^3 2^i)^(-1/2) in closed form."""
    t = int(t_threshold)
    b = float(b)
    tail = math.sqrt(27.0 / (4.0 * b ** 3)) * 2 ** (-t / 2) / (1 - 2 ** -0.5)
    return 1.0 - t * (1.0 - b) - tail


def laminar_prepare(M, D, t_threshold=13, b=Fraction(24, 25)):
    """Intersection scheme on the rounded matroid.

    Assumes marginals with per-constraint slack x(A) <= (1-b) c'(A) on the
    rounded capacities (checked).  Constraints with capacity below
    2**t_threshold get a single counter (failure at most x(A)/c'(A) by
    Markov); larger ones get the two-bucket scheme at slack b (failure
    (4/27 b^3 c')^(-1/2)).  The instance guarantee is one minus the sum of
    the per-constraint failures; `universal_c` carries the distribution-free
    constant for the default parameters.
    """
    from .uniform import two_bucket_prepare

    b = Fraction(b)
    if not 0 < b < 1:
        raise ValueError("b must lie in (0,1)")
    if not isinstance(M, LaminarMatroid):
        M = LaminarMatroid(M)
    rl = round_laminar(M)
    x = D.marginals()

    failures = []
    parts = []
    all_caps = True
    for A, cp in rl.constraints:
        mass = sum((x[e] for e in A), Fraction(0))
        if mass > (1 - b) * cp:
            raise MatroidError(
                f"x(A) = {mass} exceeds (1-b) c'(A) = {(1 - b) * cp} "
                f"on constraint {sorted(A)[:6]}...")
        if cp < (1 << t_threshold):
            parts.append(CapFamily(cp, A))
            failures.append(mass / cp)
        else:
            all_caps = False
            sub = two_bucket_prepare(D.project(A) if hasattr(D, "project")
                                     else D, cp, eps=b)
            parts.append(sub.family)
            failures.append(sub.params.bstar)

    if all_caps:
        fam = LaminarCapFamily(rl.constraints, M.elements)
        c_instance = 1 - sum(failures, Fraction(0))
    else:
        fam = _ConjunctionFamily(parts, M.elements)
        c_instance = 1.0 - sum(float(f) for f in failures)
    scheme = FixedScheme(fam, b=1 - b, c=c_instance, name="laminar-composite")
    scheme.rounding = rl
    scheme.failures = failures
    scheme.universal_c = laminar_guarantee_constant(t_threshold, b)
    return scheme


# ---------------------------------------------------------------------------
# low-density sampler
# ---------------------------------------------------------------------------

def low_density_prepare(M: Matroid, D=None, rng=None):
    """Sample I0 from a convex decomposition of the point (1/density)*1 and
    accept exactly the arrivals inside I0.  Selectability is exactly
    1/density for every distribution (no independence needed), because the
    selection event for e is simply [e in I0]."""
    gamma = density(M)
    y = {e: 1 / gamma for e in M.elements}
    decomp = decompose_point(M, y)
    weighted = [(SubsetFamily(I, M.elements), w) for I, w in decomp]
    scheme = MixtureScheme(weighted, b=1, c=1 / gamma, name="low-density")
    scheme.gamma = gamma
    return scheme


# ---------------------------------------------------------------------------
# cographic composite
# ---------------------------------------------------------------------------

def cographic_prepare(G, D, b=Fraction(1, 2)):
    """Parallel-class scheme for the bond matroid of G at rate b.

    Parallel classes (2-element cuts) are contracted to representatives;
    the representative minor has no parallel pairs, hence density at most 3,
    and the low-density sampler opens classes with probability 1/density.
    An element is selected iff its class is open and no other class member
    is active: selectability at least (1-b)/density >= (1-b)/3.
    """
    b = Fraction(b)
    if not 0 < b < 1:
        raise ValueError("b must lie in (0,1)")
    M = CographicMatroid(G) if isinstance(G, Multigraph) else G
    classes = M.parallel_classes()
    reps = {min(cls): frozenset(cls) for cls in classes}
    class_of = {}
    for rep, cls in reps.items():
        for e in cls:
            class_of[e] = rep
    # restriction to the representatives; the concrete graph form can hit
    # the loop-free representation limit, in which case the rank-oracle
    # minor takes over
    M_rep = _minor_of(M, (), sorted(reps))
    gamma = density(M_rep)
    if gamma > 3:
        raise MatroidError(
            f"representative minor has density {gamma} > 3; "
            "the input was not cographic-with-parallel-classes as assumed")
    decomp = decompose_point(M_rep, {e: 1 / gamma for e in M_rep.elements})
    weighted = []
    for I0, w in decomp:
        fam = ClassFamily(class_of, open_classes=frozenset(I0),
                          elements=M.elements)
        weighted.append((fam, w))
    scheme = MixtureScheme(weighted, b=b, c=(1 - b) / gamma,
                           name="cographic-classes")
    scheme.gamma = gamma
    scheme.classes = classes
    scheme.representatives = sorted(reps)
    return scheme


# ---------------------------------------------------------------------------
# transversal flow + labels
# ---------------------------------------------------------------------------

@dataclass
class TransversalFlowResult:
    feasible: bool
    value: Fraction
    demand: Fraction
    y: dict                       # left element -> {right vertex: Fraction}
    violation: object             # frozenset of left elements, or None


def transversal_flow(M, x, b, allow_shortfall=False):
    """Exact max-flow routing of the marginals through the bipartite graph:
    source -> i with capacity x_i, i -> j (adjacent) unbounded, j -> sink
    with capacity b.  Feasible iff value = sum x; otherwise the left side of
    the min cut certifies x(S) > b |N(S)| >= b rank(S)."""
    if not isinstance(M, TransversalMatroid):
        M = TransversalMatroid(M)
    b = Fraction(b)
    x = {e: Fraction(v) for e, v in x.items()}
    demand = sum((x[e] for e in M.elements), Fraction(0))
    INF = demand + b * len(M.elements) + 1

    S, T = ("s",), ("t",)
    cap = {}

    def add(u, v, c):
        cap[(u, v)] = cap.get((u, v), Fraction(0)) + c
        cap.setdefault((v, u), Fraction(0))

    rights = sorted({j for e in M.elements for j in M.neighbors[e]})
    for e in M.elements:
        add(S, ("L", e), x[e])
        for j in M.neighbors[e]:
            add(("L", e), ("R", j), INF)
    for j in rights:
        add(("R", j), T, b)

    adj = {}
    for (u, v) in cap:
        adj.setdefault(u, []).append(v)

    flow = {k: Fraction(0) for k in cap}
    value = Fraction(0)
    while True:
        prev = {S: None}
        dq = deque([S])
        while dq:
            u = dq.popleft()
            for v in adj.get(u, ()):
                if v not in prev and cap[(u, v)] - flow[(u, v)] > 0:
                    prev[v] = u
                    dq.append(v)
        if T not in prev:
            break
        # trace the augmenting path
        path = []
        v = T
        while v != S:
            u = prev[v]
            path.append((u, v))
            v = u
        aug = min(cap[uv] - flow[uv] for uv in path)
        for (u, v) in path:
            flow[(u, v)] += aug
            flow[(v, u)] -= aug
        value += aug

    if value == demand:
        y = {}
        for e in M.elements:
            if x[e] > 0:
                y[e] = {j: flow[(("L", e), ("R", j))] / x[e]
                        for j in M.neighbors[e]
                        if flow[(("L", e), ("R", j))] > 0}
        return TransversalFlowResult(True, value, demand, y, None)

    reachable = set()
    dq = deque([S])
    reachable.add(S)
    while dq:
        u = dq.popleft()
        for v in adj.get(u, ()):
            if v not in reachable and cap[(u, v)] - flow[(u, v)] > 0:
                reachable.add(v)
                dq.append(v)
    witness = frozenset(e for e in M.elements if ("L", e) in reachable)
    if not allow_shortfall:
        raise MatroidError(
            f"marginals outside b * polytope; witness {sorted(witness)}")
    return TransversalFlowResult(False, value, demand, {}, witness)


class LabelScheme(PreparedScheme):
    """Independent per-element label draws; realizations enumerate the label
    product when it is small enough."""

    REALIZE_LIMIT = 250_000

    def __init__(self, label_dists, elements, b, c, name="transversal-labels"):
        super().__init__(b, c, name)
        self.label_dists = {e: list(opts) for e, opts in label_dists.items()}
        self.elements = tuple(elements)

    def realize(self, rng):
        labels = {}
        for e, opts in self.label_dists.items():
            if len(opts) == 1:
                labels[e] = opts[0][0]
                continue
            u = rng.random()
            acc = 0.0
            pick = opts[-1][0]
            for j, p in opts:
                acc += float(p)
                if u <= acc:
                    pick = j
                    break
            labels[e] = pick
        return LabelFamily(labels)

    def realizations(self):
        count = 1
        for opts in self.label_dists.values():
            count *= len(opts)
            if count > self.REALIZE_LIMIT:
                return None
        items = sorted(self.label_dists)
        out = []
        for combo in itertools.product(*(self.label_dists[e] for e in items)):
            p = Fraction(1)
            labels = {}
            for e, (j, pj) in zip(items, combo):
                labels[e] = j
                p *= pj
            if p > 0:
                out.append((LabelFamily(labels), p))
        return out


def transversal_prepare(M, D, b=Fraction(1, 2), rng=None):
    """Label scheme at rate b: route x through the graph with right capacity
    b, normalize per element to a label distribution, accept at most one
    element per sampled label.  Elements with zero marginal get their lowest
    numbered neighbor deterministically."""
    if not isinstance(M, TransversalMatroid):
        M = TransversalMatroid(M)
    b = Fraction(b)
    if not 0 < b < 1:
        raise ValueError("b must lie in (0,1)")
    x = D.marginals()
    for e in M.elements:
        if x.get(e, Fraction(0)) > b:
            raise MatroidError(f"marginal of {e} exceeds b; witness {{{e}}}")
    res = transversal_flow(M, {e: x.get(e, Fraction(0)) for e in M.elements}, b)
    label_dists = {}
    for e in M.elements:
        if x.get(e, Fraction(0)) == 0:
            label_dists[e] = [(M.neighbors[e][0], Fraction(1))]
        else:
            opts = sorted(res.y[e].items())
            total = sum((p for _, p in opts), Fraction(0))
            assert total == 1, f"flow through {e} is not fully routed"
            label_dists[e] = opts
    scheme = LabelScheme(label_dists, M.elements, b=b, c=1 - b)
    scheme.flow = res
    return scheme


__all__ = [
    "graphic_chain_prepare", "RoundedLaminar", "round_laminar",
    "laminar_guarantee_constant", "laminar_prepare", "low_density_prepare",
    "cographic_prepare", "TransversalFlowResult", "transversal_flow",
    "LabelScheme", "transversal_prepare",
]
