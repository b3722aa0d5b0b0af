"""Regular-matroid schemes assembled from a supplied sum decomposition.

A decomposition file describes how the target matroid is built from
graphic, cographic, and R10 leaves via 1-, 2-, and 3-sums (shared element
sets of size 0, 1, 3; a size-3 sum set must be a circuit on both sides).
Computing such decompositions is out of scope here: the tree is an input,
this module validates it, projects marginals onto the leaves, prepares one
subscheme per leaf, and glues them.

The glued family keeps a set I iff each leaf's share I ∩ E(M̂) lies in that
leaf's family, where M̂ is the leaf matroid with its parent-shared elements
contracted and all sum elements removed.  Because the E(M̂) grounds
partition the composed ground set, the selection event for an element is
local to its own leaf, and the glued guarantee is the worst leaf guarantee.

Cross-checking the composition against a supplied binary representation of
the root works over GF(2) cycle spaces: the cycle space of a sum is the
subspace of the children's combined cycle spaces vanishing on the shared
coordinates, projected onto the symmetric difference.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction

from .families import IntersectionFamily, PreparedScheme
from .harness import scale_wrapper
from .linalg import gf2_basis, gf2_intersect_zero_coords, gf2_nullspace
from .matroids import (BinaryMatroid, CographicMatroid, GraphicMatroid,
                       MatroidError, Multigraph, load_binary, load_graph,
                       standard_r10)
from .polytope import polytope_violation
from .structured import (cographic_prepare, graphic_chain_prepare,
                         low_density_prepare)

LEAF_KINDS = ("graphic", "cographic", "r10")
_SR10_ALIASES = ("sr10", "s-r10", "s(r10)", "r10-parts", "sm")


class DecompositionError(MatroidError):
    pass


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _tokenize(text):
    toks = []
    for ln, line in enumerate(text.splitlines(), start=1):
        for stop in (";", "#"):
            if stop in line:
                line = line[:line.index(stop)]
        line = line.replace("(", " ( ").replace(")", " ) ")
        for tok in line.split():
            toks.append((tok, ln))
    return toks


def _parse_forms(text):
    toks = _tokenize(text)
    pos = 0

    def parse_one():
        nonlocal pos
        tok, ln = toks[pos]
        if tok == ")":
            raise DecompositionError(f"line {ln}: unexpected ')'")
        if tok != "(":
            pos += 1
            return tok, ln
        pos += 1
        items = []
        while True:
            if pos >= len(toks):
                raise DecompositionError(f"line {ln}: unclosed '('")
            if toks[pos][0] == ")":
                pos += 1
                return items, ln
            items.append(parse_one())

    forms = []
    while pos < len(toks):
        forms.append(parse_one())
    return forms


def _keywords(items):
    """Split a form body into positional items and :keyword values."""
    positional, kw = [], {}
    i = 0
    while i < len(items):
        node, ln = items[i]
        if isinstance(node, str) and node.startswith(":"):
            if i + 1 >= len(items):
                raise DecompositionError(f"line {ln}: keyword {node} missing a value")
            kw[node[1:]] = items[i + 1]
            i += 2
        else:
            positional.append(items[i])
            i += 1
    return positional, kw


def _id_list(node, what):
    items, ln = node
    if isinstance(items, str):
        raise DecompositionError(f"line {ln}: {what} must be a parenthesized id list")
    out = []
    for sub, sln in items:
        if not isinstance(sub, str) or not sub.lstrip("-").isdigit():
            raise DecompositionError(f"line {sln}: {what} contains non-integer {sub!r}")
        out.append(int(sub))
    return out


@dataclass
class LeafNode:
    kind: str
    matroid: object
    graph: object            # Multigraph for graphic/cographic leaves
    A: frozenset             # declared parent-shared elements
    label: str
    line: int

    @property
    def ground(self):
        return frozenset(self.matroid.elements)


@dataclass
class SumNode:
    sum_type: int
    z: frozenset
    children: list
    line: int

    @property
    def ground(self):
        g1, g2 = (child_ground(c) for c in self.children)
        return (g1 | g2) - self.z


def child_ground(node):
    return node.ground


@dataclass
class DecompositionTree:
    root: object
    root_rep: object          # BinaryMatroid or None
    leaves: list = field(default_factory=list)

    @property
    def ground(self):
        return self.root.ground


def _build_node(form, base_dir):
    items, ln = form
    if isinstance(items, str):
        raise DecompositionError(f"line {ln}: expected a parenthesized block")
    if not items:
        raise DecompositionError(f"line {ln}: empty block")
    head, hln = items[0]
    if not isinstance(head, str):
        raise DecompositionError(f"line {hln}: block head must be an atom")

    if head == "leaf":
        positional, kw = _keywords(items[1:])
        if len(positional) != 1 or not isinstance(positional[0][0], str):
            raise DecompositionError(f"line {ln}: leaf needs one kind atom")
        kind = positional[0][0]
        if kind.lower() in _SR10_ALIASES:
            raise DecompositionError(
                f"line {ln}: parallel-class expansions of the ten-element "
                "exceptional matroid (ten parts, delete one) are not "
                "supported; use plain r10 leaves")
        if kind not in LEAF_KINDS:
            raise DecompositionError(f"line {ln}: unknown leaf kind {kind!r}")
        A = frozenset(_id_list(kw["A"], ":A")) if "A" in kw else frozenset()
        relabel = _id_list(kw["elements"], ":elements") if "elements" in kw else None
        graph = None
        if kind == "r10":
            M = standard_r10()
            label = "r10"
            if "file" in kw:
                label = kw["file"][0]
                with open(os.path.join(base_dir, label)) as fh:
                    M = load_binary(fh.read())
            if relabel is not None:
                if len(relabel) != len(M.elements):
                    raise DecompositionError(
                        f"line {ln}: :elements must relabel all {len(M.elements)} columns")
                M = BinaryMatroid({new: M.columns[old]
                                   for old, new in zip(M.elements, relabel)},
                                  M.nrows)
        else:
            if "file" not in kw:
                raise DecompositionError(f"line {ln}: {kind} leaf needs :file")
            label = kw["file"][0]
            with open(os.path.join(base_dir, label)) as fh:
                graph = load_graph(fh.read())
            if relabel is not None:
                old = sorted(graph.edges)
                if len(relabel) != len(old):
                    raise DecompositionError(
                        f"line {ln}: :elements must relabel all {len(old)} edges")
                graph = Multigraph({new: graph.edges[o]
                                    for o, new in zip(old, relabel)})
            M = GraphicMatroid(graph) if kind == "graphic" else CographicMatroid(graph)
        return LeafNode(kind, M, graph, A, label, ln)

    if head == "sum" or head in ("1", "2", "3"):
        positional, kw = _keywords(items[1:])
        if head == "sum":
            if not positional or positional[0][0] not in ("1", "2", "3"):
                raise DecompositionError(f"line {ln}: sum type must be 1, 2, or 3")
            ttok = positional[0][0]
            positional = positional[1:]
        else:
            ttok = head
        if len(positional) != 2:
            raise DecompositionError(f"line {ln}: a sum needs exactly two children")
        z = frozenset(_id_list(kw["z"], ":z")) if "z" in kw else frozenset()
        children = [_build_node(positional[0], base_dir),
                    _build_node(positional[1], base_dir)]
        return SumNode(int(ttok), z, children, ln)

    raise DecompositionError(f"line {ln}: unknown block {head!r}")


def load_decomposition(text, base_dir="."):
    """Parse a decomposition file into a tree.  Structural invariants are
    NOT checked here; run validate_good for that."""
    forms = _parse_forms(text)
    root = None
    root_rep = None
    for form in forms:
        items, ln = form
        if isinstance(items, str):
            raise DecompositionError(f"line {ln}: stray atom {items!r}")
        head = items[0][0] if items else None
        if head == "root-binary":
            _, kw = _keywords(items[1:])
            if "file" not in kw:
                raise DecompositionError(f"line {ln}: root-binary needs :file")
            with open(os.path.join(base_dir, kw["file"][0])) as fh:
                root_rep = load_binary(fh.read())
            continue
        if root is not None:
            raise DecompositionError(f"line {ln}: more than one tree in the file")
        root = _build_node(form, base_dir)
    if root is None:
        raise DecompositionError("no tree block found")
    tree = DecompositionTree(root, root_rep)
    _collect_leaves(root, tree.leaves)
    return tree


def _collect_leaves(node, out):
    if isinstance(node, LeafNode):
        out.append(node)
    else:
        for c in node.children:
            _collect_leaves(c, out)


def _collect_sums(node, out):
    if isinstance(node, SumNode):
        out.append(node)
        for c in node.children:
            _collect_sums(c, out)


# ---------------------------------------------------------------------------
# GF(2) cycle spaces
# ---------------------------------------------------------------------------

@dataclass
class CycleSpace:
    elements: tuple
    basis: list

    def dim(self):
        return len(self.basis)


def _incidence_rows(graph: Multigraph, edges):
    pos = {e: i for i, e in enumerate(edges)}
    rows = []
    for v in sorted(graph.vertices):
        m = 0
        for e in graph.incident_edges(v):
            m |= 1 << pos[e]
        rows.append(m)
    return rows


def leaf_cycle_space(leaf: LeafNode) -> CycleSpace:
    if leaf.kind == "graphic":
        edges = tuple(sorted(leaf.graph.edges))
        rows = _incidence_rows(leaf.graph, edges)
        return CycleSpace(edges, gf2_basis(gf2_nullspace(rows, len(edges))))
    if leaf.kind == "cographic":
        # cycle space of the bond matroid = cut space = incidence row space
        edges = tuple(sorted(leaf.graph.edges))
        rows = _incidence_rows(leaf.graph, edges)
        return CycleSpace(edges, gf2_basis(rows))
    return binary_cycle_space(leaf.matroid)


def binary_cycle_space(M: BinaryMatroid) -> CycleSpace:
    elems = tuple(M.elements)
    rows = []
    for i in range(M.nrows):
        m = 0
        for pos, e in enumerate(elems):
            if M.columns[e] >> i & 1:
                m |= 1 << pos
        rows.append(m)
    return CycleSpace(elems, gf2_basis(gf2_nullspace(rows, len(elems))))


def _embed(space: CycleSpace, pos):
    out = []
    for v in space.basis:
        w = 0
        for i, e in enumerate(space.elements):
            if v >> i & 1:
                w |= 1 << pos[e]
        out.append(w)
    return out


def compose_cycle_space(node) -> CycleSpace:
    """Cycle space of the composed matroid at `node` over its ground set."""
    if isinstance(node, LeafNode):
        return leaf_cycle_space(node)
    sp1 = compose_cycle_space(node.children[0])
    sp2 = compose_cycle_space(node.children[1])
    union = tuple(sorted(set(sp1.elements) | set(sp2.elements)))
    pos = {e: i for i, e in enumerate(union)}
    vecs = _embed(sp1, pos) + _embed(sp2, pos)
    inter = gf2_intersect_zero_coords(vecs, [pos[e] for e in node.z], len(union))
    keep = tuple(e for e in union if e not in node.z)
    kpos = {e: i for i, e in enumerate(keep)}
    proj = []
    for v in inter:
        w = 0
        for e in keep:
            if v >> pos[e] & 1:
                w |= 1 << kpos[e]
        proj.append(w)
    return CycleSpace(keep, gf2_basis(proj))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)
    parents: dict = None      # leaf index -> parent leaf index (or None)

    @property
    def ok(self):
        return not self.issues

    def require(self):
        if self.issues:
            raise DecompositionError("invalid decomposition:\n  " +
                                     "\n  ".join(self.issues))


def _owning_leaf(node, z, issues, where):
    """The unique leaf below `node` whose ground contains z (goodness)."""
    owners = []
    stack = [node]
    while stack:
        cur = stack.pop()
        if isinstance(cur, LeafNode):
            if z <= cur.ground:
                owners.append(cur)
        else:
            stack.extend(cur.children)
    if len(owners) != 1:
        issues.append(f"{where}: sum set {sorted(z)} lies in "
                      f"{len(owners)} basic matroids (need exactly 1)")
        return None
    return owners[0]


def validate_good(tree: DecompositionTree) -> ValidationReport:
    """Check all structural requirements of a usable decomposition:
    sum-set sizes, circuit/loop/coloop conditions via the leaf rank oracles,
    goodness (each sum set inside one basic matroid per side), forest-shaped
    conflict structure, declared parent-shared sets consistent with the
    rooting, no 2-circuits between a parent-shared element and a surviving
    element, and agreement with the root representation when supplied."""
    issues = []
    leaves = tree.leaves
    index = {id(L): i for i, L in enumerate(leaves)}
    sums = []
    _collect_sums(tree.root, sums)
    ground = tree.ground

    # -- per-sum-node checks --------------------------------------------
    conflict_edges = []
    for s in sums:
        want = {1: 0, 2: 1, 3: 3}[s.sum_type]
        where = f"sum(line {s.line})"
        if len(s.z) != want:
            issues.append(f"{where}: {s.sum_type}-sum needs |Z| = {want}, got {len(s.z)}")
            continue
        g1, g2 = s.children[0].ground, s.children[1].ground
        if g1 & g2 != s.z:
            issues.append(f"{where}: child grounds intersect in "
                          f"{sorted(g1 & g2)}, expected Z = {sorted(s.z)}")
            continue
        if not s.z:
            continue
        owner1 = _owning_leaf(s.children[0], s.z, issues, where)
        owner2 = _owning_leaf(s.children[1], s.z, issues, where)
        if owner1 is None or owner2 is None:
            continue
        conflict_edges.append((index[id(owner1)], index[id(owner2)], s))
        for owner in (owner1, owner2):
            M = owner.matroid
            if s.sum_type == 2:
                (zz,) = s.z
                if M.rank([zz]) == 0:
                    issues.append(f"{where}: {zz} is a loop of leaf {owner.label}")
                if M.rank(set(M.elements) - {zz}) < M.rank(M.elements):
                    issues.append(f"{where}: {zz} is a coloop of leaf {owner.label}")
            else:
                if not M.is_circuit(s.z):
                    issues.append(f"{where}: Z = {sorted(s.z)} is not a "
                                  f"circuit of leaf {owner.label}")
                full = M.rank(M.elements)
                for r in (1, 2, 3):
                    for C in itertools.combinations(sorted(s.z), r):
                        rest = set(M.elements) - set(C)
                        if M.rank(rest) == full - 1 and all(
                                M.rank(set(M.elements) - set(Cp)) == full
                                for q in range(1, len(C))
                                for Cp in itertools.combinations(C, q)):
                            issues.append(f"{where}: {sorted(C)} is a cocircuit "
                                          f"of leaf {owner.label} inside Z")

    # -- ground-id discipline ---------------------------------------------
    for i, Li in enumerate(leaves):
        for j in range(i + 1, len(leaves)):
            Lj = leaves[j]
            shared = Li.ground & Lj.ground
            if not shared:
                continue
            zs = [s.z for (a, b, s) in conflict_edges
                  if {a, b} == {i, j}]
            if not any(shared == z for z in zs):
                issues.append(f"leaves {Li.label} and {Lj.label} share ids "
                              f"{sorted(shared)} without a joining sum")

    # -- conflict structure: forest ---------------------------------------
    parent_uf = list(range(len(leaves)))

    def find(a):
        while parent_uf[a] != a:
            parent_uf[a] = parent_uf[parent_uf[a]]
            a = parent_uf[a]
        return a

    adjacency = {i: [] for i in range(len(leaves))}
    for (a, b, s) in conflict_edges:
        adjacency[a].append((b, s))
        adjacency[b].append((a, s))
        ra, rb = find(a), find(b)
        if ra == rb:
            issues.append(f"conflict structure has a cycle through leaves "
                          f"{leaves[a].label} and {leaves[b].label}")
        else:
            parent_uf[ra] = rb

    # -- rooting + declared A sets ----------------------------------------
    parents = {}
    components = {}
    for i in range(len(leaves)):
        components.setdefault(find(i), []).append(i)
    for comp in components.values():
        roots = [i for i in comp if not leaves[i].A]
        if len(roots) != 1:
            issues.append(f"component {{{', '.join(leaves[i].label for i in comp)}}} "
                          f"has {len(roots)} leaves with empty :A (need exactly 1 root)")
            continue
        root = roots[0]
        parents[root] = None
        seen = {root}
        queue = [root]
        while queue:
            cur = queue.pop()
            for (nb, s) in adjacency[cur]:
                if nb in seen:
                    continue
                seen.add(nb)
                parents[nb] = cur
                expected = leaves[nb].ground & leaves[cur].ground
                if leaves[nb].A != expected:
                    issues.append(
                        f"leaf {leaves[nb].label}: declared :A "
                        f"{sorted(leaves[nb].A)} != ground ∩ parent "
                        f"{sorted(expected)}")
                queue.append(nb)

    # -- condition (a): no 2-circuits between A and survivors -------------
    for L in leaves:
        surv = L.ground & ground
        for a in sorted(L.A):
            for e in sorted(surv):
                if L.matroid.rank([a, e]) == 1:
                    issues.append(f"leaf {L.label}: elements {a} (parent-shared) "
                                  f"and {e} (surviving) are parallel")

    # -- root representation ----------------------------------------------
    if tree.root_rep is not None:
        rep = tree.root_rep
        if frozenset(rep.elements) != ground:
            issues.append(f"root representation covers {sorted(rep.elements)}, "
                          f"composition ground is {sorted(ground)}")
        else:
            want = binary_cycle_space(rep)
            got = compose_cycle_space(tree.root)
            if want.elements != got.elements or \
                    sorted(want.basis) != sorted(got.basis):
                issues.append("composed cycle space differs from the root "
                              "representation's null space")

    return ValidationReport(issues, parents)


# ---------------------------------------------------------------------------
# leaf minors + marginal projection
# ---------------------------------------------------------------------------

def leaf_minor(tree: DecompositionTree, leaf: LeafNode):
    """Contract the parent-shared elements and keep the surviving ones.

    Graphic leaves restrict first (edge deletion is always representable)
    and contract second; on a validated tree no surviving edge is spanned by
    the contracted set, so the concrete graph minor goes through.  Leaves
    whose concrete form hits a representation limit (e.g. a bond-matroid
    restriction contracting a vertex star) fall back to the rank-oracle
    minor."""
    M = leaf.matroid
    surv = sorted(leaf.ground & tree.ground)
    contract = sorted(leaf.A)
    try:
        if isinstance(M, GraphicMatroid):
            return M.contract_restrict(keep=surv + contract) \
                    .contract_restrict(contract=contract, keep=surv)
        if isinstance(M, (CographicMatroid, BinaryMatroid)):
            return M.contract_restrict(contract=contract, keep=surv)
    except MatroidError:
        pass
    return M.minor(contract=contract,
                   delete=[e for e in M.elements
                           if e not in set(surv) | set(contract)])


def project_leaf_vectors(tree: DecompositionTree, x):
    """Restrict x to each leaf minor's ground set, asserting membership in
    the leaf polytope exactly.  Raises with the violating subset."""
    out = {}
    for i, leaf in enumerate(tree.leaves):
        Mhat = leaf_minor(tree, leaf)
        if not Mhat.elements:
            continue
        xh = {e: Fraction(x[e]) for e in Mhat.elements}
        wit = polytope_violation(Mhat, xh, 1)
        if wit is not None:
            raise MatroidError(
                f"projected marginals leave the polytope of leaf "
                f"{leaf.label}: witness {sorted(wit)}")
        out[i] = (Mhat, xh)
    return out


# ---------------------------------------------------------------------------
# gluing
# ---------------------------------------------------------------------------

class GluedScheme(PreparedScheme):
    """Per-leaf prepared schemes combined over disjoint grounds."""

    REALIZE_LIMIT = 200_000

    def __init__(self, leaf_schemes, elements, b, c, name="regular-glued"):
        super().__init__(b, c, name)
        self.leaf_schemes = list(leaf_schemes)
        self.elements = tuple(elements)

    def realize(self, rng):
        return IntersectionFamily([s.realize(rng) for s in self.leaf_schemes],
                                  self.elements)

    def realizations(self):
        per = []
        count = 1
        for s in self.leaf_schemes:
            r = s.realizations()
            if r is None:
                return None
            count *= len(r)
            if count > self.REALIZE_LIMIT:
                return None
            per.append(r)
        out = []
        for combo in itertools.product(*per):
            fams = [fam for fam, _ in combo]
            p = Fraction(1)
            for _, pf in combo:
                p *= pf
            if p > 0:
                out.append((IntersectionFamily(fams, self.elements), p))
        return out


def _leaf_prepare(kind, Mhat, Dhat):
    if kind == "graphic":
        prep = scale_wrapper(
            lambda Dt: graphic_chain_prepare(Mhat, Dt, Fraction(1, 4)),
            Fraction(1, 4))
        return prep(Dhat)
    if kind == "cographic":
        prep = scale_wrapper(
            lambda Dt: cographic_prepare(Mhat, Dt, Fraction(1, 2)),
            Fraction(1, 2))
        return prep(Dhat)
    return low_density_prepare(Mhat)


def regular_prepare(tree: DecompositionTree, D, rng=None):
    """Validate, project, prepare one subscheme per leaf, and glue.

    Requires marginals in one third of the composed polytope (checked
    against the root representation when present).  Leaf dispatch: graphic
    minors get the chain scheme at rate 1/4 behind a keep-1/4 subsampler
    (guarantee 1/8); cographic minors the parallel-class scheme at rate 1/2
    behind keep-1/2 (guarantee 1/12); R10 minors the plain low-density
    sampler (guarantee 1/density >= 1/2 for full R10)."""
    validate_good(tree).require()
    x = D.marginals()
    ground = tree.ground
    if set(D.elements) != set(ground):
        raise MatroidError("distribution ground set differs from the "
                           "composition ground set")
    if tree.root_rep is not None:
        wit = polytope_violation(tree.root_rep, x, Fraction(1, 3))
        if wit is not None:
            raise MatroidError(f"marginals outside one third of the composed "
                               f"polytope: witness {sorted(wit)}")
    projected = project_leaf_vectors(tree, x)

    leaf_schemes = []
    info = []
    for i, (Mhat, xh) in sorted(projected.items()):
        leaf = tree.leaves[i]
        Dhat = D.project(Mhat.elements) if hasattr(D, "project") else \
            D.to_explicit().project(Mhat.elements)
        sub = _leaf_prepare(leaf.kind, Mhat, Dhat)
        leaf_schemes.append(sub)
        info.append((leaf.label, leaf.kind, tuple(Mhat.elements), sub.c))

    c = min((s.c for s in leaf_schemes),
            default=Fraction(1), key=float)
    scheme = GluedScheme(leaf_schemes, sorted(ground), b=Fraction(1, 3), c=c)
    scheme.leaf_info = info
    scheme.tree = tree
    return scheme


def gluing_check(scheme: GluedScheme, root_matroid, D, trials=10000, rng=None):
    """MC soundness check: every greedily selected set is independent in the
    root representation.  Returns (trials, failures)."""
    import numpy as np
    if rng is None:
        rng = np.random.default_rng(0)
    order = sorted(scheme.elements)
    bad = 0
    for _ in range(trials):
        fam = scheme.realize(rng)
        R = D.sample(rng)
        got = fam.run(order, R)
        if not root_matroid.is_independent(got):
            bad += 1
    return trials, bad


__all__ = [
    "DecompositionError", "LeafNode", "SumNode", "DecompositionTree",
    "load_decomposition", "CycleSpace", "leaf_cycle_space",
    "binary_cycle_space", "compose_cycle_space", "ValidationReport",
    "validate_good", "leaf_minor", "project_leaf_vectors", "GluedScheme",
    "regular_prepare", "gluing_check",
]
