"""Matroid rank oracles: uniform, graphic, cographic, laminar, transversal,
binary (including R10), plus generic minors and parallel classes.

Ground set elements are ints.  All oracles are loop-free by construction:
an element that can never be independent is rejected when the oracle is
built, because every scheme downstream assumes loopless matroids.

Plain-text loaders for the supported file formats live at the bottom:

    graph <n_vertices> <n_edges>      followed by one `u v` line per edge
    cap <c> : <id id ...>             one line per laminar constraint
    bipartite <|U|> <|V|>             followed by `u v` adjacency lines
    binary <rows> <cols>              followed by 0/1 rows
"""

from __future__ import annotations

import itertools

from .linalg import gf2_rank


class MatroidError(ValueError):
    pass


# ---------------------------------------------------------------------------
# multigraphs
# ---------------------------------------------------------------------------

class Multigraph:
    """Loopless multigraph with integer vertex names and integer edge ids.

    edges: dict edge_id -> (u, v).  Parallel edges are fine; self-loops are
    not (they are matroid loops on the graphic side and the paper-facing
    schemes assume loopless matroids).
    """

    def __init__(self, edges, vertices=None, had_isolated_vertices=False):
        self.edges = {int(e): (int(u), int(v)) for e, (u, v) in dict(edges).items()}
        for e, (u, v) in self.edges.items():
            if u == v:
                raise MatroidError(f"self-loop on edge {e} (vertex {u})")
        touched = set()
        for u, v in self.edges.values():
            touched.add(u)
            touched.add(v)
        if vertices is None:
            self.vertices = touched
        else:
            vertices = set(int(v) for v in vertices)
            isolated = vertices - touched
            self.vertices = vertices - isolated
            if isolated:
                had_isolated_vertices = True
        self.had_isolated_vertices = had_isolated_vertices

    def degree(self, v):
        return sum(1 for (a, b) in self.edges.values() if v in (a, b))

    def min_degree(self):
        return min((self.degree(v) for v in self.vertices), default=0)

    def incident_edges(self, v):
        return [e for e, (a, b) in self.edges.items() if v in (a, b)]

    def components(self):
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges.values():
            parent[find(u)] = find(v)
        comps = {}
        for v in self.vertices:
            comps.setdefault(find(v), set()).add(v)
        return list(comps.values())

    def graphic_rank(self, edge_subset):
        """Rank of an edge subset in the graphic matroid (size of spanning
        forest), via union-find."""
        parent = {}

        def find(x):
            root = x
            while parent.get(root, root) != root:
                root = parent[root]
            while parent.get(x, x) != x:
                parent[x], x = root, parent[x]
            return root

        r = 0
        for e in edge_subset:
            u, v = self.edges[e]
            ru, rv = find(u), find(v)
            if ru != rv:
                parent.setdefault(ru, ru)
                parent[ru] = rv
                r += 1
        return r

    def contract_edges(self, contract, drop_loops=False):
        """Contract the given edge ids (merge endpoints), drop them, keep
        every other edge id.  A kept edge whose endpoints end up merged
        would become a self-loop, which this representation cannot carry:
        we raise, unless `drop_loops` asks for such edges to be silently
        removed (callers can recover them by diffing the edge ids)."""
        contract = set(contract)
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in contract:
            u, v = self.edges[e]
            parent[find(u)] = find(v)
        new_edges = {}
        for e, (u, v) in self.edges.items():
            if e in contract:
                continue
            ru, rv = find(u), find(v)
            if ru == rv:
                if drop_loops:
                    continue
                raise MatroidError(f"contracting creates a loop at edge {e}")
            new_edges[e] = (ru, rv)
        return Multigraph(new_edges)

    def delete_edges(self, delete):
        delete = set(delete)
        return Multigraph({e: uv for e, uv in self.edges.items() if e not in delete})

    def is_bridgeless(self):
        full = self.graphic_rank(self.edges)
        return all(self.graphic_rank([f for f in self.edges if f != e]) == full
                   for e in self.edges)

    def incidence_columns(self):
        """GF(2) vertex-edge incidence columns: dict edge_id -> bitmask over
        a fixed vertex ordering; also returns the vertex list."""
        verts = sorted(self.vertices)
        pos = {v: i for i, v in enumerate(verts)}
        cols = {e: (1 << pos[u]) | (1 << pos[v]) for e, (u, v) in self.edges.items()}
        return cols, verts


# ---------------------------------------------------------------------------
# matroid oracles
# ---------------------------------------------------------------------------

class Matroid:
    """Base rank oracle.  Subclasses set self.elements (sorted tuple) and
    implement rank()."""

    elements: tuple

    def rank(self, subset):
        raise NotImplementedError

    def full_rank(self):
        return self.rank(self.elements)

    def is_independent(self, subset):
        subset = tuple(subset)
        return self.rank(subset) == len(set(subset))

    def in_span(self, subset, element):
        subset = set(subset) - {element}
        return self.rank(subset | {element}) == self.rank(subset)

    def is_circuit(self, subset):
        subset = set(subset)
        if not subset or self.rank(subset) != len(subset) - 1:
            return False
        return all(self.rank(subset - {e}) == len(subset) - 1 for e in subset)

    def minor(self, contract=(), delete=()):
        return MinorMatroid(self, contract, delete)

    def parallel_classes(self):
        """Partition of the ground set into parallel classes (rank-1 pair
        closure).  Loops cannot occur (rejected at construction)."""
        elems = list(self.elements)
        parent = {e: e for e in elems}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in itertools.combinations(elems, 2):
            if find(a) != find(b) and self.rank({a, b}) == 1:
                parent[find(a)] = find(b)
        classes = {}
        for e in elems:
            classes.setdefault(find(e), []).append(e)
        return [frozenset(c) for c in classes.values()]

    def independent_sets(self, limit=200000):
        """All independent sets (including the empty set), by DFS over
        lexicographic extensions.  Raises if more than `limit` are found."""
        out = [frozenset()]
        elems = list(self.elements)

        def extend(prefix, start, prefix_rank):
            for i in range(start, len(elems)):
                cand = prefix + [elems[i]]
                if self.rank(cand) == prefix_rank + 1:
                    out.append(frozenset(cand))
                    if len(out) > limit:
                        raise MatroidError("too many independent sets to enumerate")
                    extend(cand, i + 1, prefix_rank + 1)

        extend([], 0, 0)
        return out

    def _check_no_loops(self):
        for e in self.elements:
            if self.rank({e}) == 0:
                raise MatroidError(f"element {e} is a loop")


class UniformMatroid(Matroid):
    def __init__(self, elements, k):
        self.elements = tuple(sorted(set(elements)))
        self.k = int(k)
        if self.k < 1:
            raise MatroidError("uniform matroid with k < 1 makes every element a loop")

    def rank(self, subset):
        return min(len(set(subset)), self.k)


class GraphicMatroid(Matroid):
    def __init__(self, graph: Multigraph):
        self.graph = graph
        self.elements = tuple(sorted(graph.edges))

    def rank(self, subset):
        return self.graph.graphic_rank(set(subset))

    def contract_restrict(self, contract=(), keep=None):
        """Concrete graphic minor: contract edge ids, then restrict to
        `keep` (defaults to everything left)."""
        g = self.graph.contract_edges(contract)
        if keep is not None:
            g = g.delete_edges(set(g.edges) - set(keep))
        return GraphicMatroid(g)


class CographicMatroid(Matroid):
    """Bond matroid of a multigraph: rank*(S) = |S| - r(E) + r(E \\ S)."""

    def __init__(self, graph: Multigraph):
        self.graph = graph
        self.elements = tuple(sorted(graph.edges))
        if not graph.is_bridgeless():
            raise MatroidError("bridge present: it is a loop of the cographic matroid")
        self._full = graph.graphic_rank(self.elements)

    def rank(self, subset):
        subset = set(subset)
        rest = [e for e in self.elements if e not in subset]
        return len(subset) - self._full + self.graph.graphic_rank(rest)

    def contract_restrict(self, contract=(), keep=None):
        """Cographic minor as a graph operation: contraction in the bond
        matroid = deletion of the edge in the graph; restriction (deletion
        in the bond matroid) = contraction of the edge in the graph."""
        g = self.graph.delete_edges(contract)
        if keep is not None:
            g = g.contract_edges(set(g.edges) - set(keep))
        return CographicMatroid(g)


class LaminarMatroid(Matroid):
    def __init__(self, constraints, elements=None):
        """constraints: iterable of (element_set, capacity)."""
        self.constraints = [(frozenset(int(x) for x in s), int(c)) for s, c in constraints]
        ground = set()
        for s, _ in self.constraints:
            ground |= s
        if elements is not None:
            ground |= set(int(x) for x in elements)
        self.elements = tuple(sorted(ground))
        for (a, _), (b, _) in itertools.combinations(self.constraints, 2):
            if a & b and not (a <= b or b <= a):
                raise MatroidError("constraint family is not laminar")
        for s, c in self.constraints:
            if c < 1 and s:
                raise MatroidError("capacity < 1 makes every covered element a loop")

    def rank(self, subset):
        counts = [0] * len(self.constraints)
        r = 0
        for e in sorted(set(subset)):
            ok = True
            touched = []
            for i, (s, c) in enumerate(self.constraints):
                if e in s:
                    if counts[i] >= c:
                        ok = False
                        break
                    touched.append(i)
            if ok:
                r += 1
                for i in touched:
                    counts[i] += 1
        return r


class TransversalMatroid(Matroid):
    def __init__(self, neighbors):
        """neighbors: dict left_element -> iterable of right vertex ids."""
        self.neighbors = {int(e): tuple(sorted(set(int(v) for v in vs)))
                          for e, vs in dict(neighbors).items()}
        self.elements = tuple(sorted(self.neighbors))
        for e, vs in self.neighbors.items():
            if not vs:
                raise MatroidError(f"left element {e} has no neighbors (loop)")

    def rank(self, subset):
        subset = sorted(set(subset))
        match = {}  # right vertex -> left element

        def try_augment(e, seen):
            for v in self.neighbors[e]:
                if v in seen:
                    continue
                seen.add(v)
                if v not in match or try_augment(match[v], seen):
                    match[v] = e
                    return True
            return False

        r = 0
        for e in subset:
            if try_augment(e, set()):
                r += 1
        return r


class BinaryMatroid(Matroid):
    def __init__(self, columns, nrows):
        """columns: dict element -> GF(2) column bitmask over nrows rows."""
        self.columns = {int(e): int(c) for e, c in dict(columns).items()}
        self.nrows = int(nrows)
        self.elements = tuple(sorted(self.columns))
        for e, c in self.columns.items():
            if c == 0:
                raise MatroidError(f"zero column {e} is a loop")

    def rank(self, subset):
        return gf2_rank([self.columns[e] for e in set(subset)])

    def contract_restrict(self, contract=(), keep=None):
        """Concrete binary minor via pivoting on the contracted columns."""
        contract = sorted(set(contract))
        cols = dict(self.columns)
        dead_rows = 0
        for e in contract:
            c = cols[e]
            if c == 0:
                # already spanned by earlier pivots: contracting a dependent
                # set degrades to deletion for the spanned element
                continue
            pivot_bit = 1 << (c.bit_length() - 1)
            for f in cols:
                if f != e and cols[f] & pivot_bit:
                    cols[f] ^= c
            dead_rows |= pivot_bit
            cols[e] = 0
        keep = set(self.elements) - set(contract) if keep is None else set(keep)
        # compress away the pivoted rows
        live = [i for i in range(self.nrows) if not (dead_rows >> i) & 1]
        remap = {old: new for new, old in enumerate(live)}
        out = {}
        for e in keep:
            c = cols[e]
            nc = 0
            for i in live:
                if (c >> i) & 1:
                    nc |= 1 << remap[i]
            out[e] = nc
        return BinaryMatroid(out, len(live))


class MinorMatroid(Matroid):
    """Generic minor M / contract \\ delete via rank-difference queries."""

    def __init__(self, base, contract=(), delete=()):
        contract = frozenset(contract)
        delete = frozenset(delete)
        if isinstance(base, MinorMatroid):
            contract = contract | base.contracted
            delete = delete | base.deleted
            base = base.base
        if contract & delete:
            raise MatroidError("contract and delete sets overlap")
        self.base = base
        self.contracted = contract
        self.deleted = delete
        self.elements = tuple(e for e in base.elements
                              if e not in contract and e not in delete)
        self._rC = base.rank(contract)
        self._check_no_loops()

    def rank(self, subset):
        return self.base.rank(set(subset) | self.contracted) - self._rC


def complete_graph(n):
    """K_n with edge ids in lexicographic pair order: edge i is the i-th
    entry of combinations(range(n), 2)."""
    edges = {i: p for i, p in enumerate(itertools.combinations(range(int(n)), 2))}
    return Multigraph(edges)


def standard_r10():
    """R10 in its standard GF(2) form [I_5 | A] with A the circulant whose
    first row is 1 1 0 0 1.  Elements are 0..9."""
    rows = [
        [1, 0, 0, 0, 0, 1, 1, 0, 0, 1],
        [0, 1, 0, 0, 0, 1, 1, 1, 0, 0],
        [0, 0, 1, 0, 0, 0, 1, 1, 1, 0],
        [0, 0, 0, 1, 0, 0, 0, 1, 1, 1],
        [0, 0, 0, 0, 1, 1, 0, 0, 1, 1],
    ]
    cols = {}
    for j in range(10):
        c = 0
        for i in range(5):
            if rows[i][j]:
                c |= 1 << i
        cols[j] = c
    return BinaryMatroid(cols, 5)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

def _data_lines(text):
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            yield line


def load_graph(text):
    """`graph n_vertices n_edges` header then one `u v` line per edge.
    Edge ids are assigned 0..n_edges-1 in file order.  Isolated vertices
    are stripped and flagged on the returned Multigraph."""
    lines = list(_data_lines(text))
    if not lines or lines[0].split()[0] != "graph" \
            or len(lines[0].split()) != 3:
        raise MatroidError("expected 'graph n_vertices n_edges' header")
    _, nv, ne = lines[0].split()
    nv, ne = int(nv), int(ne)
    if len(lines) - 1 != ne:
        raise MatroidError(f"expected {ne} edge lines, got {len(lines) - 1}")
    edges = {}
    for i, line in enumerate(lines[1:]):
        u, v = (int(x) for x in line.split())
        if not (0 <= u < nv and 0 <= v < nv):
            raise MatroidError(f"edge {i} touches an undeclared vertex")
        edges[i] = (u, v)
    return Multigraph(edges, vertices=range(nv))


def load_laminar(text):
    """Lines `cap <c> : <id id ...>`; ground set is the union of all ids."""
    constraints = []
    for line in _data_lines(text):
        head, _, ids = line.partition(":")
        parts = head.split()
        if len(parts) != 2 or parts[0] != "cap":
            raise MatroidError(f"bad laminar line: {line!r}")
        cap = int(parts[1])
        members = [int(x) for x in ids.split()]
        if not members:
            raise MatroidError(f"empty constraint: {line!r}")
        constraints.append((frozenset(members), cap))
    return LaminarMatroid(constraints)


def load_bipartite(text):
    """`bipartite |U| |V|` header then `u v` adjacency lines.  Left ids are
    the matroid elements."""
    lines = list(_data_lines(text))
    if not lines or lines[0].split()[0] != "bipartite" \
            or len(lines[0].split()) != 3:
        raise MatroidError("expected 'bipartite |U| |V|' header")
    _, nu, nv = lines[0].split()
    nu, nv = int(nu), int(nv)
    neighbors = {u: set() for u in range(nu)}
    for line in lines[1:]:
        u, v = (int(x) for x in line.split())
        if not (0 <= u < nu and 0 <= v < nv):
            raise MatroidError(f"adjacency {u} {v} out of range")
        neighbors[u].add(v)
    return TransversalMatroid(neighbors)


def load_binary(text):
    """`binary rows cols` header, an optional `columns id...` line naming
    the element id of each matrix column (default 0..cols-1), then `rows`
    lines of 0/1 entries."""
    lines = list(_data_lines(text))
    if not lines or lines[0].split()[0] != "binary" \
            or len(lines[0].split()) != 3:
        raise MatroidError("expected 'binary rows cols' header")
    _, nr, nc = lines[0].split()
    nr, nc = int(nr), int(nc)
    body = lines[1:]
    ids = list(range(nc))
    if body and body[0].split()[0] == "columns":
        ids = [int(t) for t in body[0].split()[1:]]
        if len(ids) != nc or len(set(ids)) != nc:
            raise MatroidError("columns line must name each column once")
        body = body[1:]
    if len(body) != nr:
        raise MatroidError(f"expected {nr} rows, got {len(body)}")
    cols = {e: 0 for e in ids}
    for i, line in enumerate(body):
        bits = line.split()
        if len(bits) != nc:
            raise MatroidError(f"row {i} has {len(bits)} entries, expected {nc}")
        for j, b in enumerate(bits):
            if b not in ("0", "1"):
                raise MatroidError(f"bad entry {b!r} in row {i}")
            if b == "1":
                cols[ids[j]] |= 1 << i
    return BinaryMatroid(cols, nr)
