"""Small exact linear algebra kernels: GF(2) bitmask routines, rational
Gaussian elimination, and a phase-1 simplex used for exact LP feasibility.

Everything here works over exact types (python ints as GF(2) row bitmasks,
fractions.Fraction elsewhere).  These are deliberately small: the ground sets
in this package are desk-scale and the point is exactness, not speed.
"""

from __future__ import annotations

from fractions import Fraction


# ---------------------------------------------------------------------------
# GF(2) vectors as int bitmasks (bit i = coordinate i)
# ---------------------------------------------------------------------------

def gf2_rank(vectors):
    """Rank of a list of GF(2) vectors given as int bitmasks."""
    basis = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def gf2_basis(vectors):
    """Row-reduce a list of bitmask vectors; returns a reduced basis list."""
    basis = []
    for v in vectors:
        for b in basis:
            if v ^ b < v:
                v ^= b
        if v:
            # back-reduce existing rows by the new pivot
            basis = [b ^ v if (b ^ v) < b else b for b in basis]
            basis.append(v)
            basis.sort(reverse=True)
    return basis


def gf2_in_span(vectors, target):
    """True iff target (bitmask) lies in the GF(2) span of vectors."""
    for b in gf2_basis(vectors):
        if target ^ b < target:
            target ^= b
    return target == 0


def gf2_nullspace(rows, ncols):
    """Null space basis of a GF(2) matrix given as row bitmasks over ncols
    columns.  Returns bitmask vectors indexed by column."""
    rows = [r for r in gf2_basis(list(rows))]
    pivots = {}
    for r in rows:
        pivots[r.bit_length() - 1] = r
    free_cols = [c for c in range(ncols) if c not in pivots]
    null = []
    for fc in free_cols:
        v = 1 << fc
        # solve for pivot coordinates: each pivot row constrains its pivot bit
        for pc in sorted(pivots, reverse=True):
            r = pivots[pc]
            # parity of non-pivot part of r under current v
            if bin(r & v).count("1") % 2 == 1:
                v ^= 1 << pc
        null.append(v)
    return null


def gf2_orthogonal_complement(vectors, ncols):
    """Basis of the orthogonal complement (standard dot product over GF(2))
    of the span of the given bitmask vectors inside GF(2)^ncols."""
    return gf2_nullspace(vectors, ncols)


def gf2_intersect_zero_coords(vectors, zero_cols, ncols):
    """Basis of the subspace of span(vectors) that vanishes on zero_cols.

    Standard trick: permute coordinates so zero_cols are most significant,
    row-reduce, and keep the rows whose leading bit is outside zero_cols
    (those rows then have no support in zero_cols at all).
    """
    zero_cols = sorted(set(zero_cols))
    other = [c for c in range(ncols) if c not in zero_cols]
    order = other + zero_cols
    newpos = {c: i for i, c in enumerate(order)}

    def permute(v):
        w = 0
        for c in range(ncols):
            if v >> c & 1:
                w |= 1 << newpos[c]
        return w

    def unpermute(w):
        v = 0
        for c in range(ncols):
            if w >> newpos[c] & 1:
                v |= 1 << c
        return v

    basis = gf2_basis([permute(v) for v in vectors])
    thresh = 1 << len(other)
    return [unpermute(w) for w in basis if w < thresh]


# ---------------------------------------------------------------------------
# Rational Gaussian elimination
# ---------------------------------------------------------------------------

def solve_rational(A, b):
    """Solve A x = b exactly over Fraction for square full-rank A.

    A is a list of rows, b a list.  Raises ValueError if singular.
    """
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(b[i])] for i, row in enumerate(A)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            raise ValueError("singular system")
        M[col], M[piv] = M[piv], M[col]
        f = M[col][col]
        M[col] = [x / f for x in M[col]]
        for r in range(n):
            if r != col and M[r][col] != 0:
                g = M[r][col]
                M[r] = [x - g * y for x, y in zip(M[r], M[col])]
    return [M[r][n] for r in range(n)]


def det_rational(A):
    """Determinant of a square matrix over Fraction (fraction-free-ish)."""
    n = len(A)
    M = [[Fraction(x) for x in row] for row in A]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            det = -det
        det *= M[col][col]
        inv = M[col][col]
        for r in range(col + 1, n):
            if M[r][col] != 0:
                f = M[r][col] / inv
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return det


# ---------------------------------------------------------------------------
# Exact LP feasibility (phase-1 simplex, Bland's rule)
# ---------------------------------------------------------------------------

def feasible_nonneg_solution(A, b):
    """Find x >= 0 with A x = b exactly, or return None if infeasible.

    A: list of m rows (length n) of Fraction-convertible entries, b length m.
    Phase-1 simplex with artificial variables and Bland's anticycling rule.
    Returns a list of n Fractions or None.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    A = [[Fraction(x) for x in row] for row in A]
    b = [Fraction(x) for x in b]
    for i in range(m):
        if b[i] < 0:
            A[i] = [-x for x in A[i]]
            b[i] = -b[i]
    # tableau columns: n real vars + m artificials | rhs
    T = [A[i] + [Fraction(1) if j == i else Fraction(0) for j in range(m)] + [b[i]]
         for i in range(m)]
    basis = [n + i for i in range(m)]
    # objective row: minimize sum of artificials -> reduced costs
    obj = [Fraction(0)] * (n + m) + [Fraction(0)]
    for i in range(m):
        for j in range(n + m + 1):
            obj[j] += T[i][j]

    while True:
        enter = next((j for j in range(n + m) if obj[j] > 0 and j not in basis), None)
        if enter is None:
            break
        ratios = [(T[i][n + m] / T[i][enter], basis[i], i)
                  for i in range(m) if T[i][enter] > 0]
        if not ratios:
            break  # unbounded cannot happen in phase 1, but guard anyway
        _, _, leave = min(ratios, key=lambda t: (t[0], t[1]))
        piv = T[leave][enter]
        T[leave] = [x / piv for x in T[leave]]
        for i in range(m):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [x - f * y for x, y in zip(T[i], T[leave])]
        f = obj[enter]
        obj = [x - f * y for x, y in zip(obj, T[leave])]
        basis[leave] = enter

    total = sum(T[i][n + m] for i in range(m) if basis[i] >= n)
    if total != 0:
        return None
    x = [Fraction(0)] * n
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = T[i][n + m]
    return x
