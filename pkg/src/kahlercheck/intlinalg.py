"""Exact integer and rational linear algebra.

Everything in this module runs on Python ints and ``fractions.Fraction``,
so there is no overflow and no floating point anywhere.  Smith normal form
pivots can blow up even on small matrices, which is why arbitrary precision
is not negotiable here.  The intended scale is desk-size (dimension <~ 50);
nothing is tuned beyond that.

The Smith normal form decomposition U*A*V = D is the engine behind every
rank, torsion and solvability question elsewhere in the package:

>>> A = IntMatrix.from_rows([[2, 4], [6, 8]])
>>> smith_normal_form(A).diagonal
(2, 4)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class IntMatrix:
    """Immutable integer matrix, entries stored row-major."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, data):
        self.rows = rows
        self.cols = cols
        self._data = tuple(tuple(int(x) for x in row) for row in data)
        if len(self._data) != rows or any(len(r) != cols for r in self._data):
            raise ValueError("matrix data does not match shape %dx%d" % (rows, cols))

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        ncols = len(rows[0]) if rows else 0
        return cls(len(rows), ncols, rows)

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, n):
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, key):
        i, j = key
        return self._data[i][j]

    def row(self, i):
        return self._data[i]

    def column(self, j):
        return tuple(r[j] for r in self._data)

    @property
    def entries(self):
        """Row-major flat tuple of entries."""
        return tuple(x for row in self._data for x in row)

    def to_rows(self):
        return [list(r) for r in self._data]

    def transpose(self):
        return IntMatrix(self.cols, self.rows,
                         [[self._data[i][j] for i in range(self.rows)]
                          for j in range(self.cols)])

    def mul(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch for product")
        rows = []
        for i in range(self.rows):
            a = self._data[i]
            rows.append([sum(a[k] * other._data[k][j] for k in range(self.cols))
                         for j in range(other.cols)])
        return IntMatrix(self.rows, other.cols, rows)

    def mul_vec(self, vec):
        vec = list(vec)
        if len(vec) != self.cols:
            raise ValueError("vector length does not match column count")
        return [sum(r[k] * vec[k] for k in range(self.cols)) for r in self._data]

    def det(self):
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if pivot is None:
                    return 0
                a[k], a[pivot] = a[pivot], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def __eq__(self, other):
        return (isinstance(other, IntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self._data == other._data)

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __repr__(self):
        return "IntMatrix(%r)" % (self.to_rows(),)


@dataclass(frozen=True)
class SNFResult:
    """U*A*V = D with U, V unimodular and D = diag(d1 | d2 | ...)."""

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    diagonal: tuple

    @property
    def rank(self):
        return sum(1 for d in self.diagonal if d != 0)


@dataclass(frozen=True)
class AbelianStructure:
    """Finitely generated abelian group: Z^rank x prod Z/d_i."""

    rank: int
    torsion: tuple

    def is_trivial(self):
        return self.rank == 0 and not self.torsion

    def is_finite(self):
        return self.rank == 0

    def __str__(self):
        parts = []
        if self.rank:
            parts.append("Z^%d" % self.rank if self.rank > 1 else "Z")
        parts.extend("Z/%d" % d for d in self.torsion)
        return " x ".join(parts) if parts else "0"


def smith_normal_form(A):
    """Diagonalize A over Z by unimodular row and column operations.

    Pivot choice is the minimal nonzero absolute value in the working
    submatrix, scanning row-major so ties break deterministically.  The
    returned transforms always satisfy U*A*V = D exactly.
    """
    r, c = A.rows, A.cols
    D = A.to_rows()
    U = IntMatrix.identity(r).to_rows()
    V = IntMatrix.identity(c).to_rows()

    def swap_rows(i, j):
        if i != j:
            D[i], D[j] = D[j], D[i]
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        if i != j:
            for row in D:
                row[i], row[j] = row[j], row[i]
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, mult):
        # row_dst += mult * row_src
        D[dst] = [a + mult * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + mult * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, mult):
        for row in D:
            row[dst] += mult * row[src]
        for row in V:
            row[dst] += mult * row[src]

    def negate_row(i):
        D[i] = [-x for x in D[i]]
        U[i] = [-x for x in U[i]]

    t = 0
    size = min(r, c)
    while t < size:
        pivot = None
        best = None
        for i in range(t, r):
            for j in range(t, c):
                v = abs(D[i][j])
                if v and (best is None or v < best):
                    best = v
                    pivot = (i, j)
        if pivot is None:
            break
        swap_rows(t, pivot[0])
        swap_cols(t, pivot[1])
        while True:
            for i in range(t + 1, r):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
            resid = [i for i in range(t + 1, r) if D[i][t]]
            if resid:
                # remainders are strictly smaller than the pivot; promote one
                i = min(resid, key=lambda k: (abs(D[k][t]), k))
                swap_rows(t, i)
                continue
            for j in range(t + 1, c):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
            resid = [j for j in range(t + 1, c) if D[t][j]]
            if resid:
                j = min(resid, key=lambda k: (abs(D[t][k]), k))
                swap_cols(t, j)
                continue
            # enforce d_t | every remaining entry before moving on
            bad = None
            for i in range(t + 1, r):
                for j in range(t + 1, c):
                    if D[i][j] % D[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if D[t][t] < 0:
            negate_row(t)
        t += 1

    diagonal = tuple(D[i][i] for i in range(size))
    return SNFResult(U=IntMatrix.from_rows(U) if r else IntMatrix(0, 0, []),
                     D=IntMatrix(r, c, D),
                     V=IntMatrix.from_rows(V) if c else IntMatrix(0, 0, []),
                     diagonal=diagonal)


def solve_integer(A, b):
    """Some integer x with A*x = b, or None when no such x exists.

    Found by change of basis through the Smith form; the witness is
    re-verified by multiplication before returning.
    """
    b = [int(x) for x in b]
    if len(b) != A.rows:
        raise ValueError("right-hand side length does not match row count")
    snf = smith_normal_form(A)
    cb = snf.U.mul_vec(b)
    y = [0] * A.cols
    for i in range(A.rows):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if d:
            if cb[i] % d:
                return None
            y[i] = cb[i] // d
        elif cb[i]:
            return None
    x = snf.V.mul_vec(y)
    assert A.mul_vec(x) == b
    return x


def solve_rational(A, b):
    """Some rational x with A*x = b, or None (exact Gaussian elimination)."""
    b = [Fraction(v) for v in b]
    if len(b) != A.rows:
        raise ValueError("right-hand side length does not match row count")
    m = [[Fraction(x) for x in A.row(i)] + [b[i]] for i in range(A.rows)]
    rows, cols = A.rows, A.cols
    pivots = []
    rank = 0
    for j in range(cols):
        pivot = next((i for i in range(rank, rows) if m[i][j]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][j]
        m[rank] = [v * inv for v in m[rank]]
        for i in range(rows):
            if i != rank and m[i][j]:
                f = m[i][j]
                m[i] = [a - f * c for a, c in zip(m[i], m[rank])]
        pivots.append(j)
        rank += 1
        if rank == rows:
            break
    for i in range(rank, rows):
        if m[i][cols]:
            return None
    x = [Fraction(0)] * cols
    for i, j in enumerate(pivots):
        x[j] = m[i][cols]
    assert A_mul_frac(A, x) == b
    return x


def A_mul_frac(A, vec):
    return [sum(Fraction(r[k]) * vec[k] for k in range(A.cols)) for r in
            (A.row(i) for i in range(A.rows))]


def cokernel(A):
    """Z^cols modulo the row span of A, as rank plus invariant factors > 1.

    With A the relator-by-generator exponent matrix this is the
    abelianization of the presented group.
    """
    snf = smith_normal_form(A)
    rank = A.cols - snf.rank
    torsion = tuple(d for d in snf.diagonal if d > 1)
    return AbelianStructure(rank=rank, torsion=torsion)


def inverse_unimodular(M):
    """Exact integer inverse of a matrix with determinant +-1."""
    if M.rows != M.cols:
        raise ValueError("only square matrices invert")
    n = M.rows
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        x = solve_integer(M, e)
        if x is None:
            raise ValueError("matrix is not unimodular")
        cols.append(x)
    return IntMatrix(n, n, [[cols[j][i] for j in range(n)] for i in range(n)])


# ---------------------------------------------------------------------------
# dense rational row spaces


def rref(rows):
    """Reduced row echelon form over Q; returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return [], []
    cols = len(m[0])
    pivots = []
    rank = 0
    for j in range(cols):
        pivot = next((i for i in range(rank, len(m)) if m[i][j]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = 1 / m[rank][j]
        m[rank] = [v * inv for v in m[rank]]
        for i in range(len(m)):
            if i != rank and m[i][j]:
                f = m[i][j]
                m[i] = [a - f * c for a, c in zip(m[i], m[rank])]
        pivots.append(j)
        rank += 1
    return m[:rank], pivots


def rational_rank(rows):
    return len(rref(rows)[0])


def nullspace(rows, width=None):
    """Basis of {x : M x = 0} for the matrix with the given rows."""
    if width is None:
        if not rows:
            raise ValueError("need explicit width for an empty matrix")
        width = len(rows[0])
    reduced, pivots = rref(rows)
    basis = []
    pivot_set = set(pivots)
    for j in range(width):
        if j in pivot_set:
            continue
        vec = [Fraction(0)] * width
        vec[j] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -reduced[i][j]
        basis.append(vec)
    return basis


class QSpace:
    """Subspace of Q^width kept as an incrementally built echelon basis."""

    def __init__(self, width):
        self.width = width
        self._rows = []      # reduced rows, sorted by pivot
        self._pivots = []

    @classmethod
    def from_rows(cls, width, rows):
        space = cls(width)
        for r in rows:
            space.add(r)
        return space

    def reduce(self, vec):
        v = [Fraction(x) for x in vec]
        for row, p in zip(self._rows, self._pivots):
            if v[p]:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def add(self, vec):
        """Insert vec; returns True when the dimension grew."""
        v = self.reduce(vec)
        pivot = next((j for j in range(self.width) if v[j]), None)
        if pivot is None:
            return False
        inv = 1 / v[pivot]
        v = [x * inv for x in v]
        for i, row in enumerate(self._rows):
            if row[pivot]:
                f = row[pivot]
                self._rows[i] = [a - f * b for a, b in zip(row, v)]
        at = next((i for i, p in enumerate(self._pivots) if p > pivot),
                  len(self._pivots))
        self._rows.insert(at, v)
        self._pivots.insert(at, pivot)
        return True

    def contains(self, vec):
        return all(x == 0 for x in self.reduce(vec))

    def contains_space(self, other):
        return all(self.contains(r) for r in other.basis())

    def equals(self, other):
        return (self.dim == other.dim and self.contains_space(other))

    @property
    def dim(self):
        return len(self._rows)

    def basis(self):
        return [list(r) for r in self._rows]

    @staticmethod
    def intersection(a, b):
        """Intersection of two subspaces of the same ambient Q^width."""
        if a.width != b.width:
            raise ValueError("ambient dimensions differ")
        out = QSpace(a.width)
        if a.dim == 0 or b.dim == 0:
            return out
        stacked = a.basis() + b.basis()
        # left-kernel combos lambda*U + mu*V = 0 give the intersection
        transposed = [[stacked[i][j] for i in range(len(stacked))]
                      for j in range(a.width)]
        for combo in nullspace(transposed, width=len(stacked)):
            vec = [Fraction(0)] * a.width
            for coeff, row in zip(combo[:a.dim], a.basis()):
                if coeff:
                    vec = [x + coeff * y for x, y in zip(vec, row)]
            out.add(vec)
        return out
