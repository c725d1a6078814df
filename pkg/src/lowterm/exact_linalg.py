"""Exact integer linear algebra.

Smith and Hermite normal forms, integer solvers and lattice kernels. All
arithmetic uses Python ints; nothing here ever touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional, Sequence


class IntMatrix:
    """Immutable integer matrix stored row-major as a tuple of tuples."""

    __slots__ = ("rows", "cols", "data", "_hash")

    def __init__(self, data: Iterable[Iterable[int]] = (), rows: Optional[int] = None,
                 cols: Optional[int] = None):
        data = tuple(tuple(int(x) for x in row) for row in data)
        if rows is None:
            rows = len(data)
        if cols is None:
            cols = len(data[0]) if data else 0
        if len(data) != rows:
            if data:
                raise ValueError(f"expected {rows} rows, got {len(data)}")
            data = tuple(() for _ in range(rows))
        for row in data:
            if len(row) != cols:
                raise ValueError(f"ragged matrix: row of length {len(row)}, expected {cols}")
        self.rows = rows
        self.cols = cols
        self.data = data
        self._hash = None

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows, cols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls([[c[i] for c in columns] for i in range(rows)], rows, len(columns))

    @classmethod
    def diagonal(cls, entries: Sequence[int]) -> "IntMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)], n, n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.data]

    def column(self, j: int) -> list[int]:
        return [r[j] for r in self.data]

    def columns(self) -> list[list[int]]:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self.data))
        return self._hash

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r}, rows={self.rows}, cols={self.cols})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        return IntMatrix(matmul(self.data, other.data, other.cols), self.rows, other.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.data, other.data)],
                         self.rows, self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in r] for r in self.data], self.rows, self.cols)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix([[k * a for a in r] for r in self.data], self.rows, self.cols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix([list(c) for c in zip(*self.data)] if self.rows else [],
                         self.cols, self.rows)

    def apply(self, v: Sequence[int]) -> list[int]:
        if len(v) != self.cols:
            raise ValueError(f"vector of length {len(v)} for matrix with {self.cols} columns")
        return [sum(a * b for a, b in zip(r, v) if a) for r in self.data]

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.data for a in r)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        return IntMatrix([r + s for r, s in zip(self.data, other.data)], self.rows,
                         self.cols + other.cols)

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch in vstack")
        return IntMatrix(self.data + other.data, self.rows + other.rows, self.cols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[self.data[i][j] for j in cols] for i in rows], len(rows), len(cols))


def matmul(a, b, bcols: int) -> list[list[int]]:
    # row-by-row accumulation skips the zero entries of a
    out = []
    for row in a:
        acc = [0] * bcols
        for k, x in enumerate(row):
            if x:
                acc = [u + x * v for u, v in zip(acc, b[k])]
        out.append(acc)
    return out


def block_diagonal(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = [[0] * cols for _ in range(rows)]
    r0 = c0 = 0
    for b in blocks:
        for i, row in enumerate(b.data):
            out[r0 + i][c0:c0 + b.cols] = row
        r0 += b.rows
        c0 += b.cols
    return IntMatrix(out, rows, cols)


def determinant(m: IntMatrix) -> int:
    """Bareiss fraction-free determinant."""
    n = m.rows
    if n != m.cols:
        raise ValueError("determinant of non-square matrix")
    if n == 0:
        return 1
    a = m.tolist()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# --------------------------------------------------------------------------
# Smith normal form

@dataclass(frozen=True)
class SmithForm:
    """U·M·V = D with U, V unimodular; ``d`` lists the nonzero diagonal of D.

    ``U_inv`` and ``V_inv`` are carried along because presentation changes
    need both directions.
    """

    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    d: tuple[int, ...]
    U_inv: IntMatrix
    V_inv: IntMatrix

    @property
    def rank(self) -> int:
        return len(self.d)


def _pivot(a, t, m, n):
    best = None
    for i in range(t, m):
        row = a[i]
        for j in range(t, n):
            x = row[j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    return best
    return best


def smith_normal_form(M: IntMatrix) -> SmithForm:
    """Smith normal form with transforms.

    Pivot rule: smallest nonzero absolute value in the remaining block, ties
    broken in row-major order. Output is deterministic for a fixed input.
    """
    return _snf_cached(M if isinstance(M, IntMatrix) else IntMatrix(M))


def _snf_monomial(M: IntMatrix) -> Optional[SmithForm]:
    """Shortcut for matrices with at most one nonzero per row and column
    whose entries already form a divisibility chain (block sums of cyclic
    relations). Returns None when the shortcut does not apply."""
    m, n = M.rows, M.cols
    entries, used_cols = [], set()
    for i, row in enumerate(M.data):
        nz = [(j, x) for j, x in enumerate(row) if x]
        if len(nz) > 1:
            return None
        if nz:
            j, x = nz[0]
            if j in used_cols:
                return None
            used_cols.add(j)
            entries.append((abs(x), i, j, 1 if x > 0 else -1))
    entries.sort()
    for (a, *_), (b, *_) in zip(entries, entries[1:]):
        if b % a:
            return None
    r = len(entries)
    rows = [e[1] for e in entries]
    cols = [e[2] for e in entries]
    rows += [i for i in range(m) if i not in set(rows)]
    cols += [j for j in range(n) if j not in used_cols]
    U = [[0] * m for _ in range(m)]
    for k, i in enumerate(rows):
        U[k][i] = entries[k][3] if k < r else 1
    V = [[0] * n for _ in range(n)]
    for k, j in enumerate(cols):
        V[j][k] = 1
    D = [[0] * n for _ in range(m)]
    for k in range(r):
        D[k][k] = entries[k][0]
    Ut = [list(c) for c in zip(*U)] if m else []
    Vt = [list(c) for c in zip(*V)] if n else []
    return SmithForm(IntMatrix(U, m, m), IntMatrix(D, m, n), IntMatrix(V, n, n),
                     tuple(e[0] for e in entries), IntMatrix(Ut, m, m), IntMatrix(Vt, n, n))


@lru_cache(maxsize=4096)
def _snf_cached(M: IntMatrix) -> SmithForm:
    fast = _snf_monomial(M)
    if fast is not None:
        return fast
    m, n = M.rows, M.cols
    a = M.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    Ui = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]
    Vi = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_addmul(i, t, q):
        # row_i -= q * row_t
        ai, at = a[i], a[t]
        a[i] = [x - q * y for x, y in zip(ai, at)]
        U[i] = [x - q * y for x, y in zip(U[i], U[t])]
        for r in Ui:
            r[t] += q * r[i]

    def col_addmul(j, t, q):
        # col_j -= q * col_t
        for r in a:
            if r[t]:
                r[j] -= q * r[t]
        for r in V:
            if r[t]:
                r[j] -= q * r[t]
        Vi[t] = [x + q * y for x, y in zip(Vi[t], Vi[j])]

    def swap_rows(i, k):
        if i != k:
            a[i], a[k] = a[k], a[i]
            U[i], U[k] = U[k], U[i]
            for r in Ui:
                r[i], r[k] = r[k], r[i]

    def swap_cols(j, k):
        if j != k:
            for r in a:
                r[j], r[k] = r[k], r[j]
            for r in V:
                r[j], r[k] = r[k], r[j]
            Vi[j], Vi[k] = Vi[k], Vi[j]

    t = 0
    d = []
    while t < min(m, n):
        piv = _pivot(a, t, m, n)
        if piv is None:
            break
        _, pi, pj = piv
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                x = a[i][t]
                if x:
                    q = _round_div(x, p)
                    row_addmul(i, t, q)
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                x = a[t][j]
                if x:
                    q = _round_div(x, p)
                    col_addmul(j, t, q)
                    if a[t][j]:
                        dirty = True
            if dirty:
                # move the smallest leftover in row/col t into the pivot
                best = (abs(p), t, t)
                for i in range(t + 1, m):
                    if a[i][t] and abs(a[i][t]) < best[0]:
                        best = (abs(a[i][t]), i, t)
                for j in range(t + 1, n):
                    if a[t][j] and abs(a[t][j]) < best[0]:
                        best = (abs(a[t][j]), t, j)
                swap_rows(t, best[1])
                swap_cols(t, best[2])
                continue
            bad = None
            for i in range(t + 1, m):
                row = a[i]
                for j in range(t + 1, n):
                    if row[j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            # row_t += row_bad, then keep reducing
            row_addmul(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]
            for r in Ui:
                r[t] = -r[t]
        d.append(a[t][t])
        t += 1
    return SmithForm(IntMatrix(U, m, m), IntMatrix(a, m, n), IntMatrix(V, n, n), tuple(d),
                     IntMatrix(Ui, m, m), IntMatrix(Vi, n, n))


def _round_div(x: int, p: int) -> int:
    # nearest quotient keeps remainders small
    q, r = divmod(x, p)
    if 2 * abs(r) > abs(p):
        q += 1
    return q


def elementary_divisors(M: IntMatrix) -> tuple[int, ...]:
    return smith_normal_form(M).d


# --------------------------------------------------------------------------
# Hermite normal form

def hermite_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Row-style Hermite normal form: returns (H, U) with U·M = H.

    H is in row echelon form: each pivot is positive, pivot columns strictly
    increase down the rows, entries above a pivot lie in [0, pivot), and
    zero rows sit at the bottom.
    """
    m, n = M.rows, M.cols
    a = M.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    r = 0
    for c in range(n):
        if r >= m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c]]
            if not nz:
                break
            k = min(nz, key=lambda i: (abs(a[i][c]), i))
            if k != r:
                a[r], a[k] = a[k], a[r]
                U[r], U[k] = U[k], U[r]
            done = True
            for i in range(r + 1, m):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if r < m and a[r][c]:
            if a[r][c] < 0:
                a[r] = [-x for x in a[r]]
                U[r] = [-x for x in U[r]]
            p = a[r][c]
            for i in range(r):
                q = a[i][c] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    U[i] = [x - q * y for x, y in zip(U[i], U[r])]
            r += 1
    return IntMatrix(a, m, n), IntMatrix(U, m, m)


# --------------------------------------------------------------------------
# solvers

def solve_integer(A: IntMatrix, b: Sequence[int]) -> Optional[list[int]]:
    """Return an integer x with A·x = b, or None when none exists."""
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has length {len(b)}, matrix has {A.rows} rows")
    if A.cols == 0:
        return [] if all(x == 0 for x in b) else None
    s = smith_normal_form(A)
    c = s.U.apply(b)
    y = [0] * A.cols
    for i, di in enumerate(s.d):
        q, r = divmod(c[i], di)
        if r:
            return None
        y[i] = q
    if any(c[i] for i in range(len(s.d), A.rows)):
        return None
    return s.V.apply(y)


def solve_mod(A: IntMatrix, b: Sequence[int], R: IntMatrix) -> Optional[list[int]]:
    """Integer x with A·x − b in the column lattice of R, or None."""
    if A.rows != R.rows or len(b) != A.rows:
        raise ValueError("dimension mismatch in solve_mod")
    x = solve_integer(A.hstack(R), b)
    return None if x is None else x[:A.cols]


def kernel_mod(A: IntMatrix, mods: Sequence[int]) -> IntMatrix:
    """Basis (as columns) of {x in Z^n : (A·x)_i ≡ 0 mod mods[i]}.

    ``mods[i] == 0`` imposes exact vanishing of row i. Rows are absorbed one
    at a time by unimodular column operations on the running basis.
    """
    if len(mods) != A.rows:
        raise ValueError("one modulus per row required")
    n = A.cols
    basis = [[int(i == j) for i in range(n)] for j in range(n)]  # list of column vectors
    for row, m in zip(A.data, mods):
        m = abs(m)
        if m == 1 or not basis:
            continue
        nzrow = [(k, x) for k, x in enumerate(row) if x]
        if not nzrow:
            continue
        vals = []
        for v in basis:
            s = sum(x * v[k] for k, x in nzrow)
            vals.append(s % m if m else s)
        # gcd-combine all values into the first nonzero slot
        idx = [j for j, s in enumerate(vals) if s]
        if not idx:
            continue
        p = idx[0]
        for j in idx[1:]:
            a, b = vals[p], vals[j]
            if b == 0:
                continue
            g, x, y = _xgcd(a, b)
            ag, bg = a // g, b // g
            vp, vj = basis[p], basis[j]
            basis[p] = [x * s + y * t for s, t in zip(vp, vj)]
            basis[j] = [ag * t - bg * s for s, t in zip(vp, vj)]
            vals[p], vals[j] = g, 0
        g = vals[p]
        if m == 0:
            basis.pop(p)
        else:
            k = m // gcd(g, m)
            if k != 1:
                basis[p] = [k * s for s in basis[p]]
        if len(basis) > 8 and any(abs(x) > (1 << 40) for v in basis for x in v):
            basis = _reduce_basis(basis, n)
    if not basis:
        return IntMatrix.zeros(n, 0)
    return _reduce_basis(basis, n, as_matrix=True)


def _reduce_basis(basis, n, as_matrix=False):
    # Hermite-reduce the lattice generated by the columns (keeps entries small)
    H, _ = hermite_normal_form(IntMatrix(basis, len(basis), n))
    cols = [list(r) for r in H.data if any(r)]
    if as_matrix:
        return IntMatrix.from_columns(cols, n) if cols else IntMatrix.zeros(n, 0)
    return cols


def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Basis of the integer kernel of A, as columns."""
    return kernel_mod(A, [0] * A.rows)


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x·a + y·b = g = gcd(a, b) >= 0."""
    return _xgcd(a, b)
