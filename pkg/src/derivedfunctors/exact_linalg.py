"""Exact integer matrices, Smith normal form, kernels and linear solving.

Everything here works over the integers with Python's arbitrary-precision
``int``.  Matrices are immutable; the normal-form loops themselves live in
``_kernels`` (compiled) or ``_kernels_py`` (fallback), see ``_backend``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

from derivedfunctors import _backend
from derivedfunctors.errors import ShapeError


class IntMatrix:
    """Immutable ``rows x cols`` integer matrix.

    Empty shapes (``0 x n`` or ``m x 0``) are legal and are used for maps
    from or to the trivial group.
    """

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, data: tuple):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ShapeError(f"data does not have shape {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self._data = data
        self._hash = None

    # construction -----------------------------------------------------

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in r) for r in rows)
        if cols is None:
            if not data:
                raise ShapeError("column count required for a matrix with no rows")
            cols = len(data[0])
        return cls(len(data), cols, data)

    @classmethod
    def from_columns(cls, columns: Iterable[Sequence[int]], rows: int) -> "IntMatrix":
        columns = [tuple(int(x) for x in c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise ShapeError(f"column of length {len(c)}, expected {rows}")
        return cls(rows, len(columns), tuple(tuple(c[i] for c in columns) for i in range(rows)))

    @classmethod
    def from_entries(cls, rows: int, cols: int, entries: Sequence[int]) -> "IntMatrix":
        if len(entries) != rows * cols:
            raise ShapeError("entries length must equal rows * cols")
        return cls(rows, cols, tuple(tuple(int(x) for x in entries[i * cols:(i + 1) * cols]) for i in range(rows)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: Optional[int] = None, cols: Optional[int] = None) -> "IntMatrix":
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        return cls(rows, cols, tuple(
            tuple(values[i] if i == j and i < len(values) else 0 for j in range(cols)) for i in range(rows)))

    # access -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> tuple[int, ...]:
        return tuple(x for r in self._data for x in r)

    def to_rows(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(tuple(r[j] for r in self._data) for j in range(self.cols)))

    def select_rows(self, idx: Iterable[int]) -> "IntMatrix":
        idx = list(idx)
        return IntMatrix(len(idx), self.cols, tuple(self._data[i] for i in idx))

    def select_columns(self, idx: Iterable[int]) -> "IntMatrix":
        idx = list(idx)
        return IntMatrix(self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self._data))

    # arithmetic -------------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        out = _backend.matmul(self._data, other._data, self.rows, self.cols, other.cols)
        return IntMatrix(self.rows, other.cols, tuple(map(tuple, out)))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ShapeError(f"vector of length {len(v)} for {self.shape} matrix")
        return tuple(sum(a * b for a, b in zip(r, v) if a and b) for r in self._data)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a + b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        self._check_same(other)
        return IntMatrix(self.rows, self.cols, tuple(
            tuple(a - b for a, b in zip(r, s)) for r, s in zip(self._data, other._data)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(-a for a in r) for r in self._data))

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * a for a in r) for r in self._data))

    def kron(self, other: "IntMatrix") -> "IntMatrix":
        """Kronecker product, row index ``(i, k) -> i * other.rows + k``."""
        data = []
        for r in self._data:
            for s in other._data:
                data.append(tuple(a * b for a in r for b in s))
        return IntMatrix(self.rows * other.rows, self.cols * other.cols, tuple(data))

    def is_zero(self) -> bool:
        return not any(any(r) for r in self._data)

    def max_abs(self) -> int:
        return max((abs(x) for r in self._data for x in r), default=0)

    def det(self) -> int:
        """Determinant by fraction-free Bareiss elimination."""
        if self.rows != self.cols:
            raise ShapeError("determinant of a non-square matrix")
        n = self.rows
        M = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if M[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if M[i][k]), None)
                if swap is None:
                    return 0
                M[k], M[swap] = M[swap], M[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
            prev = M[k][k]
        return sign * M[n - 1][n - 1] if n else 1

    # protocol ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self._data == other._data

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}, {self.cols}, {self.to_rows()})"

    def __reduce__(self):
        return (IntMatrix, (self.rows, self.cols, self._data))


def hstack(blocks: Sequence[IntMatrix], rows: Optional[int] = None) -> IntMatrix:
    if not blocks:
        if rows is None:
            raise ShapeError("row count required to stack zero blocks")
        return IntMatrix.zeros(rows, 0)
    m = blocks[0].rows
    if any(b.rows != m for b in blocks):
        raise ShapeError("hstack blocks disagree on row count")
    data = tuple(tuple(x for b in blocks for x in b.row(i)) for i in range(m))
    return IntMatrix(m, sum(b.cols for b in blocks), data)


def vstack(blocks: Sequence[IntMatrix], cols: Optional[int] = None) -> IntMatrix:
    if not blocks:
        if cols is None:
            raise ShapeError("column count required to stack zero blocks")
        return IntMatrix.zeros(0, cols)
    n = blocks[0].cols
    if any(b.cols != n for b in blocks):
        raise ShapeError("vstack blocks disagree on column count")
    return IntMatrix(sum(b.rows for b in blocks), n, tuple(r for b in blocks for r in b._data))


def block_diagonal(blocks: Sequence[IntMatrix]) -> IntMatrix:
    cols = sum(b.cols for b in blocks)
    data = []
    offset = 0
    for b in blocks:
        for r in b._data:
            data.append((0,) * offset + r + (0,) * (cols - offset - b.cols))
        offset += b.cols
    return IntMatrix(len(data), cols, tuple(data))


@dataclass(frozen=True)
class SmithDecomposition:
    U: IntMatrix
    D: IntMatrix
    V: IntMatrix
    diagonal: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


@lru_cache(maxsize=8192)
def smith_normal_form(A: IntMatrix) -> SmithDecomposition:
    """Unimodular ``U``, ``V`` with ``U @ A @ V == D`` diagonal, ``d_i | d_{i+1}``.

    Pivots are chosen as the smallest nonzero absolute value, ties broken
    by (row, col), so the decomposition is a function of ``A``.
    """
    m, n = A.shape
    U, D, V = _backend.smith(A._data, m, n)
    U = IntMatrix(m, m, tuple(map(tuple, U)))
    D = IntMatrix(m, n, tuple(map(tuple, D)))
    V = IntMatrix(n, n, tuple(map(tuple, V)))
    return SmithDecomposition(U, D, V, tuple(D[i, i] for i in range(min(m, n))))


def hermite_rows(rows: Iterable[Sequence[int]], n: int) -> list[tuple[int, ...]]:
    """Reduced Hermite basis of the lattice spanned by ``rows`` in Z^n."""
    return [tuple(r) for r in _backend.hermite([list(r) for r in rows], n)]


def lattice_basis(generators: IntMatrix) -> IntMatrix:
    """Canonical basis (as columns) of the lattice spanned by the columns."""
    return IntMatrix.from_columns(hermite_rows(generators.columns(), generators.rows), generators.rows)


@lru_cache(maxsize=8192)
def kernel_basis(A: IntMatrix) -> IntMatrix:
    """Columns form a Z-basis of ``{x : A x = 0}``, in Hermite-reduced form."""
    snf = smith_normal_form(A)
    r = snf.rank
    V = snf.V
    gens = [V.column(j) for j in range(r, A.cols)]
    return IntMatrix.from_columns(hermite_rows(gens, A.cols), A.cols)


def _solve_with(snf: SmithDecomposition, b: Sequence[int]) -> Optional[tuple[int, ...]]:
    c = snf.U.apply(b)
    n = snf.V.rows
    y = [0] * n
    for i, ci in enumerate(c):
        d = snf.diagonal[i] if i < len(snf.diagonal) else 0
        if d == 0:
            if ci:
                return None
        else:
            q, rem = divmod(ci, d)
            if rem:
                return None
            y[i] = q
    return snf.V.apply(y)


def solve(A: IntMatrix, b: Sequence[int]) -> Optional[tuple[int, ...]]:
    """Some integer ``x`` with ``A x = b``, or ``None`` if there is none.

    The free coordinates in Smith coordinates are set to zero, which makes
    the returned representative deterministic.
    """
    if len(b) != A.rows:
        raise ShapeError(f"right-hand side of length {len(b)} for {A.shape} matrix")
    return _solve_with(smith_normal_form(A), b)


def solve_matrix(A: IntMatrix, B: IntMatrix) -> Optional[IntMatrix]:
    """Integer ``X`` with ``A X = B``, column by column, or ``None``."""
    if B.rows != A.rows:
        raise ShapeError(f"cannot solve {A.shape} system against {B.shape}")
    snf = smith_normal_form(A)
    cols = []
    for j in range(B.cols):
        x = _solve_with(snf, B.column(j))
        if x is None:
            return None
        cols.append(x)
    return IntMatrix.from_columns(cols, A.cols)


def in_column_span(G: IntMatrix, B: IntMatrix) -> bool:
    """Whether every column of ``B`` is an integer combination of columns of ``G``."""
    return solve_matrix(G, B) is not None


def preimage(A: IntMatrix, L: IntMatrix) -> IntMatrix:
    """Basis (columns) of ``{x : A x in colspan(L)}``."""
    if A.rows != L.rows:
        raise ShapeError("preimage: A and L must have the same number of rows")
    if L.cols == 0:
        return kernel_basis(A)
    K = kernel_basis(hstack([A, L]))
    gens = [K.column(j)[:A.cols] for j in range(K.cols)]
    return IntMatrix.from_columns(hermite_rows(gens, A.cols), A.cols)


def same_lattice(G: IntMatrix, H: IntMatrix) -> bool:
    return in_column_span(G, H) and in_column_span(H, G)
