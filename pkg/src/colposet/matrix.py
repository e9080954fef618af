"""Dense exact matrices over Q, Z, or a prime field.

Storage: int64 numpy arrays for prime fields (entries reduced to [0,p)),
object numpy arrays of python ints / mpq for Q and Z. Matrices are treated
as immutable after construction.
"""
from __future__ import annotations

import numpy as np

from .rings import Ring, RingError

# int64 matmul is exact while n*(p-1)^2 stays below 2^62
_FP_MATMUL_GUARD = 1 << 62


class Matrix:
    __slots__ = ("ring", "a")

    def __init__(self, ring: Ring, a: np.ndarray, _canon: bool = True):
        if a.ndim != 2:
            raise ValueError("matrix must be 2-dimensional")
        if ring.kind == "fp":
            a = np.asarray(a, dtype=np.int64) % ring.p
        else:
            if a.dtype != object:
                a = a.astype(object)
            if _canon:
                canon = ring.canon
                flat = a.ravel()
                for i, x in enumerate(flat):
                    flat[i] = canon(x)
        a.flags.writeable = False
        self.ring = ring
        self.a = a

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_rows(cls, ring: Ring, rows, ncols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if rows:
            ncols = len(rows[0]) if ncols is None else ncols
            for r in rows:
                if len(r) != ncols:
                    raise ValueError("ragged rows")
        elif ncols is None:
            ncols = 0
        dtype = np.int64 if ring.kind == "fp" else object
        a = np.empty((len(rows), ncols), dtype=dtype)
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                a[i, j] = ring.canon(x)
        return cls(ring, a, _canon=False)

    @classmethod
    def zeros(cls, ring: Ring, m: int, n: int) -> "Matrix":
        if ring.kind == "fp":
            return cls(ring, np.zeros((m, n), dtype=np.int64), _canon=False)
        a = np.empty((m, n), dtype=object)
        a[:] = 0
        return cls(ring, a, _canon=False)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        m = cls.zeros(ring, n, n)
        a = _mutable(m.a)
        for i in range(n):
            a[i, i] = 1
        return cls(ring, a, _canon=False)

    # -- shape / access ----------------------------------------------------

    @property
    def shape(self):
        return self.a.shape

    @property
    def nrows(self) -> int:
        return self.a.shape[0]

    @property
    def ncols(self) -> int:
        return self.a.shape[1]

    def __getitem__(self, ij):
        v = self.a[ij]
        if isinstance(v, np.ndarray):
            raise TypeError("use submatrix() for slices")
        return int(v) if self.ring.kind == "fp" else v

    def column(self, j: int) -> "Matrix":
        return Matrix(self.ring, self.a[:, j : j + 1].copy(), _canon=False)

    def submatrix(self, rows=None, cols=None) -> "Matrix":
        a = self.a
        if rows is not None:
            a = a[np.asarray(rows, dtype=np.intp), :] if len(rows) else a[:0, :]
        if cols is not None:
            a = a[:, np.asarray(cols, dtype=np.intp)] if len(cols) else a[:, :0]
        return Matrix(self.ring, a.copy(), _canon=False)

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ring, self.a.T.copy(), _canon=False)

    # -- algebra -----------------------------------------------------------

    def _check_ring(self, other: "Matrix"):
        if self.ring != other.ring:
            raise RingError(f"ring mismatch: {self.ring} vs {other.ring}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_ring(other)
        return Matrix(self.ring, self.a + other.a, _canon=False)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_ring(other)
        return Matrix(self.ring, self.a - other.a, _canon=False)

    def __neg__(self) -> "Matrix":
        return Matrix(self.ring, -self.a, _canon=False)

    def scale(self, c) -> "Matrix":
        c = self.ring.canon(c)
        return Matrix(self.ring, self.a * c, _canon=False)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check_ring(other)
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        r = self.ring
        if r.kind == "fp":
            n = self.ncols
            if n * (r.p - 1) ** 2 < _FP_MATMUL_GUARD:
                return Matrix(r, (self.a @ other.a) % r.p, _canon=False)
            prod = np.dot(self.a.astype(object), other.a.astype(object))
            return Matrix(r, prod)
        if self.ncols == 0:
            return Matrix.zeros(r, self.nrows, other.ncols)
        fast = _int64_product(self.a, other.a)
        if fast is not None:
            return Matrix(r, fast, _canon=False)
        return Matrix(r, np.dot(self.a, other.a), _canon=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.shape == other.shape
            and bool(np.all(self.a == other.a))
        )

    def __hash__(self):  # pragma: no cover
        raise TypeError("Matrix is unhashable")

    def is_zero(self) -> bool:
        return self.a.size == 0 or not np.any(self.a != 0)

    def nnz(self) -> int:
        return int(np.count_nonzero(self.a != 0))

    # -- assembly ----------------------------------------------------------

    @staticmethod
    def hstack(mats) -> "Matrix":
        mats = list(mats)
        if not mats:
            raise ValueError("hstack of nothing")
        ring = mats[0].ring
        for m in mats:
            if m.ring != ring:
                raise RingError("ring mismatch in hstack")
        return Matrix(ring, np.hstack([m.a for m in mats]), _canon=False)

    @staticmethod
    def vstack(mats) -> "Matrix":
        mats = list(mats)
        if not mats:
            raise ValueError("vstack of nothing")
        ring = mats[0].ring
        return Matrix(ring, np.vstack([m.a for m in mats]), _canon=False)

    # -- io ------------------------------------------------------------------

    def to_rows(self):
        r = self.ring
        if r.kind == "fp":
            return [[int(x) for x in row] for row in self.a]
        return [list(row) for row in self.a]

    def to_json(self):
        r = self.ring
        return [[r.scalar_to_json(r.canon(x)) for x in row] for row in self.a]

    @classmethod
    def from_json(cls, ring: Ring, rows, nrows: int, ncols: int) -> "Matrix":
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise ValueError(f"expected {nrows}x{ncols} matrix")
        return cls.from_rows(ring, [[ring.scalar_from_json(v) for v in r] for r in rows], ncols)

    def __repr__(self) -> str:
        return f"Matrix({self.ring.tag}, {self.nrows}x{self.ncols})"


def _mutable(a: np.ndarray) -> np.ndarray:
    b = a.copy()
    b.flags.writeable = True
    return b


def _int64_product(a: np.ndarray, b: np.ndarray):
    """Vectorized exact product of object matrices with small int entries.

    Returns None when entries are non-integers or the no-overflow bound
    ncols * maxA * maxB >= 2^62 fails; callers then fall back to object dot.
    """
    try:
        ai = np.array(a.tolist(), dtype=np.int64).reshape(a.shape)
        bi = np.array(b.tolist(), dtype=np.int64).reshape(b.shape)
    except (TypeError, ValueError, OverflowError):
        return None
    # conversion must be faithful (mpq / stray non-int entries bail out)
    if not (np.array_equal(ai.astype(object), a) and np.array_equal(bi.astype(object), b)):
        return None
    ma = int(np.max(np.abs(ai))) if ai.size else 0
    mb = int(np.max(np.abs(bi))) if bi.size else 0
    if a.shape[1] * ma * mb >= _FP_MATMUL_GUARD:
        return None
    return (ai @ bi).astype(object)


class MatrixBuilder:
    """Mutable accumulator for block-assembled matrices."""

    def __init__(self, ring: Ring, m: int, n: int):
        self.ring = ring
        if ring.kind == "fp":
            self.a = np.zeros((m, n), dtype=np.int64)
        else:
            self.a = np.empty((m, n), dtype=object)
            self.a[:] = 0

    def add_block(self, i: int, j: int, mat: Matrix, sign: int = 1):
        m, n = mat.shape
        if m == 0 or n == 0:
            return
        if sign == 1:
            self.a[i : i + m, j : j + n] += mat.a
        else:
            self.a[i : i + m, j : j + n] -= mat.a

    def add_scaled_identity(self, i: int, j: int, size: int, coeff: int):
        for k in range(size):
            self.a[i + k, j + k] += coeff

    def build(self) -> Matrix:
        if self.ring.kind == "fp":
            return Matrix(self.ring, self.a % self.ring.p, _canon=False)
        return Matrix(self.ring, self.a, _canon=False)
