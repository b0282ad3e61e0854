"""Exact matrices over Q, GF(p) and Z.

A morphism ``n -> m`` is an ``m x n`` matrix (column vectors), so
composition "first f, then g" is the product ``g @ f``.  Nothing here ever
touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import DimensionError


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class Rationals:
    """The field Q, with :class:`fractions.Fraction` entries."""

    tag = "Q"
    is_field = True

    def coerce(self, x) -> Fraction:
        return Fraction(x)

    def norm(self, x):
        return x

    def inv(self, x) -> Fraction:
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return 1 / Fraction(x)

    def fmt(self, x) -> str:
        return str(x)

    def elements(self):
        raise NotImplementedError("Q is infinite")


@lru_cache(maxsize=4096)
def _inverse_mod(x: int, p: int) -> int:
    return pow(x, -1, p)


@dataclass(frozen=True)
class PrimeField:
    """GF(p) with residues ``0 <= x < p``."""

    p: int
    is_field = True

    def __post_init__(self) -> None:
        if not _is_prime(self.p):
            raise ValueError(f"GF(p) needs a prime, got {self.p}")

    @property
    def tag(self) -> str:
        return f"F{self.p}"

    def coerce(self, x) -> int:
        if isinstance(x, Fraction):
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def norm(self, x):
        return x % self.p

    def inv(self, x) -> int:
        if x % self.p == 0:
            raise ZeroDivisionError("0 has no inverse")
        return _inverse_mod(x % self.p, self.p)

    def fmt(self, x) -> str:
        return str(x)

    def elements(self):
        return range(self.p)


@dataclass(frozen=True)
class Integers:
    """The ring Z (not a field; only :mod:`corel.pid` divides with remainder)."""

    tag = "Z"
    is_field = False

    def coerce(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return x.numerator
        if isinstance(x, float) or int(x) != x:
            raise ValueError(f"{x!r} is not an integer")
        return int(x)

    def norm(self, x):
        return x

    def inv(self, x) -> int:
        if x not in (1, -1):
            raise ZeroDivisionError(f"{x} is not a unit of Z")
        return x

    def fmt(self, x) -> str:
        return str(x)


QQ = Rationals()
ZZ = Integers()


@dataclass(frozen=True)
class Matrix:
    """An immutable ``rows x cols`` matrix over ``ring``."""

    ring: object
    rows: int
    cols: int
    data: tuple[tuple, ...]

    def __post_init__(self) -> None:
        if len(self.data) != self.rows or (self.rows and {len(r) for r in self.data} != {self.cols}):
            raise DimensionError(f"data does not have shape {self.rows}x{self.cols}")

    # -- construction ----------------------------------------------------
    @classmethod
    def of(cls, ring, data: Sequence[Sequence], cols: int | None = None) -> "Matrix":
        rows = len(data)
        if cols is None:
            if rows == 0:
                raise DimensionError("cols must be given for a matrix with no rows")
            cols = len(data[0])
        c = ring.coerce
        return cls(ring, rows, cols, tuple(tuple(c(x) for x in r) for r in data))

    @classmethod
    def zeros(cls, ring, rows: int, cols: int) -> "Matrix":
        z = ring.coerce(0)
        return cls(ring, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, ring, n: int) -> "Matrix":
        one, zero = ring.coerce(1), ring.coerce(0)
        return cls(ring, n, n, tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, ring, entries: Sequence, rows: int | None = None, cols: int | None = None) -> "Matrix":
        k = len(entries)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        zero = ring.coerce(0)
        return cls(
            ring,
            rows,
            cols,
            tuple(
                tuple(ring.coerce(entries[i]) if i == j and i < k else zero for j in range(cols))
                for i in range(rows)
            ),
        )

    # -- structure -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def tolist(self) -> list[list]:
        return [list(r) for r in self.data]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ring, self.cols, self.rows, tuple(zip(*self.data)) if self.rows else tuple(() for _ in range(self.cols)))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        norm = self.ring.norm
        zero = self.ring.coerce(0)
        ocols = list(zip(*other.data)) if other.rows else [()] * other.cols
        data = tuple(
            tuple(norm(sum((a * b for a, b in zip(r, c)), zero)) for c in ocols) for r in self.data
        )
        return Matrix(self.ring, self.rows, other.cols, data)

    def __neg__(self) -> "Matrix":
        norm = self.ring.norm
        return Matrix(self.ring, self.rows, self.cols, tuple(tuple(norm(-x) for x in r) for r in self.data))

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch in addition")
        norm = self.ring.norm
        return Matrix(
            self.ring,
            self.rows,
            self.cols,
            tuple(tuple(norm(a + b) for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
        )

    def scale(self, k) -> "Matrix":
        k = self.ring.coerce(k)
        norm = self.ring.norm
        return Matrix(self.ring, self.rows, self.cols, tuple(tuple(norm(k * x) for x in r) for r in self.data))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.data for x in r)

    def row_slice(self, start: int, stop: int | None = None) -> "Matrix":
        rows = self.data[start:stop]
        return Matrix(self.ring, len(rows), self.cols, rows)

    def col_slice(self, start: int, stop: int | None = None) -> "Matrix":
        idx = range(self.cols)[start:stop]
        return Matrix(self.ring, self.rows, len(idx), tuple(tuple(r[j] for j in idx) for r in self.data))

    def take_rows(self, idx: Iterable[int]) -> "Matrix":
        rows = tuple(self.data[i] for i in idx)
        return Matrix(self.ring, len(rows), self.cols, rows)

    def nonzero_rows(self) -> "Matrix":
        rows = tuple(r for r in self.data if any(x != 0 for x in r))
        return Matrix(self.ring, len(rows), self.cols, rows)

    def __repr__(self) -> str:
        body = "; ".join(" ".join(self.ring.fmt(x) for x in r) for r in self.data)
        return f"Matrix[{self.ring.tag}]({self.rows}x{self.cols}: [{body}])"


def hstack(a: Matrix, b: Matrix) -> Matrix:
    if a.rows != b.rows:
        raise DimensionError(f"hstack of {a.rows}-row and {b.rows}-row matrices")
    return Matrix(a.ring, a.rows, a.cols + b.cols, tuple(r + s for r, s in zip(a.data, b.data)))


def vstack(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.cols:
        raise DimensionError(f"vstack of {a.cols}-col and {b.cols}-col matrices")
    return Matrix(a.ring, a.rows + b.rows, a.cols, a.data + b.data)


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    z = a.ring.coerce(0)
    top = tuple(r + (z,) * b.cols for r in a.data)
    bottom = tuple((z,) * a.cols + r for r in b.data)
    return Matrix(a.ring, a.rows + b.rows, a.cols + b.cols, top + bottom)


# ---------------------------------------------------------------------------
# elimination over a field
# ---------------------------------------------------------------------------


def rref(M: Matrix) -> tuple[Matrix, int, tuple[int, ...]]:
    """Reduced row echelon form, rank and pivot columns.

    Zero rows stay at the bottom, so ``R`` has the same shape as ``M``.
    """
    ring = M.ring
    if not ring.is_field:
        raise TypeError(f"rref needs a field, got {ring.tag}")
    norm, inv = ring.norm, ring.inv
    A = [list(r) for r in M.data]
    pivots: list[int] = []
    r = 0
    for c in range(M.cols):
        if r == M.rows:
            break
        k = next((i for i in range(r, M.rows) if A[i][c] != 0), None)
        if k is None:
            continue
        A[r], A[k] = A[k], A[r]
        s = inv(A[r][c])
        A[r] = [norm(x * s) for x in A[r]]
        for i in range(M.rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [norm(x - f * y) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return Matrix(ring, M.rows, M.cols, tuple(tuple(row) for row in A)), r, tuple(pivots)


def rank(M: Matrix) -> int:
    return rref(M)[1]


def row_space(M: Matrix) -> Matrix:
    """Canonical basis of the row space: the nonzero rows of the RREF."""
    R, r, _ = rref(M)
    return R.row_slice(0, r)


def column_echelon(M: Matrix) -> Matrix:
    """Canonical form of ``M`` under invertible column operations (zero columns last)."""
    return rref(M.T)[0].T


def kernel(M: Matrix) -> Matrix:
    """Columns spanning ``{v : M v = 0}``, canonicalised so the transpose is in RREF."""
    ring = M.ring
    R, r, pivots = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    zero, one = ring.coerce(0), ring.coerce(1)
    basis = []
    for f in free:
        v = [zero] * M.cols
        v[f] = one
        for i, pc in enumerate(pivots):
            v[pc] = ring.norm(-R[i, f])
        basis.append(v)
    if not basis:
        return Matrix(ring, M.cols, 0, tuple(() for _ in range(M.cols)))
    return row_space(Matrix.of(ring, basis)).T


def cokernel(M: Matrix) -> Matrix:
    """Full-row-rank matrix whose rows span the annihilator of the column space."""
    return kernel(M.T).T


def solve(A: Matrix, B: Matrix) -> Matrix:
    """A particular ``X`` with ``A X = B``; raises ``ValueError`` if there is none."""
    if A.rows != B.rows:
        raise DimensionError("solve: row counts differ")
    R, _, pivots = rref(hstack(A, B))
    zero = A.ring.coerce(0)
    for row in R.data:
        lead = next((j for j, x in enumerate(row) if x != 0), None)
        if lead is not None and lead >= A.cols:
            raise ValueError("inconsistent linear system")
    X = [[zero] * B.cols for _ in range(A.cols)]
    for i, pc in enumerate(pivots):
        if pc < A.cols:
            X[pc] = list(R.data[i][A.cols :])
    return Matrix(A.ring, A.cols, B.cols, tuple(tuple(r) for r in X))
