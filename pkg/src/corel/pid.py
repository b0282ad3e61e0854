"""The prop fmod(Z) of free finitely generated abelian groups.

Morphisms ``n -> m`` are integer ``m x n`` matrices.  The factorisation
system is (epi, split mono), where the epis of fmod(Z) are the matrices of
full row rank over Q (right-cancellable among free modules) rather than the
surjective ones: ``[2]: 1 -> 1`` is epi but not surjective, and factors as
``[2] ; id``.

Normal forms:

* Smith form ``U M V = S`` with unimodular ``U``, ``V`` and a divisibility
  chain on the diagonal of ``S``;
* row Hermite form, the unique representative of a left GL(Z) orbit
  (positive pivots, entries above a pivot reduced into ``[0, pivot)``).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Corelation, Cospan, Engine, gamma
from .errors import DimensionError
from .linalg import ZZ, Matrix, block_diag, hstack, vstack


@dataclass(frozen=True)
class SnfDecomposition:
    U: Matrix
    S: Matrix
    V: Matrix
    U_inv: Matrix
    V_inv: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.S[i, i] for i in range(min(self.S.rows, self.S.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def _ident(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


class _Smith:
    """Mutable Smith-form elimination tracking both transforms and their inverses."""

    def __init__(self, M: Matrix) -> None:
        self.r, self.c = M.rows, M.cols
        self.S = [list(row) for row in M.data]
        self.U, self.Ui = _ident(self.r), _ident(self.r)
        self.V, self.Vi = _ident(self.c), _ident(self.c)

    # row_i += k * row_j  (S <- E S, U <- E U, Ui <- Ui E^-1)
    def add_row(self, i: int, j: int, k: int) -> None:
        if k == 0:
            return
        for A in (self.S, self.U):
            A[i] = [a + k * b for a, b in zip(A[i], A[j])]
        for row in self.Ui:
            row[j] -= k * row[i]

    def swap_rows(self, i: int, j: int) -> None:
        if i == j:
            return
        for A in (self.S, self.U):
            A[i], A[j] = A[j], A[i]
        for row in self.Ui:
            row[i], row[j] = row[j], row[i]

    def negate_row(self, i: int) -> None:
        for A in (self.S, self.U):
            A[i] = [-a for a in A[i]]
        for row in self.Ui:
            row[i] = -row[i]

    # col_j += k * col_i  (S <- S F, V <- V F, Vi <- F^-1 Vi)
    def add_col(self, j: int, i: int, k: int) -> None:
        if k == 0:
            return
        for A in (self.S, self.V):
            for row in A:
                row[j] += k * row[i]
        self.Vi[i] = [a - k * b for a, b in zip(self.Vi[i], self.Vi[j])]

    def swap_cols(self, i: int, j: int) -> None:
        if i == j:
            return
        for A in (self.S, self.V):
            for row in A:
                row[i], row[j] = row[j], row[i]
        self.Vi[i], self.Vi[j] = self.Vi[j], self.Vi[i]

    def run(self) -> None:
        S = self.S
        for t in range(min(self.r, self.c)):
            while True:
                cells = [(abs(S[i][j]), i, j) for i in range(t, self.r) for j in range(t, self.c) if S[i][j]]
                if not cells:
                    return
                _, i, j = min(cells)
                self.swap_rows(t, i)
                self.swap_cols(t, j)
                p = S[t][t]
                dirty = False
                for i in range(t + 1, self.r):
                    q = S[i][t] // p
                    self.add_row(i, t, -q)
                    dirty |= S[i][t] != 0
                for j in range(t + 1, self.c):
                    q = S[t][j] // p
                    self.add_col(j, t, -q)
                    dirty |= S[t][j] != 0
                if dirty:
                    continue
                bad = next(
                    (i for i in range(t + 1, self.r) for j in range(t + 1, self.c) if S[i][j] % p),
                    None,
                )
                if bad is None:
                    break
                self.add_row(t, bad, 1)
            if S[t][t] < 0:
                self.negate_row(t)

    def result(self) -> SnfDecomposition:
        def mk(A, r, c):
            return Matrix(ZZ, r, c, tuple(tuple(row) for row in A))

        return SnfDecomposition(
            U=mk(self.U, self.r, self.r),
            S=mk(self.S, self.r, self.c),
            V=mk(self.V, self.c, self.c),
            U_inv=mk(self.Ui, self.r, self.r),
            V_inv=mk(self.Vi, self.c, self.c),
        )


def snf(M: Matrix) -> SnfDecomposition:
    """Smith normal form ``U @ M @ V == S`` (inverses of ``U`` and ``V`` included)."""
    job = _Smith(M)
    job.run()
    return job.result()


def hnf_row(M: Matrix) -> Matrix:
    """Row Hermite normal form; zero rows (if any) are kept at the bottom."""
    A = [list(r) for r in M.data]
    rows, cols = M.rows, M.cols
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [(abs(A[i][c]), i) for i in range(r, rows) if A[i][c]]
            if not nz:
                break
            _, k = min(nz)
            A[r], A[k] = A[k], A[r]
            done = True
            for i in range(r + 1, rows):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [a - q * b for a, b in zip(A[i], A[r])]
                    done = done and A[i][c] == 0
            if done:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-a for a in A[r]]
        p = A[r][c]
        for i in range(r):
            q = A[i][c] // p
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[r])]
        r += 1
    return Matrix(ZZ, rows, cols, tuple(tuple(row) for row in A))


def hnf_col(M: Matrix) -> Matrix:
    """Column Hermite form: the canonical form under right GL(Z) (zero columns last)."""
    return hnf_row(M.T).T


def rank_z(M: Matrix) -> int:
    return sum(1 for row in hnf_row(M).data if any(row))


def is_epi_z(M: Matrix) -> bool:
    """Full row rank over Q."""
    return rank_z(M) == M.rows


def is_split_mono_z(M: Matrix) -> bool:
    """Has an integer left inverse: full column rank and every invariant factor 1."""
    d = snf(M)
    return d.rank == M.cols and all(x == 1 for x in d.diagonal if x)


def factor_z(f: Matrix) -> tuple[Matrix, Matrix]:
    """``f = m @ e`` with ``e`` epi and ``m`` split mono, read off the Smith form.

    With ``U f V = S`` of rank ``r``: ``m`` is the first ``r`` columns of
    ``U^-1`` and ``e = D_r @ (first r rows of V^-1)``.
    """
    d = snf(f)
    r = d.rank
    m = d.U_inv.col_slice(0, r)
    e = Matrix.diag(ZZ, d.diagonal[:r]) @ d.V_inv.row_slice(0, r)
    return e, m


def kernel_z(M: Matrix) -> Matrix:
    """A basis of the integer kernel lattice as columns, in column Hermite form."""
    d = snf(M)
    K = d.V.col_slice(d.rank)
    if K.cols == 0:
        return K
    return hnf_col(K)


def cokernel_z(M: Matrix) -> Matrix:
    """Full-row-rank rows spanning the integer left kernel of ``M``, in row Hermite form."""
    return kernel_z(M.T).T


def pullback_z(f: Matrix, g: Matrix) -> tuple[Matrix, Matrix]:
    """Kernel of ``[f | -g]``; submodules of free Z-modules are free, so this is a pullback."""
    if f.rows != g.rows:
        raise DimensionError(f"pullback of a cospan with apexes {f.rows} and {g.rows}")
    K = kernel_z(hstack(f, -g))
    return K.row_slice(0, f.cols), K.row_slice(f.cols)


def pushout_z(p: Matrix, q: Matrix) -> tuple[Matrix, Matrix]:
    """The transpose of the pullback of the transposes (fmod(Z) is self-dual)."""
    if p.cols != q.cols:
        raise DimensionError(f"pushout of a span with apexes {p.cols} and {q.cols}")
    a, b = pullback_z(p.T, q.T)
    return a.T, b.T


def right_inverse_z(C: Matrix) -> Matrix:
    """``X`` with ``C @ X == I`` for a surjective integer matrix."""
    d = snf(C)
    if d.rank != C.rows or any(x != 1 for x in d.diagonal):
        raise ValueError("matrix is not surjective over Z")
    return d.V.col_slice(0, C.rows) @ d.U


def left_inverse_z(K: Matrix) -> Matrix:
    """``X`` with ``X @ K == I`` for a split mono."""
    return right_inverse_z(K.T).T


def corel_canonical_z(c: Cospan) -> Matrix:
    """Row Hermite form of the epi part of the copairing."""
    k = gamma(c)
    return hstack(k.left, k.right)


def random_unimodular(rng, n: int, steps: int = 6) -> Matrix:
    A = _ident(n)
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        k = rng.choice([-2, -1, 1, 2])
        A[i] = [a + k * b for a, b in zip(A[i], A[j])]
    order = list(range(n))
    rng.shuffle(order)
    signs = [rng.choice([1, -1]) for _ in range(n)]
    return Matrix(ZZ, n, n, tuple(tuple(signs[i] * x for x in A[order[i]]) for i in range(n)))


@dataclass(frozen=True)
class ZEngine(Engine):
    """fmod(Z) with (epi, split mono); ``A`` defaults to the split monos."""

    a_class: str = "M"
    system: str = "epi-mono"

    @property
    def name(self) -> str:
        return "z"

    def dom(self, f):
        return f.cols

    def cod(self, f):
        return f.rows

    def identity(self, n):
        return Matrix.identity(ZZ, n)

    def compose(self, f, g):
        if f.rows != g.cols:
            raise DimensionError(f"cannot compose {f.cols}->{f.rows} with {g.cols}->{g.rows}")
        return g @ f

    def tensor(self, f, g):
        return block_diag(f, g)

    def epi(self, f):
        return is_epi_z(f)

    def mono(self, f):
        return is_split_mono_z(f)

    def is_iso(self, f):
        return f.rows == f.cols and is_split_mono_z(f)

    def image_factor(self, f):
        return factor_z(f)

    def pullback(self, f, g):
        return pullback_z(f, g)

    def pushout(self, p, q):
        return pushout_z(p, q)

    def pushout_mediator(self, u, v, f, g):
        C, B = hstack(u, v), hstack(f, g)
        h = B @ right_inverse_z(C)
        if h @ C != B:
            raise ValueError("not a cocone over the pushout")
        return h

    def pullback_mediator(self, u, v, p, q):
        K, B = vstack(u, v), vstack(p, q)
        h = left_inverse_z(K) @ B
        if K @ h != B:
            raise ValueError("not a cone over the pullback")
        return h

    def copair(self, f, g):
        return hstack(f, g)

    def split_copair(self, h, n):
        return h.col_slice(0, n), h.col_slice(n)

    def product(self, n, m):
        return n + m

    def pair(self, f, g):
        return vstack(f, g)

    def unpair(self, h, n, m):
        if h.rows != n + m:
            raise DimensionError(f"map into {h.rows} is not into {n}+{m}")
        return h.row_slice(0, n), h.row_slice(n)

    def canonical_cospan(self, f, g):
        H = hnf_row(hstack(f, g))
        return H.col_slice(0, f.cols), H.col_slice(f.cols)

    def canonical_span(self, p, q):
        H = hnf_col(vstack(p, q))
        return H.row_slice(0, p.rows), H.row_slice(p.rows)

    def sample(self, rng, n, m):
        return Matrix.of(ZZ, [[rng.randint(-2, 2) for _ in range(n)] for _ in range(m)], cols=n)

    def sample_in_A(self, rng, n, m, tries=200):
        if self.a_class == "M" and self.system == "epi-mono":
            if n > m:
                return None
            return random_unimodular(rng, m).col_slice(0, n)
        return super().sample_in_A(rng, n, m, tries)


def scalar_corel(r, ring: str = "Z") -> bool:
    """Whether the cospan ``1 -r-> 1 <-r- 1`` is the identity corelation.

    Over Z this holds exactly for the units; over Q for every nonzero ``r``.
    """
    if ring == "Z":
        engine: Engine = ZEngine()
        s = Matrix.of(ZZ, [[r]])
    elif ring == "Q":
        from .linear import LinearEngine

        engine = LinearEngine()
        s = Matrix.of(engine.field, [[r]])
    else:
        raise ValueError(f"ring must be 'Z' or 'Q', got {ring!r}")
    return gamma(Cospan(engine, s, s)) == Corelation.identity(engine, 1)
