"""The abelian prop Vect(k) for k = Q or GF(p).

Pullbacks are kernels of ``[f | -g]`` and pushouts are cokernels of the
stacked map ``[p ; -q]``.  Every isomorphism class of (co)spans has a
reduced-echelon normal form, so equality is structural.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .core import Corelation, Cospan, Engine, Relation, Span, gamma, rho
from .errors import DimensionError, KindError
from .linalg import (
    QQ,
    Matrix,
    PrimeField,
    Rationals,
    cokernel,
    column_echelon,
    hstack,
    block_diag,
    kernel,
    rank,
    rref,
    row_space,
    solve,
    vstack,
)


def field_from_tag(tag: str):
    """``"Q"`` or ``"F<p>"`` / ``"Fp:<p>"`` to a field object."""
    if tag in ("Q", "QQ"):
        return QQ
    for prefix in ("Fp:", "F"):
        if tag.startswith(prefix) and tag[len(prefix) :].isdigit():
            return PrimeField(int(tag[len(prefix) :]))
    raise ValueError(f"unknown field {tag!r}")


def factor_epi_mono_lin(f: Matrix) -> tuple[Matrix, Matrix]:
    """Factor ``f = m @ e`` through its column space.

    ``m`` has as columns the RREF basis of the column space; ``e`` holds the
    coordinates of ``f`` in that basis, which are just the rows of ``f`` at
    the pivot positions.
    """
    R, r, pivots = rref(f.T)
    m = R.row_slice(0, r).T
    e = f.take_rows(pivots)
    return e, m


def pullback_lin(f: Matrix, g: Matrix) -> tuple[Matrix, Matrix]:
    """Span ``n <- k -> m`` from the kernel of ``[f | -g]``."""
    if f.rows != g.rows:
        raise DimensionError(f"pullback of a cospan with apexes {f.rows} and {g.rows}")
    K = kernel(hstack(f, -g))
    return K.row_slice(0, f.cols), K.row_slice(f.cols)


def pushout_lin(p: Matrix, q: Matrix) -> tuple[Matrix, Matrix]:
    """Cospan ``n -> k <- m`` from the cokernel of ``[p ; -q]``."""
    if p.cols != q.cols:
        raise DimensionError(f"pushout of a span with apexes {p.cols} and {q.cols}")
    C = cokernel(vstack(p, -q))
    return C.col_slice(0, p.rows), C.col_slice(p.rows)


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``k^dom x k^cod``, stored as an RREF basis without zero rows."""

    dom: int
    cod: int
    basis: Matrix

    def __post_init__(self) -> None:
        if self.basis.cols != self.ambient:
            raise DimensionError(f"basis has {self.basis.cols} columns, ambient is {self.ambient}")
        if row_space(self.basis) != self.basis:
            raise ValueError("basis is not in reduced row echelon form")

    @property
    def ambient(self) -> int:
        return self.dom + self.cod

    @property
    def dim(self) -> int:
        return self.basis.rows

    @classmethod
    def spanned_by(cls, dom: int, cod: int, vectors: Matrix) -> "Subspace":
        """The span of the rows of ``vectors``."""
        return cls(dom, cod, row_space(vectors))


def subspace_of_span(s: Span) -> Subspace:
    """Column space of the pairing ``[left ; right]`` inside ``k^(n+m)``."""
    return Subspace.spanned_by(s.dom, s.cod, vstack(s.left, s.right).T)


def subspace_of_relation(r: Relation) -> Subspace:
    return subspace_of_span(r.span)


def relation_of_subspace(engine: "LinearEngine", V: Subspace) -> Relation:
    B = V.basis.T
    return rho(Span(engine, B.row_slice(0, V.dom), B.row_slice(V.dom)))


def compose_subspace_direct(V: Subspace, W: Subspace) -> Subspace:
    """``{(v, w) | exists u. (v, u) in V and (u, w) in W}`` by elimination.

    With bases ``V = rows (A | B)`` and ``W = rows (C | D)``, a combination
    ``alpha`` of V-rows and ``beta`` of W-rows agree on the middle exactly
    when ``alpha B = beta C``; those solutions form a kernel and each gives
    the vector ``(alpha A, beta D)``.
    """
    if V.cod != W.dom:
        raise DimensionError(f"middle dimensions disagree: {V.cod} vs {W.dom}")
    ring = V.basis.ring
    n, z, m = V.dom, V.cod, W.cod
    A, B = V.basis.col_slice(0, n), V.basis.col_slice(n)
    C, D = W.basis.col_slice(0, z), W.basis.col_slice(z)
    K = kernel(hstack(B.T, -C.T))
    if K.cols == 0:
        return Subspace(n, m, Matrix(ring, 0, n + m, ()))
    alpha, beta = K.row_slice(0, V.dim), K.row_slice(V.dim)
    vectors = hstack(alpha.T @ A, beta.T @ D)
    return Subspace.spanned_by(n, m, vectors)


def corel_canonical_lin(c: Cospan) -> Matrix:
    """RREF of the copairing of the jointly-epi part: one row per apex dimension."""
    k = gamma(c)
    return hstack(k.left, k.right)


def abelian_iso(x: Corelation | Relation) -> Relation | Corelation:
    """Move between corelations and relations of an abelian prop.

    A corelation ``n -> z <- m`` goes to the jointly-mono part of its
    pullback, i.e. the subspace ``{(a, b) : f a = g b}``; a relation goes to
    the jointly-epi part of its pushout.  The two maps are mutually inverse.
    """
    e = getattr(x, "engine", None)
    if isinstance(x, Corelation):
        return rho(Span(e, *e.pullback(x.left, x.right)))
    if isinstance(x, Relation):
        return gamma(Cospan(e, *e.pushout(x.left, x.right)))
    raise KindError(f"abelian_iso expects a corelation or a relation, got {type(x).__name__}")


def graph(engine: "LinearEngine", f: Matrix) -> Relation:
    """The relation ``{(v, f v)}``."""
    return rho(Span(engine, engine.identity(f.cols), f))


def scalar(engine: Engine, r) -> Matrix:
    """The ``1 x 1`` matrix ``[r]`` as a morphism ``1 -> 1``."""
    return Matrix.of(engine.field, [[r]])


@dataclass(frozen=True)
class LinearEngine(Engine):
    """Vect(k) with its (epi, mono) factorisation; ``A`` defaults to everything."""

    field: object = QQ
    a_class: str = "C"
    system: str = "epi-mono"

    @property
    def name(self) -> str:
        return "linq" if isinstance(self.field, Rationals) else f"linfp:{self.field.p}"

    @property
    def finite(self) -> bool:  # type: ignore[override]
        return isinstance(self.field, PrimeField)

    def dom(self, f):
        return f.cols

    def cod(self, f):
        return f.rows

    def identity(self, n):
        return Matrix.identity(self.field, n)

    def compose(self, f, g):
        if f.rows != g.cols:
            raise DimensionError(f"cannot compose {f.cols}->{f.rows} with {g.cols}->{g.rows}")
        return g @ f

    def tensor(self, f, g):
        return block_diag(f, g)

    def epi(self, f):
        return rank(f) == f.rows

    def mono(self, f):
        return rank(f) == f.cols

    def image_factor(self, f):
        return factor_epi_mono_lin(f)

    def pullback(self, f, g):
        return pullback_lin(f, g)

    def pushout(self, p, q):
        return pushout_lin(p, q)

    def pushout_mediator(self, u, v, f, g):
        # h @ [u | v] = [f | g]
        return solve(hstack(u, v).T, hstack(f, g).T).T

    def pullback_mediator(self, u, v, p, q):
        # [u ; v] @ h = [p ; q]
        return solve(vstack(u, v), vstack(p, q))

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
        R = rref(hstack(f, g))[0]
        return R.col_slice(0, f.cols), R.col_slice(f.cols)

    def canonical_span(self, p, q):
        K = column_echelon(vstack(p, q))
        return K.row_slice(0, p.rows), K.row_slice(p.rows)

    def morphisms(self, n, m):
        if not self.finite:
            raise NotImplementedError("hom-sets over Q are infinite")
        elems = list(self.field.elements())
        for flat in itertools.product(elems, repeat=n * m):
            yield Matrix(self.field, m, n, tuple(tuple(flat[i * n : (i + 1) * n]) for i in range(m)))

    def sample(self, rng, n, m):
        if self.finite:
            vals = list(self.field.elements())
        else:
            vals = [-2, -1, 0, 0, 1, 1, 2, 3]
        return Matrix.of(self.field, [[rng.choice(vals) for _ in range(n)] for _ in range(m)], cols=n)


def subspaces(engine: LinearEngine, dom: int, cod: int) -> list[Subspace]:
    """Every subspace of ``k^(dom+cod)`` over a finite field, each exactly once."""
    d = dom + cod
    seen: dict[Matrix, Subspace] = {}
    for k in range(d + 1):
        for M in engine.morphisms(d, k):
            V = Subspace.spanned_by(dom, cod, M)
            if V.dim == k:
                seen.setdefault(V.basis, V)
    return list(seen.values())


def corelation_of_subspace(engine: LinearEngine, V: Subspace) -> Corelation:
    """The corelation whose equations are the rows of ``V``'s basis: ``M1 a + M2 b = 0``.

    Useful for enumeration: every corelation ``n -> m`` arises this way from
    exactly one subspace (its row space).
    """
    B = V.basis
    return gamma(Cospan(engine, B.col_slice(0, V.dom), B.col_slice(V.dom)))
