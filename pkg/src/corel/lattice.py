"""Finite lattices (and finite coproducts of them) viewed as thin categories.

With the factorisation system (identities, everything) the corelation
between ``a`` and ``b`` is the cospan through ``a v b``, so every hom-set of
corelations has at most one element.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence


@dataclass(frozen=True)
class FiniteLattice:
    """A finite poset that is a disjoint union of lattices.

    ``leq[a][b]`` is true iff ``a <= b``.  Joins and meets are taken within
    a connected component and are ``None`` across components.  Validation
    happens at construction.
    """

    size: int
    leq: tuple[tuple[bool, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        n, L = self.size, self.leq
        if len(L) != n or any(len(r) != n for r in L):
            raise ValueError("leq must be a size x size matrix")
        if self.names and len(self.names) != n:
            raise ValueError("one name per element")
        for a in range(n):
            if not L[a][a]:
                raise ValueError(f"leq is not reflexive at {a}")
            for b in range(n):
                if a != b and L[a][b] and L[b][a]:
                    raise ValueError(f"leq is not antisymmetric at {a}, {b}")
                for c in range(n):
                    if L[a][b] and L[b][c] and not L[a][c]:
                        raise ValueError(f"leq is not transitive at {a}, {b}, {c}")
        comp = self.components()
        for a in range(n):
            for b in range(n):
                if comp[a] != comp[b]:
                    continue
                if self._bound(a, b, upper=True) is None or self._bound(a, b, upper=False) is None:
                    raise ValueError(f"{a} and {b} lack a join or a meet")

    # -- construction ----------------------------------------------------
    @classmethod
    def from_covers(cls, size: int, covers: Sequence[Sequence[int]], names: Sequence[str] = ()) -> "FiniteLattice":
        """Reflexive-transitive closure of the given ``a < b`` pairs."""
        L = [[i == j for j in range(size)] for i in range(size)]
        for a, b in covers:
            L[a][b] = True
        for k in range(size):
            for i in range(size):
                if L[i][k]:
                    for j in range(size):
                        if L[k][j]:
                            L[i][j] = True
        return cls(size, tuple(tuple(r) for r in L), tuple(names))

    @classmethod
    def chain(cls, n: int) -> "FiniteLattice":
        return cls.from_covers(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def diamond(cls) -> "FiniteLattice":
        """Bottom, two incomparable atoms, top."""
        return cls.from_covers(4, [(0, 1), (0, 2), (1, 3), (2, 3)], ("bot", "a", "b", "top"))

    def coproduct(self, other: "FiniteLattice") -> "FiniteLattice":
        n = self.size + other.size
        L = [[False] * n for _ in range(n)]
        for i in range(self.size):
            for j in range(self.size):
                L[i][j] = self.leq[i][j]
        for i in range(other.size):
            for j in range(other.size):
                L[self.size + i][self.size + j] = other.leq[i][j]
        names: tuple[str, ...] = ()
        if self.names or other.names:
            left = self.names or tuple(str(i) for i in range(self.size))
            right = other.names or tuple(str(i) for i in range(other.size))
            names = tuple(f"0.{x}" for x in left) + tuple(f"1.{x}" for x in right)
        return FiniteLattice(n, tuple(tuple(r) for r in L), names)

    # -- structure -------------------------------------------------------
    def components(self) -> list[int]:
        """Component id per element (connected components of comparability)."""
        comp = list(range(self.size))

        def find(x: int) -> int:
            while comp[x] != x:
                comp[x] = comp[comp[x]]
                x = comp[x]
            return x

        for a in range(self.size):
            for b in range(self.size):
                if self.leq[a][b]:
                    ra, rb = find(a), find(b)
                    if ra != rb:
                        comp[max(ra, rb)] = min(ra, rb)
        return [find(x) for x in range(self.size)]

    def _bound(self, a: int, b: int, upper: bool) -> Optional[int]:
        L = self.leq
        if upper:
            cands = [c for c in range(self.size) if L[a][c] and L[b][c]]
            best = [c for c in cands if all(L[c][d] for d in cands)]
        else:
            cands = [c for c in range(self.size) if L[c][a] and L[c][b]]
            best = [c for c in cands if all(L[d][c] for d in cands)]
        return best[0] if best else None

    def join(self, a: int, b: int) -> Optional[int]:
        return self._bound(a, b, upper=True)

    def meet(self, a: int, b: int) -> Optional[int]:
        return self._bound(a, b, upper=False)

    def upper_set(self, a: Optional[int]) -> list[int]:
        if a is None:
            return []
        return [c for c in range(self.size) if self.leq[a][c]]

    def lower_set(self, a: Optional[int]) -> list[int]:
        if a is None:
            return []
        return [c for c in range(self.size) if self.leq[c][a]]

    # -- (co)spans and corelations ---------------------------------------
    def cospan_hom(self, a: int, b: int) -> list[int]:
        """Apexes ``c`` of the cospans ``a <= c >= b`` (each apex is one cospan)."""
        return [c for c in range(self.size) if self.leq[a][c] and self.leq[b][c]]

    def span_hom(self, a: int, b: int) -> list[int]:
        return [d for d in range(self.size) if self.leq[d][a] and self.leq[d][b]]

    def gamma(self, a: int, c: int, b: int) -> tuple[int, int, int]:
        """Corelation of ``a <= c >= b``: factor the copairing ``a v b -> c`` as (iso, anything)."""
        j = self.join(a, b)
        if j is None or not self.leq[j][c]:
            raise ValueError(f"{a} <= {c} >= {b} is not a cospan")
        return (a, j, b)

    def pi(self, a: int, d: int, b: int) -> tuple[int, int, int]:
        """Corelation of the pushout of ``a >= d <= b``."""
        if not (self.leq[d][a] and self.leq[d][b]):
            raise ValueError(f"{a} >= {d} <= {b} is not a span")
        j = self.join(a, b)
        return self.gamma(a, j, b)

    def corel_hom(self, a: int, b: int) -> set[tuple[int, int, int]]:
        return {self.gamma(a, c, b) for c in self.cospan_hom(a, b)}


def builtin_lattice(name: str) -> FiniteLattice:
    if name in ("chain2", "2-chain"):
        return FiniteLattice.chain(2)
    if name == "diamond":
        return FiniteLattice.diamond()
    if name in ("two-points", "1+1"):
        return FiniteLattice.chain(1).coproduct(FiniteLattice.chain(1))
    if name in ("chain2+diamond", "sum"):
        return FiniteLattice.chain(2).coproduct(FiniteLattice.diamond())
    raise ValueError(f"unknown lattice {name!r}")


BUILTIN_LATTICES = ("chain2", "diamond", "two-points", "chain2+diamond")
