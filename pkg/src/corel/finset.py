"""Finite functions, partial functions, and their (co)relations.

``F`` is the prop of total functions ``ord(n) -> ord(m)`` and ``PF`` the
prop of partial functions.  Corelations of ``F`` are partitions of
``ord(n) + ord(m)``; corelations of ``PF`` are partial equivalence
relations.  Partial functions are handled as maps of pointed sets: the
undefined value behaves like a shared base point, which is what makes
pushouts and pullbacks in ``PF`` exist.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .core import Cospan, Engine, Span, gamma, rho
from .errors import DimensionError

# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinFn:
    """A total function ``ord(dom) -> ord(cod)`` given by its table."""

    dom: int
    cod: int
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.table) != self.dom:
            raise DimensionError(f"table of length {len(self.table)} for domain {self.dom}")
        t = self.table
        if t and (None in t or min(t) < 0 or max(t) >= self.cod):
            bad = next(x for x in t if x is None or not 0 <= x < self.cod)
            raise ValueError(f"entry {bad!r} outside codomain {self.cod}")

    @classmethod
    def of(cls, table: Sequence[int], cod: int) -> "FinFn":
        return cls(len(table), cod, tuple(table))

    def __call__(self, i: int) -> int:
        return self.table[i]


@dataclass(frozen=True)
class PartialFn:
    """A partial function; ``None`` marks an undefined entry."""

    dom: int
    cod: int
    table: tuple[Optional[int], ...]

    def __post_init__(self) -> None:
        if len(self.table) != self.dom:
            raise DimensionError(f"table of length {len(self.table)} for domain {self.dom}")
        defined = [x for x in self.table if x is not None]
        if defined and (min(defined) < 0 or max(defined) >= self.cod):
            bad = next(x for x in defined if not 0 <= x < self.cod)
            raise ValueError(f"entry {bad!r} outside codomain {self.cod}")

    @classmethod
    def of(cls, table: Sequence[Optional[int]], cod: int) -> "PartialFn":
        return cls(len(table), cod, tuple(table))

    @property
    def is_total(self) -> bool:
        return None not in self.table


def ff_classify(f: FinFn | PartialFn) -> dict[str, bool]:
    """Injectivity and surjectivity flags, by counting the image."""
    image = {x for x in f.table if x is not None}
    total = None not in f.table
    return {
        "injective": total and len(image) == f.dom,
        "surjective": len(image) == f.cod,
    }


def _image_factor(f, cls):
    image = sorted({x for x in f.table if x is not None})
    rank = {x: k for k, x in enumerate(image)}
    e = cls(f.dom, len(image), tuple(None if x is None else rank[x] for x in f.table))
    m = cls(len(image), f.cod, tuple(image))
    return e, m


def factor_epi_mono(f: FinFn) -> tuple[FinFn, FinFn]:
    """Surjection onto the image followed by the increasing inclusion of it."""
    return _image_factor(f, FinFn)


def pf_factor(f: PartialFn) -> tuple[PartialFn, PartialFn]:
    """Partial surjection onto the image, then a (total) injection."""
    return _image_factor(f, PartialFn)


def tensor_shift(f, g):
    """Disjoint union ``f + g`` with ``g`` shifted past ``f``."""
    if type(f) is not type(g):
        raise TypeError("cannot tensor a total with a partial function")
    shifted = tuple(None if x is None else x + f.cod for x in g.table)
    return type(f)(f.dom + g.dom, f.cod + g.cod, f.table + shifted)


# ---------------------------------------------------------------------------
# union-find
# ---------------------------------------------------------------------------


def _find(parent: list[int], x: int) -> int:
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        parent[x], x = root, parent[x]
    return root


def _union(parent: list[int], x: int, y: int) -> None:
    rx, ry = _find(parent, x), _find(parent, y)
    if rx != ry:
        # the smaller index stays the root, so roots are least representatives
        if rx < ry:
            parent[ry] = rx
        else:
            parent[rx] = ry


def _number_blocks(parent: list[int], size: int, dead: int | None = None) -> list[Optional[int]]:
    """Block id per element ``< size``, numbered in order of least member.

    Elements in the same block as ``dead`` get ``None``.
    """
    dead_root = _find(parent, dead) if dead is not None else None
    ids: dict[int, int] = {}
    out: list[Optional[int]] = []
    for x in range(size):
        r = _find(parent, x)
        if r == dead_root:
            out.append(None)
            continue
        if r not in ids:
            ids[r] = len(ids)
        out.append(ids[r])
    return out


# ---------------------------------------------------------------------------
# limits and colimits
# ---------------------------------------------------------------------------


def pullback_finset(f: FinFn, g: FinFn) -> tuple[FinFn, FinFn]:
    """Fibre product of ``f: n -> z <- m :g``.

    The apex enumerates the pairs ``(i, j)`` with ``f(i) == g(j)`` in
    lexicographic order; the legs are the two projections.
    """
    if f.cod != g.cod:
        raise DimensionError(f"pullback of a cospan with apexes {f.cod} and {g.cod}")
    pairs = [(i, j) for i, a in enumerate(f.table) for j, b in enumerate(g.table) if a == b]
    k = len(pairs)
    return (
        FinFn(k, f.dom, tuple(i for i, _ in pairs)),
        FinFn(k, g.dom, tuple(j for _, j in pairs)),
    )


def pushout_finset(p: FinFn, q: FinFn) -> tuple[FinFn, FinFn]:
    """Pushout of ``p: z -> n, q: z -> m`` by union-find on ``n + m``.

    Blocks are numbered by their least element.
    """
    if p.dom != q.dom:
        raise DimensionError(f"pushout of a span with apexes {p.dom} and {q.dom}")
    n, m = p.cod, q.cod
    parent = list(range(n + m))
    for a, b in zip(p.table, q.table):
        _union(parent, a, n + b)
    blocks = _number_blocks(parent, n + m)
    k = max(blocks, default=-1) + 1
    return FinFn(n, k, tuple(blocks[:n])), FinFn(m, k, tuple(blocks[n:]))


def _pointed(x: Optional[int], star: int) -> int:
    return star if x is None else x


def pullback_partial(f: PartialFn, g: PartialFn) -> tuple[PartialFn, PartialFn]:
    """Pullback in ``PF``, computed as a pullback of pointed sets.

    Pairs ``(a, b)`` of points or the base point with ``f(a) == g(b)``,
    except ``(*, *)``; lexicographic with the base point last.
    """
    if f.cod != g.cod:
        raise DimensionError(f"pullback of a cospan with apexes {f.cod} and {g.cod}")
    star = f.cod
    fa = [_pointed(x, star) for x in f.table] + [star]
    gb = [_pointed(x, star) for x in g.table] + [star]
    pairs = [
        (i, j)
        for i in range(f.dom + 1)
        for j in range(g.dom + 1)
        if fa[i] == gb[j] and not (i == f.dom and j == g.dom)
    ]
    k = len(pairs)
    return (
        PartialFn(k, f.dom, tuple(None if i == f.dom else i for i, _ in pairs)),
        PartialFn(k, g.dom, tuple(None if j == g.dom else j for _, j in pairs)),
    )


def pushout_partial(p: PartialFn, q: PartialFn) -> tuple[PartialFn, PartialFn]:
    """Pushout in ``PF``: union-find on ``n + m`` plus a shared base point."""
    if p.dom != q.dom:
        raise DimensionError(f"pushout of a span with apexes {p.dom} and {q.dom}")
    n, m = p.cod, q.cod
    star = n + m
    parent = list(range(n + m + 1))
    for a, b in zip(p.table, q.table):
        _union(parent, _pointed(a, star), star if b is None else n + b)
    blocks = _number_blocks(parent, n + m, dead=star)
    k = max((b for b in blocks if b is not None), default=-1) + 1
    return PartialFn(n, k, tuple(blocks[:n])), PartialFn(m, k, tuple(blocks[n:]))


# ---------------------------------------------------------------------------
# partitions and relation tables
# ---------------------------------------------------------------------------


def _first_occurrence(labels: Sequence[Optional[int]]) -> tuple[Optional[int], ...]:
    ids: dict[int, int] = {}
    out = []
    for x in labels:
        if x is None:
            out.append(None)
            continue
        if x not in ids:
            ids[x] = len(ids)
        out.append(ids[x])
    return tuple(out)


def _is_normal(blocks: Sequence[Optional[int]]) -> bool:
    nxt = 0
    for b in blocks:
        if b is None:
            continue
        if b > nxt or b < 0:
            return False
        if b == nxt:
            nxt += 1
    return True


@dataclass(frozen=True)
class Partition:
    """An equivalence relation on ``ord(n) + ord(m)``.

    ``blocks[i]`` is the block of element ``i`` (the first ``n`` elements
    are the left boundary ``x0..``, the rest the right boundary ``y0..``).
    Block ids are numbered by first occurrence, which makes the encoding
    unique.
    """

    n: int
    m: int
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != self.n + self.m:
            raise DimensionError(f"{len(self.blocks)} labels for boundary {self.n}+{self.m}")
        if None in self.blocks or not _is_normal(self.blocks):
            raise ValueError(f"block labels {self.blocks} are not in first-occurrence form")

    @classmethod
    def from_labels(cls, n: int, m: int, labels: Sequence[int]) -> "Partition":
        return cls(n, m, _first_occurrence(labels))

    @classmethod
    def from_blocks(cls, n: int, m: int, groups: Sequence[Sequence[str]]) -> "Partition":
        """Build from named points, e.g. ``[["x0", "y0"], ["x1"]]``."""
        labels: list[Optional[int]] = [None] * (n + m)
        for k, group in enumerate(groups):
            for point in group:
                side, idx = point[0], int(point[1:])
                labels[idx if side == "x" else n + idx] = k
        if None in labels:
            raise ValueError("every boundary point must be in some block")
        return cls.from_labels(n, m, labels)

    @property
    def num_blocks(self) -> int:
        return max(self.blocks, default=-1) + 1

    def groups(self) -> list[list[str]]:
        names = [f"x{i}" for i in range(self.n)] + [f"y{j}" for j in range(self.m)]
        out: list[list[str]] = [[] for _ in range(self.num_blocks)]
        for name, b in zip(names, self.blocks):
            out[b].append(name)
        return out


@dataclass(frozen=True)
class PartialPartition:
    """A partial equivalence relation on ``ord(n) + ord(m)``; ``None`` = outside the domain."""

    n: int
    m: int
    blocks: tuple[Optional[int], ...]

    def __post_init__(self) -> None:
        if len(self.blocks) != self.n + self.m:
            raise DimensionError(f"{len(self.blocks)} labels for boundary {self.n}+{self.m}")
        if not _is_normal(self.blocks):
            raise ValueError(f"block labels {self.blocks} are not in first-occurrence form")

    @classmethod
    def from_labels(cls, n: int, m: int, labels: Sequence[Optional[int]]) -> "PartialPartition":
        return cls(n, m, _first_occurrence(labels))

    @property
    def num_blocks(self) -> int:
        return max((b for b in self.blocks if b is not None), default=-1) + 1


@dataclass(frozen=True)
class RelationTable:
    """A binary relation ``ord(n) -> ord(m)`` as sorted, deduplicated pairs."""

    n: int
    m: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if list(self.pairs) != sorted(set(self.pairs)):
            raise ValueError("pairs must be sorted and distinct")
        for i, j in self.pairs:
            if not (0 <= i < self.n and 0 <= j < self.m):
                raise ValueError(f"pair {(i, j)} out of range")

    @classmethod
    def of(cls, n: int, m: int, pairs) -> "RelationTable":
        return cls(n, m, tuple(sorted(set(map(tuple, pairs)))))


def er_compose_direct(e1, e2):
    """Compose (partial) equivalence relations by gluing along the middle.

    ``e1`` lives on ``n + z`` and ``e2`` on ``z + m``.  Blocks are glued along
    the shared ``z`` points and the result restricted to ``n + m``.  For
    partial equivalence relations a point outside either domain drags every
    block it touches out of the domain.
    """
    if e1.m != e2.n:
        raise DimensionError(f"middle boundaries disagree: {e1.m} vs {e2.n}")
    partial = isinstance(e1, PartialPartition) or isinstance(e2, PartialPartition)
    n, z, m = e1.n, e1.m, e2.m
    size = n + z + m
    dead = size
    parent = list(range(size + 1))

    def glue(blocks: Sequence[Optional[int]], offset: int) -> None:
        first: dict[int, int] = {}
        for k, b in enumerate(blocks):
            x = offset + k
            if b is None:
                _union(parent, x, dead)
            elif b in first:
                _union(parent, first[b], x)
            else:
                first[b] = x

    glue(e1.blocks, 0)
    glue(e2.blocks, n)
    dead_root = _find(parent, dead)
    keep = list(range(n)) + list(range(n + z, size))
    labels = [None if _find(parent, x) == dead_root else _find(parent, x) for x in keep]
    cls = PartialPartition if partial else Partition
    return cls.from_labels(n, m, labels)


def partition_of(corel) -> Partition | PartialPartition:
    """Read off the partition encoded by a canonical finite-set corelation."""
    labels = corel.left.table + corel.right.table
    cls = PartialPartition if isinstance(corel.left, PartialFn) else Partition
    return cls(corel.dom, corel.cod, labels)


def corel_canonical(c: Cospan) -> Partition | PartialPartition:
    """The (partial) partition of ``n + m`` induced by a cospan of functions."""
    return partition_of(gamma(c))


def corelation_of_partition(engine: "FinSetEngine | PartialFnEngine", p):
    """The canonical corelation whose partition is ``p``."""
    from .core import Corelation

    cls = engine.morphism_type
    k = p.num_blocks
    return Corelation(engine, cls(p.n, k, tuple(p.blocks[: p.n])), cls(p.m, k, tuple(p.blocks[p.n :])))


def rel_canonical(s: Span) -> RelationTable:
    """The binary relation given by the image of a span's pairing."""
    r = rho(s)
    return RelationTable(s.dom, s.cod, tuple(zip(r.left.table, r.right.table)))


def set_partitions(size: int) -> Iterator[tuple[int, ...]]:
    """All restricted-growth strings of length ``size``."""

    def go(prefix: list[int], top: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == size:
            yield tuple(prefix)
            return
        for b in range(top + 2):
            prefix.append(b)
            yield from go(prefix, max(top, b))
            prefix.pop()

    yield from go([], -1)


def partial_set_partitions(size: int) -> Iterator[tuple[Optional[int], ...]]:
    """All first-occurrence labellings with some points left unassigned."""
    for mask in itertools.product((False, True), repeat=size):
        inside = [i for i in range(size) if mask[i]]
        for rgs in set_partitions(len(inside)):
            labels: list[Optional[int]] = [None] * size
            for i, b in zip(inside, rgs):
                labels[i] = b
            yield tuple(labels)


# ---------------------------------------------------------------------------
# engines
# ---------------------------------------------------------------------------


def _check_composable(f, g) -> None:
    if f.cod != g.dom:
        raise DimensionError(f"cannot compose {f.dom}->{f.cod} with {g.dom}->{g.cod}")


def _canonical_cospan_tables(f, g):
    """Relabel the apex by first occurrence in ``f.table + g.table``; unhit points go last."""
    z = f.cod
    # unhit apex points are indistinguishable, so they simply fill the ids after the hit ones
    labels = _first_occurrence(f.table + g.table)
    cls = type(f)
    return cls(f.dom, z, labels[: f.dom]), cls(g.dom, z, labels[f.dom :])


def _span_key(x: Optional[int]) -> tuple[bool, int]:
    return (x is None, 0 if x is None else x)


@dataclass(frozen=True)
class FinSetEngine(Engine):
    """The prop ``F`` with the (surjection, injection) factorisation system.

    ``A`` defaults to the injections.
    """

    a_class: str = "M"
    system: str = "epi-mono"

    finite = True
    morphism_type = FinFn

    @property
    def name(self) -> str:
        return "finset"

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def identity(self, n):
        return FinFn(n, n, tuple(range(n)))

    def compose(self, f, g):
        _check_composable(f, g)
        t = g.table
        return FinFn(f.dom, g.cod, tuple(t[x] for x in f.table))

    def tensor(self, f, g):
        return tensor_shift(f, g)

    def is_identity(self, f):
        return f.dom == f.cod and f.table == tuple(range(f.dom))

    def epi(self, f):
        return len(set(f.table)) == f.cod

    def mono(self, f):
        return len(set(f.table)) == f.dom

    def image_factor(self, f):
        return factor_epi_mono(f)

    def pullback(self, f, g):
        return pullback_finset(f, g)

    def pushout(self, p, q):
        return pushout_finset(p, q)

    def pushout_mediator(self, u, v, f, g):
        h: list[Optional[int]] = [None] * u.cod
        for leg, target in ((u, f), (v, g)):
            for i, k in enumerate(leg.table):
                val = target.table[i]
                if h[k] is not None and h[k] != val:
                    raise ValueError("not a cocone over the pushout")
                h[k] = val
        if None in h:
            raise ValueError("pushout legs are not jointly surjective")
        return FinFn(u.cod, f.cod, tuple(h))

    def pullback_mediator(self, u, v, p, q):
        index = {pair: t for t, pair in enumerate(zip(u.table, v.table))}
        try:
            return FinFn(p.dom, u.dom, tuple(index[pair] for pair in zip(p.table, q.table)))
        except KeyError:
            raise ValueError("not a cone over the pullback") from None

    def copair(self, f, g):
        if f.cod != g.cod:
            raise DimensionError("copairing maps with different codomains")
        return FinFn(f.dom + g.dom, f.cod, f.table + g.table)

    def split_copair(self, h, n):
        return FinFn(n, h.cod, h.table[:n]), FinFn(h.dom - n, h.cod, h.table[n:])

    def product(self, n, m):
        return n * m

    def pair(self, f, g):
        if f.dom != g.dom:
            raise DimensionError("pairing maps with different domains")
        return FinFn(f.dom, f.cod * g.cod, tuple(a * g.cod + b for a, b in zip(f.table, g.table)))

    def unpair(self, h, n, m):
        if h.cod != n * m:
            raise DimensionError(f"map into {h.cod} is not into the product {n}x{m}")
        split = [divmod(x, m) for x in h.table]
        return FinFn(h.dom, n, tuple(a for a, _ in split)), FinFn(h.dom, m, tuple(b for _, b in split))

    def canonical_cospan(self, f, g):
        return _canonical_cospan_tables(f, g)

    def canonical_span(self, p, q):
        pairs = sorted(zip(p.table, q.table))
        return (
            FinFn(p.dom, p.cod, tuple(a for a, _ in pairs)),
            FinFn(q.dom, q.cod, tuple(b for _, b in pairs)),
        )

    def morphisms(self, n, m):
        for t in itertools.product(range(m), repeat=n):
            yield FinFn(n, m, t)

    def sample(self, rng, n, m):
        if m == 0 and n > 0:
            raise ValueError(f"no functions {n} -> 0")
        return FinFn(n, m, tuple(rng.randrange(m) for _ in range(n)))


@dataclass(frozen=True)
class PartialFnEngine(Engine):
    """The prop ``PF`` with (partial surjection, injection); ``A`` = injections."""

    a_class: str = "M"
    system: str = "epi-mono"

    finite = True
    morphism_type = PartialFn

    @property
    def name(self) -> str:
        return "pf"

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def identity(self, n):
        return PartialFn(n, n, tuple(range(n)))

    def compose(self, f, g):
        _check_composable(f, g)
        t = g.table
        return PartialFn(f.dom, g.cod, tuple(None if x is None else t[x] for x in f.table))

    def tensor(self, f, g):
        return tensor_shift(f, g)

    def is_identity(self, f):
        return f.dom == f.cod and f.table == tuple(range(f.dom))

    def epi(self, f):
        return ff_classify(f)["surjective"]

    def mono(self, f):
        return ff_classify(f)["injective"]

    def image_factor(self, f):
        return pf_factor(f)

    def pullback(self, f, g):
        return pullback_partial(f, g)

    def pushout(self, p, q):
        return pushout_partial(p, q)

    def pushout_mediator(self, u, v, f, g):
        h: list = [_UNSET] * u.cod
        for leg, target in ((u, f), (v, g)):
            for i, k in enumerate(leg.table):
                val = target.table[i]
                if k is None:
                    if val is not None:
                        raise ValueError("not a cocone over the pushout")
                    continue
                if h[k] is not _UNSET and h[k] != val:
                    raise ValueError("not a cocone over the pushout")
                h[k] = val
        if _UNSET in h:
            raise ValueError("pushout legs are not jointly surjective")
        return PartialFn(u.cod, f.cod, tuple(h))

    def pullback_mediator(self, u, v, p, q):
        index = {pair: t for t, pair in enumerate(zip(u.table, v.table))}
        out = []
        for pair in zip(p.table, q.table):
            if pair == (None, None):
                out.append(None)
            elif pair in index:
                out.append(index[pair])
            else:
                raise ValueError("not a cone over the pullback")
        return PartialFn(p.dom, u.dom, tuple(out))

    def copair(self, f, g):
        if f.cod != g.cod:
            raise DimensionError("copairing maps with different codomains")
        return PartialFn(f.dom + g.dom, f.cod, f.table + g.table)

    def split_copair(self, h, n):
        return PartialFn(n, h.cod, h.table[:n]), PartialFn(h.dom - n, h.cod, h.table[n:])

    # the product of pointed sets n_* x m_*, minus the base point (*, *)
    def product(self, n, m):
        return (n + 1) * (m + 1) - 1

    def pair(self, f, g):
        if f.dom != g.dom:
            raise DimensionError("pairing maps with different domains")
        n, m = f.cod, g.cod
        out = []
        for a, b in zip(f.table, g.table):
            if a is None and b is None:
                out.append(None)
            else:
                out.append(_pointed(a, n) * (m + 1) + _pointed(b, m))
        return PartialFn(f.dom, self.product(n, m), tuple(out))

    def unpair(self, h, n, m):
        if h.cod != self.product(n, m):
            raise DimensionError(f"map into {h.cod} is not into the product {n}x{m}")
        left, right = [], []
        for x in h.table:
            if x is None:
                left.append(None)
                right.append(None)
                continue
            a, b = divmod(x, m + 1)
            left.append(None if a == n else a)
            right.append(None if b == m else b)
        return PartialFn(h.dom, n, tuple(left)), PartialFn(h.dom, m, tuple(right))

    def canonical_cospan(self, f, g):
        return _canonical_cospan_tables(f, g)

    def canonical_span(self, p, q):
        pairs = sorted(zip(p.table, q.table), key=lambda ab: (_span_key(ab[0]), _span_key(ab[1])))
        return (
            PartialFn(p.dom, p.cod, tuple(a for a, _ in pairs)),
            PartialFn(q.dom, q.cod, tuple(b for _, b in pairs)),
        )

    def morphisms(self, n, m):
        for t in itertools.product([None, *range(m)], repeat=n):
            yield PartialFn(n, m, t)

    def sample(self, rng, n, m):
        return PartialFn(n, m, tuple(rng.choice([None, *range(m)]) for _ in range(n)))


_UNSET = object()
