"""Engine-generic spans, cospans, relations and corelations.

An :class:`Engine` is a prop: objects are natural numbers, the monoidal
product on objects is addition.  Every engine carries a factorisation system
``(E, M)`` and a distinguished subcategory ``A`` of "legal span legs".  The
functions in this module only talk to an engine through its abstract
interface, so the same ``gamma``/``pi``/``rho`` code runs on finite sets,
vector spaces and free abelian groups.

Composition is written diagrammatically throughout: ``engine.compose(f, g)``
is "first ``f``, then ``g``".
"""

from __future__ import annotations

import enum
from abc import ABC, abstractmethod
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Any, Iterable, Iterator

from .errors import DimensionError, KindError, PreconditionError

Morphism = Any

#: Names accepted for the subcategory ``A``.
A_CLASSES = ("M", "E", "C", "iso")


class Engine(ABC):
    """A concrete prop with a factorisation system and a chosen ``A``.

    Subclasses are frozen dataclasses with (at least) the fields
    ``a_class`` (one of :data:`A_CLASSES`) and ``system``
    (``"epi-mono"`` for the native system, ``"morphism-iso"`` for the
    degenerate ``(C, isomorphisms)`` system).
    """

    a_class: str
    system: str

    #: True when every hom-set is finite and :meth:`morphisms` enumerates it.
    finite: bool = False

    # -- identification -------------------------------------------------
    @property
    @abstractmethod
    def name(self) -> str:
        """Short engine tag used in reports and on the command line."""

    @property
    def label(self) -> str:
        extra = "" if self.system == "epi-mono" else f",{self.system}"
        return f"{self.name}[A={self.a_class}{extra}]"

    def with_subcategory(self, a_class: str) -> "Engine":
        if a_class not in A_CLASSES:
            raise ValueError(f"unknown subcategory {a_class!r}")
        return replace(self, a_class=a_class)

    def with_system(self, system: str) -> "Engine":
        if system not in ("epi-mono", "morphism-iso"):
            raise ValueError(f"unknown factorisation system {system!r}")
        return replace(self, system=system)

    # -- the category ---------------------------------------------------
    @abstractmethod
    def dom(self, f: Morphism) -> int: ...

    @abstractmethod
    def cod(self, f: Morphism) -> int: ...

    @abstractmethod
    def identity(self, n: int) -> Morphism: ...

    @abstractmethod
    def compose(self, f: Morphism, g: Morphism) -> Morphism:
        """``f`` then ``g``; raises :class:`DimensionError` on mismatch."""

    @abstractmethod
    def tensor(self, f: Morphism, g: Morphism) -> Morphism: ...

    def equal(self, f: Morphism, g: Morphism) -> bool:
        return f == g

    def is_identity(self, f: Morphism) -> bool:
        return self.dom(f) == self.cod(f) and f == self.identity(self.dom(f))

    # -- native factorisation system ------------------------------------
    @abstractmethod
    def epi(self, f: Morphism) -> bool:
        """Membership in the native ``E`` class."""

    @abstractmethod
    def mono(self, f: Morphism) -> bool:
        """Membership in the native ``M`` class."""

    @abstractmethod
    def image_factor(self, f: Morphism) -> tuple[Morphism, Morphism]:
        """Native factorisation ``f = e ; m``."""

    def is_iso(self, f: Morphism) -> bool:
        return self.dom(f) == self.cod(f) and self.epi(f) and self.mono(f)

    # -- the factorisation system actually in use -----------------------
    def is_epi(self, f: Morphism) -> bool:
        if self.system == "morphism-iso":
            return True
        return self.epi(f)

    def is_mono(self, f: Morphism) -> bool:
        if self.system == "morphism-iso":
            return self.is_iso(f)
        return self.mono(f)

    def factor(self, f: Morphism) -> tuple[Morphism, Morphism]:
        if self.system == "morphism-iso":
            return f, self.identity(self.cod(f))
        return self.image_factor(f)

    def in_A(self, f: Morphism) -> bool:
        a = self.a_class
        if a == "C":
            return True
        if a == "M":
            return self.is_mono(f)
        if a == "E":
            return self.is_epi(f)
        return self.is_iso(f)

    # -- limits and colimits --------------------------------------------
    @abstractmethod
    def pullback(self, f: Morphism, g: Morphism) -> tuple[Morphism, Morphism]:
        """Pullback ``(p, q)`` of the cospan ``f: n -> z <- m :g``; ``p;f = q;g``."""

    @abstractmethod
    def pushout(self, p: Morphism, q: Morphism) -> tuple[Morphism, Morphism]:
        """Pushout ``(f, g)`` of the span ``p: z -> n, q: z -> m``; ``p;f = q;g``."""

    @abstractmethod
    def pushout_mediator(self, u: Morphism, v: Morphism, f: Morphism, g: Morphism) -> Morphism:
        """Unique ``h`` with ``u;h = f`` and ``v;h = g`` for a pushout cocone ``(u, v)``."""

    @abstractmethod
    def pullback_mediator(self, u: Morphism, v: Morphism, p: Morphism, q: Morphism) -> Morphism:
        """Unique ``h`` with ``h;u = p`` and ``h;v = q`` for a pullback cone ``(u, v)``."""

    # -- (co)products -----------------------------------------------------
    @abstractmethod
    def copair(self, f: Morphism, g: Morphism) -> Morphism:
        """``[f, g]: n + m -> z``."""

    @abstractmethod
    def split_copair(self, h: Morphism, n: int) -> tuple[Morphism, Morphism]:
        """Inverse of :meth:`copair`, splitting the domain after ``n``."""

    @abstractmethod
    def product(self, n: int, m: int) -> int: ...

    @abstractmethod
    def pair(self, f: Morphism, g: Morphism) -> Morphism:
        """``<f, g>: z -> n x m``."""

    @abstractmethod
    def unpair(self, h: Morphism, n: int, m: int) -> tuple[Morphism, Morphism]: ...

    # -- normal forms of isomorphism classes -----------------------------
    @abstractmethod
    def canonical_cospan(self, f: Morphism, g: Morphism) -> tuple[Morphism, Morphism]:
        """Unique representative of the apex-isomorphism class of ``(f, g)``."""

    @abstractmethod
    def canonical_span(self, p: Morphism, q: Morphism) -> tuple[Morphism, Morphism]: ...

    # -- instance generation for the harness -----------------------------
    def morphisms(self, n: int, m: int) -> Iterator[Morphism]:
        raise NotImplementedError(f"{self.name} hom-sets are not enumerable")

    @abstractmethod
    def sample(self, rng, n: int, m: int) -> Morphism:
        """A pseudo-random morphism ``n -> m`` drawn from ``rng``."""

    def sample_in_A(self, rng, n: int, m: int, tries: int = 200) -> Morphism | None:
        for _ in range(tries):
            f = self.sample(rng, n, m)
            if self.in_A(f):
                return f
        return None


def _same_engine(x, y) -> None:
    if type(x) is not type(y):
        raise KindError(f"cannot combine {type(x).__name__} with {type(y).__name__}")
    if x.engine != y.engine:
        raise KindError(f"engine mismatch: {x.engine.label} vs {y.engine.label}")


# ---------------------------------------------------------------------------
# diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Cospan:
    """``dom --left--> apex <--right-- cod``.  Equality is up to apex isomorphism."""

    engine: Engine
    left: Morphism
    right: Morphism

    def __post_init__(self) -> None:
        e = self.engine
        if e.cod(self.left) != e.cod(self.right):
            raise DimensionError(
                f"cospan legs disagree on apex: {e.cod(self.left)} vs {e.cod(self.right)}"
            )

    @property
    def dom(self) -> int:
        return self.engine.dom(self.left)

    @property
    def cod(self) -> int:
        return self.engine.dom(self.right)

    @property
    def apex(self) -> int:
        return self.engine.cod(self.left)

    @cached_property
    def canonical(self) -> "Cospan":
        f, g = self.engine.canonical_cospan(self.left, self.right)
        return Cospan(self.engine, f, g)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Cospan):
            return NotImplemented
        a, b = self.canonical, other.canonical
        return self.engine == other.engine and a.left == b.left and a.right == b.right

    def __hash__(self) -> int:
        c = self.canonical
        return hash(("cospan", c.left, c.right))

    @classmethod
    def identity(cls, engine: Engine, n: int) -> "Cospan":
        i = engine.identity(n)
        return cls(engine, i, i)


@dataclass(frozen=True, eq=False)
class Span:
    """``dom <--left-- apex --right--> cod``.  Equality is up to apex isomorphism."""

    engine: Engine
    left: Morphism
    right: Morphism

    def __post_init__(self) -> None:
        e = self.engine
        if e.dom(self.left) != e.dom(self.right):
            raise DimensionError(
                f"span legs disagree on apex: {e.dom(self.left)} vs {e.dom(self.right)}"
            )

    @property
    def dom(self) -> int:
        return self.engine.cod(self.left)

    @property
    def cod(self) -> int:
        return self.engine.cod(self.right)

    @property
    def apex(self) -> int:
        return self.engine.dom(self.left)

    @cached_property
    def canonical(self) -> "Span":
        p, q = self.engine.canonical_span(self.left, self.right)
        return Span(self.engine, p, q)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Span):
            return NotImplemented
        a, b = self.canonical, other.canonical
        return self.engine == other.engine and a.left == b.left and a.right == b.right

    def __hash__(self) -> int:
        s = self.canonical
        return hash(("span", s.left, s.right))

    @classmethod
    def identity(cls, engine: Engine, n: int) -> "Span":
        i = engine.identity(n)
        return cls(engine, i, i)


@dataclass(frozen=True)
class Corelation:
    """A corelation, stored as its canonical jointly-in-E cospan.

    Build these with :func:`gamma` (or :func:`pi`); the constructor does not
    normalise.
    """

    engine: Engine
    left: Morphism
    right: Morphism

    @property
    def dom(self) -> int:
        return self.engine.dom(self.left)

    @property
    def cod(self) -> int:
        return self.engine.dom(self.right)

    @property
    def apex(self) -> int:
        return self.engine.cod(self.left)

    @property
    def cospan(self) -> Cospan:
        return Cospan(self.engine, self.left, self.right)

    @classmethod
    def identity(cls, engine: Engine, n: int) -> "Corelation":
        return gamma(Cospan.identity(engine, n))


@dataclass(frozen=True)
class Relation:
    """A relation, stored as its canonical jointly-in-M span."""

    engine: Engine
    left: Morphism
    right: Morphism

    @property
    def dom(self) -> int:
        return self.engine.cod(self.left)

    @property
    def cod(self) -> int:
        return self.engine.cod(self.right)

    @property
    def apex(self) -> int:
        return self.engine.dom(self.left)

    @property
    def span(self) -> Span:
        return Span(self.engine, self.left, self.right)

    @classmethod
    def identity(cls, engine: Engine, n: int) -> "Relation":
        return rho(Span.identity(engine, n))


# ---------------------------------------------------------------------------
# composition and the quotient functors
# ---------------------------------------------------------------------------


def compose_cospan(c1: Cospan, c2: Cospan) -> Cospan:
    """Compose by pushing out the middle span; the result is canonical."""
    _same_engine(c1, c2)
    if c1.cod != c2.dom:
        raise DimensionError(f"cannot compose cospans {c1.dom}->{c1.cod} and {c2.dom}->{c2.cod}")
    e = c1.engine
    u, v = e.pushout(c1.right, c2.left)
    return Cospan(e, e.compose(c1.left, u), e.compose(c2.right, v)).canonical


def compose_span(s1: Span, s2: Span) -> Span:
    """Compose by pulling back the middle cospan; the result is canonical."""
    _same_engine(s1, s2)
    if s1.cod != s2.dom:
        raise DimensionError(f"cannot compose spans {s1.dom}->{s1.cod} and {s2.dom}->{s2.cod}")
    e = s1.engine
    p, q = e.pullback(s1.right, s2.left)
    return Span(e, e.compose(p, s1.left), e.compose(q, s2.right)).canonical


def gamma(c: Cospan) -> Corelation:
    """Quotient a cospan to its corelation.

    The copairing ``[f, g]`` is factored as ``e ; m`` and the cospan induced
    by ``e`` is returned in the engine's normal form.
    """
    e = c.engine
    epi, _ = e.factor(e.copair(c.left, c.right))
    f, g = e.split_copair(epi, c.dom)
    f, g = e.canonical_cospan(f, g)
    return Corelation(e, f, g)


def pi(s: Span) -> Corelation:
    """Push a span with legs in ``A`` out and project to its corelation."""
    e = s.engine
    for side, leg in (("left", s.left), ("right", s.right)):
        if not e.in_A(leg):
            raise PreconditionError(f"{side} leg is not in A={e.a_class} for {e.label}")
    u, v = e.pushout(s.left, s.right)
    return gamma(Cospan(e, u, v))


def rho(s: Span) -> Relation:
    """Quotient a span to its relation (the M part of the pairing)."""
    e = s.engine
    _, mono = e.factor(e.pair(s.left, s.right))
    p, q = e.unpair(mono, s.dom, s.cod)
    p, q = e.canonical_span(p, q)
    return Relation(e, p, q)


def compose_corel(a: Corelation, b: Corelation) -> Corelation:
    _same_engine(a, b)
    if a.cod != b.dom:
        raise DimensionError(f"cannot compose corelations {a.dom}->{a.cod} and {b.dom}->{b.cod}")
    return gamma(compose_cospan(a.cospan, b.cospan))


def compose_rel(a: Relation, b: Relation) -> Relation:
    _same_engine(a, b)
    if a.cod != b.dom:
        raise DimensionError(f"cannot compose relations {a.dom}->{a.cod} and {b.dom}->{b.cod}")
    return rho(compose_span(a.span, b.span))


def compose(x, y):
    """Sequential composite of two diagrams of the same kind."""
    _same_engine(x, y)
    if isinstance(x, Cospan):
        return compose_cospan(x, y)
    if isinstance(x, Span):
        return compose_span(x, y)
    if isinstance(x, Corelation):
        return compose_corel(x, y)
    if isinstance(x, Relation):
        return compose_rel(x, y)
    raise KindError(f"cannot compose {type(x).__name__}")


def tensor_diagram(x, y):
    """Monoidal product, applied leg-wise."""
    _same_engine(x, y)
    e = x.engine
    legs = (e.tensor(x.left, y.left), e.tensor(x.right, y.right))
    if isinstance(x, Cospan):
        return Cospan(e, *legs)
    if isinstance(x, Span):
        return Span(e, *legs)
    if isinstance(x, Corelation):
        return gamma(Cospan(e, *legs))
    if isinstance(x, Relation):
        return rho(Span(e, *legs))
    raise KindError(f"cannot tensor {type(x).__name__}")


def dagger(x):
    """Swap the two legs, reversing the direction of the diagram."""
    e = getattr(x, "engine", None)
    if isinstance(x, Cospan):
        return Cospan(e, x.right, x.left)
    if isinstance(x, Span):
        return Span(e, x.right, x.left)
    if isinstance(x, Corelation):
        return gamma(Cospan(e, x.right, x.left))
    if isinstance(x, Relation):
        return rho(Span(e, x.right, x.left))
    raise KindError(f"cannot take the dagger of {type(x).__name__}")


def embed_forward(engine: Engine, f: Morphism, kind: str):
    """``f`` as the cospan ``(f, id)`` or the span ``(id, f)``."""
    i = engine.identity(engine.cod(f)) if kind == "cospan" else engine.identity(engine.dom(f))
    return Cospan(engine, f, i) if kind == "cospan" else Span(engine, i, f)


def embed_backward(engine: Engine, g: Morphism, kind: str):
    """``g`` read backwards, as the cospan ``(id, g)`` or the span ``(g, id)``."""
    i = engine.identity(engine.cod(g)) if kind == "cospan" else engine.identity(engine.dom(g))
    return Cospan(engine, i, g) if kind == "cospan" else Span(engine, g, i)


# ---------------------------------------------------------------------------
# zigzags
# ---------------------------------------------------------------------------


class Direction(enum.Enum):
    FWD = "fwd"
    BWD = "bwd"


@dataclass(frozen=True)
class Zigzag:
    """An alternating word of forward and backward morphisms.

    Always stored normalised: adjacent steps point in opposite directions
    and no step is an identity.  Use :meth:`build` to construct one.
    """

    engine: Engine
    source: int
    target: int
    steps: tuple[tuple[Direction, Morphism], ...] = ()

    @classmethod
    def build(cls, engine: Engine, source: int, steps: Iterable[tuple[Direction | str, Morphism]]) -> "Zigzag":
        here = source
        stack: list[tuple[Direction, Morphism]] = []
        for d, f in steps:
            d = Direction(d)
            start, end = (engine.dom(f), engine.cod(f)) if d is Direction.FWD else (engine.cod(f), engine.dom(f))
            if start != here:
                raise DimensionError(f"zigzag step {d.value} starts at {start}, expected {here}")
            here = end
            if stack and stack[-1][0] is d:
                prev = stack.pop()[1]
                f = engine.compose(prev, f) if d is Direction.FWD else engine.compose(f, prev)
            if not engine.is_identity(f):
                stack.append((d, f))
        return cls(engine, source, here, tuple(stack))

    @classmethod
    def empty(cls, engine: Engine, n: int) -> "Zigzag":
        return cls(engine, n, n, ())

    def then(self, other: "Zigzag") -> "Zigzag":
        if self.engine != other.engine:
            raise KindError("zigzags over different engines")
        if self.target != other.source:
            raise DimensionError(f"cannot compose zigzags ending at {self.target} and starting at {other.source}")
        return Zigzag.build(self.engine, self.source, self.steps + other.steps)


def zigzag_eval(z: Zigzag, target: str = "cospan"):
    """Evaluate a zigzag of ``A``-morphisms as a span or a cospan."""
    if target not in ("span", "cospan"):
        raise ValueError(f"target must be 'span' or 'cospan', not {target!r}")
    e = z.engine
    for d, f in z.steps:
        if not e.in_A(f):
            raise PreconditionError(f"zigzag step {d.value} is not in A={e.a_class}")
    ident = Cospan.identity(e, z.source) if target == "cospan" else Span.identity(e, z.source)
    acc = ident
    for d, f in z.steps:
        piece = embed_forward(e, f, target) if d is Direction.FWD else embed_backward(e, f, target)
        acc = compose(acc, piece)
    return acc.canonical


def corelations_of(cospans: Iterable[Cospan]) -> set[Corelation]:
    return {gamma(c) for c in cospans}


def relations_of(spans: Iterable[Span]) -> set[Relation]:
    return {rho(s) for s in spans}


__all__ = [
    "A_CLASSES",
    "Corelation",
    "Cospan",
    "Direction",
    "Engine",
    "Relation",
    "Span",
    "Zigzag",
    "compose",
    "compose_corel",
    "compose_cospan",
    "compose_rel",
    "compose_span",
    "dagger",
    "embed_backward",
    "embed_forward",
    "gamma",
    "pi",
    "rho",
    "tensor_diagram",
    "zigzag_eval",
]
