"""Listing whole hom-sets of corelations or relations for finite engines."""

from __future__ import annotations

import itertools
import math

from .core import Corelation, Cospan, Engine, Relation, Span, gamma, rho
from .finset import FinSetEngine, PartialFnEngine
from .linear import LinearEngine, corelation_of_subspace, relation_of_subspace, subspaces

#: Upper limit on candidate diagrams examined by one enumeration.
MAX_CANDIDATES = 250_000


class OversizeError(ValueError):
    """The requested hom-set would take too many candidates to enumerate."""


def candidate_count(engine: Engine, n: int, m: int, kind: str) -> int:
    """How many diagrams :func:`enumerate_homs` would examine."""
    if kind not in ("corel", "rel"):
        raise ValueError(f"kind must be 'corel' or 'rel', not {kind!r}")
    if isinstance(engine, (FinSetEngine, PartialFnEngine)):
        if kind == "corel":
            k = n + m
            targets = k + 1 if isinstance(engine, PartialFnEngine) else k
            return targets**k
        cells = engine.product(n, m)
        return math.comb(2 * cells, cells)
    if isinstance(engine, LinearEngine) and engine.finite:
        d, p = n + m, engine.field.p
        return sum(p ** (d * k) for k in range(d + 1))
    raise OversizeError(f"hom-sets of {engine.name} are infinite")


def _finite_corelations(engine: Engine, n: int, m: int) -> set[Corelation]:
    # every partition of n + m is cut out by some map into n + m points
    k = n + m
    return {gamma(Cospan(engine, *engine.split_copair(f, n))) for f in engine.morphisms(k, k)}


def _finite_relations(engine: Engine, n: int, m: int) -> set[Relation]:
    # spans up to apex iso are multisets of points of the product
    cells = engine.product(n, m)
    out = set()
    for z in range(cells + 1):
        for combo in itertools.combinations_with_replacement(range(cells), z):
            h = engine.morphism_type(z, cells, combo)
            out.add(rho(Span(engine, *engine.unpair(h, n, m))))
    return out


def enumerate_homs(engine: Engine, n: int, m: int, kind: str, limit: int = MAX_CANDIDATES) -> list:
    """All corelations (``kind="corel"``) or relations (``"rel"``) ``n -> m``, each once."""
    work = candidate_count(engine, n, m, kind)
    if work > limit:
        raise OversizeError(f"{kind} {n}->{m} over {engine.name} needs {work} candidates (limit {limit})")
    if isinstance(engine, LinearEngine):
        make = corelation_of_subspace if kind == "corel" else relation_of_subspace
        return [make(engine, V) for V in subspaces(engine, n, m)]
    found = _finite_corelations(engine, n, m) if kind == "corel" else _finite_relations(engine, n, m)
    return list(found)
