"""JSON interchange for morphisms, diagrams, partitions and lattices.

Morphism encodings per engine:

* ``finset`` / ``pf``: ``{"dom": 2, "cod": 1, "table": [0, 0]}``; ``null``
  entries mark undefined points of a partial function.
* ``linq`` / ``linfp:<p>`` / ``z``: ``{"dom": 2, "cod": 1, "matrix": [["1", "1/2"]]}``.
  Entries are strings (exact rationals like ``"-2/3"``) or integers.  The
  matrix is ``cod x dom``; ``dom``/``cod`` are explicit so empty matrices
  round-trip.

Files carry the engine once at the top level: ``{"engine": "finset", ...}``,
or equivalently ``{"field": "Q"}``, ``{"field": "Fp", "p": 5}``, ``{"ring": "Z"}``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .core import Corelation, Cospan, Engine, Relation, Span
from .errors import DimensionError
from .finset import FinFn, FinSetEngine, PartialFn, PartialFnEngine, Partition, PartialPartition, partition_of
from .lattice import FiniteLattice
from .linalg import ZZ, Matrix, PrimeField, hstack, vstack
from .linear import LinearEngine, field_from_tag
from .pid import ZEngine


class FormatError(ValueError):
    """Malformed JSON input (maps to the parse-error exit code)."""


ENGINE_FLAGS = ("finset", "pf", "linq", "linfp:<p>", "z")


def engine_from_flag(flag: str, a_class: str | None = None) -> Engine:
    """``finset``, ``pf``, ``linq``, ``linfp:<p>`` or ``z``, optionally with ``A`` set."""
    if flag == "finset":
        e: Engine = FinSetEngine()
    elif flag == "pf":
        e = PartialFnEngine()
    elif flag == "linq":
        e = LinearEngine()
    elif flag.startswith("linfp:"):
        p = flag.split(":", 1)[1]
        if not p.isdigit():
            raise FormatError(f"bad prime in engine flag {flag!r}")
        try:
            e = LinearEngine(PrimeField(int(p)))
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    elif flag == "z":
        e = ZEngine()
    else:
        raise FormatError(f"unknown engine {flag!r}; expected one of {', '.join(ENGINE_FLAGS)}")
    if a_class is not None:
        e = e.with_subcategory("C" if a_class == "F" else a_class)
    return e


def engine_from_header(obj: dict) -> Engine | None:
    """Engine named by a top-level ``engine``/``field``/``ring`` key, if any."""
    if "engine" in obj:
        return engine_from_flag(str(obj["engine"]))
    if "ring" in obj:
        if obj["ring"] != "Z":
            raise FormatError(f"unknown ring {obj['ring']!r}")
        return ZEngine()
    if "field" in obj:
        f = obj["field"]
        if f == "Fp":
            if "p" not in obj:
                raise FormatError('field "Fp" needs "p"')
            return engine_from_flag(f"linfp:{obj['p']}")
        try:
            return LinearEngine(field_from_tag(str(f)))
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    return None


def engine_header(engine: Engine) -> dict:
    if isinstance(engine, LinearEngine):
        if isinstance(engine.field, PrimeField):
            return {"field": "Fp", "p": engine.field.p}
        return {"field": "Q"}
    if isinstance(engine, ZEngine):
        return {"ring": "Z"}
    return {"engine": engine.name}


# ---------------------------------------------------------------------------
# morphisms
# ---------------------------------------------------------------------------


def _entry(x) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


def encode_morphism(f) -> dict:
    if isinstance(f, (FinFn, PartialFn)):
        return {"dom": f.dom, "cod": f.cod, "table": list(f.table)}
    if isinstance(f, Matrix):
        return {"dom": f.cols, "cod": f.rows, "matrix": [[_entry(x) for x in r] for r in f.data]}
    raise TypeError(f"cannot encode {type(f).__name__}")


def _require(obj: Any, *keys: str) -> None:
    if not isinstance(obj, dict):
        raise FormatError(f"expected an object, got {type(obj).__name__}")
    missing = [k for k in keys if k not in obj]
    if missing:
        raise FormatError(f"missing key(s) {', '.join(missing)} in {json.dumps(obj, sort_keys=True)[:80]}")


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < 0:
        raise FormatError(f"{what} must be a natural number, got {x!r}")
    return x


def _scalar(ring, x: Any):
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise FormatError(f"matrix entries must be integers or strings, got {x!r}")
    try:
        return ring.coerce(Fraction(x))
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad matrix entry {x!r}: {exc}") from None


def decode_morphism(engine: Engine, obj: Any):
    _require(obj, "dom", "cod")
    dom, cod = _int(obj["dom"], "dom"), _int(obj["cod"], "cod")
    if isinstance(engine, (FinSetEngine, PartialFnEngine)):
        _require(obj, "table")
        table = obj["table"]
        if not isinstance(table, list):
            raise FormatError("table must be a list")
        allow_none = isinstance(engine, PartialFnEngine)
        for x in table:
            if x is None and allow_none:
                continue
            _int(x, "table entry")
        try:
            return engine.morphism_type(dom, cod, tuple(table))
        except (ValueError, TypeError) as exc:
            raise DimensionError(str(exc)) from None
    if isinstance(engine, (LinearEngine, ZEngine)):
        _require(obj, "matrix")
        rows = obj["matrix"]
        if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
            raise FormatError("matrix must be a list of rows")
        ring = engine.field if isinstance(engine, LinearEngine) else ZZ
        data = tuple(tuple(_scalar(ring, x) for x in r) for r in rows)
        if len(data) != cod or any(len(r) != dom for r in data):
            raise DimensionError(f"matrix is not {cod}x{dom}")
        return Matrix(ring, cod, dom, data)
    raise TypeError(f"no decoder for engine {engine.name}")


# ---------------------------------------------------------------------------
# diagrams and their normal forms
# ---------------------------------------------------------------------------


def encode_value(x) -> dict:
    """JSON form of a cospan, span, corelation or relation."""
    if isinstance(x, (Cospan, Span)):
        kind = "cospan" if isinstance(x, Cospan) else "span"
        return {"kind": kind, "dom": x.dom, "cod": x.cod, "left": encode_morphism(x.left), "right": encode_morphism(x.right)}
    e = x.engine
    if isinstance(x, Corelation):
        out: dict = {"kind": "corelation", "dom": x.dom, "cod": x.cod}
        if isinstance(e, (FinSetEngine, PartialFnEngine)):
            out["blocks"] = list(partition_of(x).blocks)
        else:
            # the canonical copairing [left | right], one row per apex dimension
            out["matrix"] = encode_morphism(hstack(x.left, x.right))["matrix"]
        return out
    if isinstance(x, Relation):
        out = {"kind": "relation", "dom": x.dom, "cod": x.cod}
        if isinstance(e, (FinSetEngine, PartialFnEngine)):
            out["pairs"] = [[a, b] for a, b in zip(x.left.table, x.right.table)]
        else:
            # columns of the pairing span the subspace; listed as row vectors
            out["basis"] = encode_morphism(vstack(x.left, x.right).T)["matrix"]
        return out
    return encode_morphism(x)


def encode_partition(p: Partition | PartialPartition) -> dict:
    return {"n": p.n, "m": p.m, "blocks": list(p.blocks)}


def decode_partition(obj: Any) -> Partition | PartialPartition:
    _require(obj, "n", "m", "blocks")
    blocks = obj["blocks"]
    if not isinstance(blocks, list):
        raise FormatError("blocks must be a list")
    cls = PartialPartition if any(b is None for b in blocks) else Partition
    try:
        return cls.from_labels(_int(obj["n"], "n"), _int(obj["m"], "m"), blocks)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------


def decode_lattice(obj: Any) -> FiniteLattice:
    """``{"size": n, "covers": [[a, b], ...]}`` or ``{"size": n, "leq": [[bool]]}``.

    ``{"sum": [L1, L2, ...]}`` builds a coproduct.
    """
    if isinstance(obj, dict) and "sum" in obj:
        parts = [decode_lattice(p) for p in obj["sum"]]
        if not parts:
            raise FormatError("empty lattice sum")
        out = parts[0]
        for p in parts[1:]:
            out = out.coproduct(p)
        return out
    _require(obj, "size")
    n = _int(obj["size"], "size")
    names = tuple(obj.get("names", ()))
    try:
        if "leq" in obj:
            return FiniteLattice(n, tuple(tuple(bool(x) for x in r) for r in obj["leq"]), names)
        covers = obj.get("covers", [])
        for c in covers:
            if not (isinstance(c, list) and len(c) == 2 and all(0 <= _int(x, "element") < n for x in c)):
                raise FormatError(f"bad cover {c!r}")
        return FiniteLattice.from_covers(n, covers, names)
    except FormatError:
        raise
    except ValueError as exc:
        raise FormatError(f"not a lattice: {exc}") from None


def encode_lattice(L: FiniteLattice) -> dict:
    out: dict = {"size": L.size, "leq": [[int(x) for x in r] for r in L.leq]}
    if L.names:
        out["names"] = list(L.names)
    return out


def dumps(obj: Any) -> str:
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
