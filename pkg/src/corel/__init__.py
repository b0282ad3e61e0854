"""Exact spans, cospans, relations and corelations over concrete props."""

from .core import (
    Corelation,
    Cospan,
    Direction,
    Engine,
    Relation,
    Span,
    Zigzag,
    compose,
    compose_corel,
    compose_cospan,
    compose_rel,
    compose_span,
    dagger,
    gamma,
    pi,
    rho,
    tensor_diagram,
    zigzag_eval,
)
from .errors import CorelError, DimensionError, KindError, PreconditionError

__version__ = "0.1.0"
