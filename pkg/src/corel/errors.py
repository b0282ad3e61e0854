"""Exception types shared by every engine."""


class CorelError(Exception):
    """Base class for library errors."""


class DimensionError(CorelError, ValueError):
    """Boundaries of two diagrams or morphisms do not match."""


class PreconditionError(CorelError, ValueError):
    """An operation was applied outside the subcategory it is defined on."""


class KindError(CorelError, TypeError):
    """Two diagrams of different kinds (or engines) were combined."""
