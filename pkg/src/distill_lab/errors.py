"""Exception types shared across the package."""


class DistillLabError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(DistillLabError, ValueError):
    """Composite dimension metadata is inconsistent with the requested operation."""


class DimensionLimitError(DistillLabError, ValueError):
    """An operation would exceed the configured per-side dimension cap."""


class SymmetryError(DistillLabError, ValueError):
    """A matrix required to be Hermitian deviates beyond tolerance."""

