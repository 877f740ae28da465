"""Error hierarchy shared by the library, the CLI and the explorer."""

from __future__ import annotations


class GeometryError(ValueError):
    category = "error"
    exit_code = 1


class InputParseError(GeometryError):
    category = "parse_error"
    exit_code = 2


class InvalidInputError(GeometryError):
    category = "validation_error"
    exit_code = 3


class ShapeError(InvalidInputError):
    pass


class DegenerateDataError(InvalidInputError):
    pass


class DomainError(GeometryError):
    """Raised when inputs fall outside a metric's domain, e.g. Poincaré norms >= 1."""

    category = "domain_error"
    exit_code = 4
