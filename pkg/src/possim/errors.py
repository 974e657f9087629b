"""Exception hierarchy.

Everything raised on purpose derives from PossimError so the CLI can map
failures to exit statuses (usage problems -> 2, numeric/domain failures -> 3).
"""


class PossimError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PossimError):
    """A query set or point lies outside the space it must live in."""


class ArgumentError(PossimError):
    """An argument is structurally invalid (e.g. alpha outside [0,1])."""


class ConfigurationError(PossimError):
    """A required ingredient (sampler, CDF, solver) is missing."""


class UnsupportedShapeError(PossimError):
    """The operation needs a shape guarantee (unimodal/monotone) it lacks."""


class NumericError(PossimError):
    """A numeric computation failed (non-finite values, divergent integral)."""


class DataError(PossimError):
    """Input data violates a precondition (values out of range, NaN)."""


class DegenerateDataError(DataError):
    """Data admits no inference (zero variance, empty acceptance region)."""


class SchemaError(PossimError):
    """Rows passed to a dataset writer do not conform to its schema."""
