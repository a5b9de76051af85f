"""Exception taxonomy shared by every lcml module.

The CLI maps these onto exit codes: data errors (schema, parse, label,
validation, shape) exit 2, configuration errors exit 64, numeric
failures exit 70.
"""


class LcmlError(Exception):
    """Base class for all lcml errors."""


class SchemaError(LcmlError):
    """File structure is wrong: missing/short header, bad column layout."""


class ParseError(LcmlError):
    """A cell could not be parsed; message carries row and column."""


class LabelError(LcmlError):
    """A label value is outside the allowed encoding."""


class ValidationError(LcmlError):
    """Data or argument values violate an invariant (NaN/Inf flux, empty name)."""


class ConfigError(LcmlError):
    """Invalid pipeline, classifier, or experiment configuration."""


class NumericError(LcmlError):
    """A numeric procedure produced non-finite values."""


class ShapeError(LcmlError):
    """Array dimensions do not match what a fitted model expects."""
