"""Exception types shared across the library."""


class ParameterError(ValueError):
    """A hyperparameter or argument is outside its valid range."""


class ShapeError(ValueError):
    """An array has the wrong dimensionality, size, or value range."""


class ParseError(ValueError):
    """A dataset file could not be parsed; the message names the bad row."""


class SplitError(ValueError):
    """A train/test split cannot be formed as requested."""


class StateError(RuntimeError):
    """An operation is invalid for the object's current state."""
