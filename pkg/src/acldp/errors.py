"""Exception types shared across the package.

The CLI maps these onto exit codes: :class:`ConfigurationError` -> 2,
:class:`NumericalError` (and subclasses) -> 1.
"""


class ConfigurationError(ValueError):
    """Invalid parameters, violated preconditions, or malformed config input."""


class NumericalError(RuntimeError):
    """A computation failed to reach its stated tolerance or consistency check."""


class InstabilityError(NumericalError):
    """A time integration blew up; message carries the offending parameters."""
