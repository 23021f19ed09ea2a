"""Exception types shared across the package.

The CLI maps :class:`InputError` to exit code 2 and :class:`DegenerateError`
to exit code 3.
"""


class HomolinkError(Exception):
    """Base class for all package errors."""


class InputError(HomolinkError, ValueError):
    """Malformed or inconsistent input (files, ids, parameters)."""


class DegenerateError(HomolinkError, ArithmeticError):
    """A computation has no well-defined result on the given data."""


class DegenerateScorerError(DegenerateError):
    pass


class DegenerateNullModelError(DegenerateError):
    pass


class NoViablePolicyError(DegenerateError):
    pass


class UnweightableAttributeError(DegenerateError):
    pass
