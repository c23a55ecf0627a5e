"""Shared exception types.

The CLI maps these onto exit codes: UsageError (and subclasses) -> 2,
NumericError -> 3. Verdict failures are not exceptions; runs report them and
the CLI exits 1.
"""


class UsageError(ValueError):
    """Caller violated a precondition (bad argument, mismatched grids, ...)."""


class DomainError(UsageError):
    """Parameter outside the mathematical domain (p <= 1, alpha <= 0, ...)."""


class ConfigurationError(UsageError):
    """Bad run configuration: unknown key, wrong type, inconsistent sizes."""


class NumericError(RuntimeError):
    """A solver failed (step-size underflow, non-finite state, no bracket).

    Carries whatever partial data was available in ``payload``.
    """

    def __init__(self, message, payload=None):
        super().__init__(message)
        self.payload = payload
