"""Exception hierarchy shared across the package."""


class RegpartError(Exception):
    """Base class for package errors."""


class PreconditionError(RegpartError, ValueError):
    """An operation precondition was violated by the caller."""


class CapExceeded(PreconditionError):
    """An exhaustive-search size cap was exceeded."""


class InputError(RegpartError, ValueError):
    """Malformed external input (JSON files, CLI arguments)."""


class ContractViolation(RegpartError, RuntimeError):
    """A user-supplied callback or sub-object broke its documented contract."""


class InternalInvariantError(RegpartError, RuntimeError):
    """A construction failed to establish an invariant it guarantees."""
