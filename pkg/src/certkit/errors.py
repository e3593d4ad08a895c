"""Exception hierarchy shared by all certkit modules.

The CLI maps these onto its exit-code contract: input/usage problems
(ValidationError, FormatError, NotFoundError) exit 2, while integrity
violations exit 1 alongside other verification failures.
"""


class CertkitError(Exception):
    """Base class for all certkit errors."""


class ValidationError(CertkitError):
    """An input value or record violates a declared invariant."""


class FormatError(ValidationError):
    """A file being imported is malformed.

    Carries the offending line number when the format is line-oriented.
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotFoundError(CertkitError):
    """A digest, reference, or named object does not exist."""


class IntegrityError(CertkitError):
    """Stored bytes no longer hash to their recorded digest."""

    def __init__(self, digest_hex: str, message: str | None = None):
        super().__init__(message or f"integrity violation: object {digest_hex} is corrupt")
        self.digest_hex = digest_hex
