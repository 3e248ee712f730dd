class StickweaveError(Exception):
    """Base class for all errors raised by this package."""


class CapExceeded(StickweaveError):
    """A search hit its result cap; ``partial`` holds what was found so far."""

    def __init__(self, cap, partial=()):
        super().__init__(f"search cap of {cap} exceeded")
        self.cap = cap
        self.partial = list(partial)


class MalformedInput(StickweaveError):
    pass


class DecodeError(StickweaveError):
    pass


class VerificationFailure(StickweaveError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)
