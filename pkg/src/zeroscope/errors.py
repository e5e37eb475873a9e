"""Exception types raised across the package."""


class ZeroscopeError(Exception):
    """Base class for all package errors."""


class InvalidArgument(ZeroscopeError, ValueError):
    """An argument violates a documented precondition."""


class InsufficientPoints(InvalidArgument):
    """A point pattern has too few points for the requested estimator."""


class OutOfSafeRegion(InvalidArgument):
    """A GAF evaluation was requested outside its truncation-safe disk."""


class Unsupported(ZeroscopeError, NotImplementedError):
    """The requested combination of options has no implementation."""


class ZeroFindingIncomplete(ZeroscopeError, RuntimeError):
    """Newton-found zeros disagree with the argument-principle count."""

    def __init__(self, found, expected, region=None):
        self.found = found
        self.expected = expected
        self.region = region
        super().__init__(
            f"found {found} zeros but the winding number says {expected}"
            + (f" in {region}" if region is not None else "")
        )
