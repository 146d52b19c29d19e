class LabError(Exception):
    """
    Base class for every error raised by the compute package.
    """


class DomainError(LabError, ValueError):
    """Argument outside the domain of an operation."""


class ModeError(DomainError):
    """Evaluation mode or family not valid for the requested operation."""


class SegmentSizeError(LabError):
    """Requested sieve segment exceeds the configured cap."""


class CapacityError(LabError):
    """Requested range exceeds the configured sieve capacity."""


class ArithmeticOverflowError(LabError, OverflowError):
    """A value left the unsigned 64-bit range."""


class InvariantViolation(LabError, AssertionError):
    """
    An identity that must hold exactly did not (census partition, Mertens
    identity, sieve vs. oracle). Always a defect, never a claim verdict.
    """
