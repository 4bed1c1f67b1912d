"""Exception hierarchy shared by all boundsim modules."""


class BoundsimError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(BoundsimError, ValueError):
    """Input failed a precondition check."""


class NumericalError(BoundsimError, ArithmeticError):
    """A numerical routine failed or produced an unusable result."""


class NotHermitian(ValidationError):
    pass


class NotAState(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotPrime(ValidationError):
    pass


class TooLarge(ValidationError):
    pass


class UnsupportedDimension(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class BadNormalization(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class UnsupportedLabeling(ValidationError):
    pass


class NegativeWeight(ValidationError):
    pass


class EmptyCounts(ValidationError):
    pass


class InvalidConfig(ValidationError):
    pass


class SingularSystem(NumericalError):
    pass
