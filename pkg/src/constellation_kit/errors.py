"""Exception hierarchy shared by all constellation-kit modules."""


class ConstellationKitError(Exception):
    """Base class for all errors raised by this package."""


# finite fields

class NotPrime(ConstellationKitError):
    pass


class DegreeOutOfRange(ConstellationKitError):
    pass


class OrderTooLarge(ConstellationKitError):
    pass


class ZeroInverse(ConstellationKitError):
    pass


class BadElement(ConstellationKitError):
    pass


class NotPrimePower(ConstellationKitError):
    pass


# affine geometry

class MalformedLine(ConstellationKitError):
    pass


class NotDisjoint(ConstellationKitError):
    pass


class WrongCount(ConstellationKitError):
    pass


class NotEnoughFoliations(ConstellationKitError):
    pass


class ConditionBViolated(ConstellationKitError):
    pass


class BadIndex(ConstellationKitError):
    pass


class OrderMismatch(ConstellationKitError):
    pass


# Latin squares

class NotLatin(ConstellationKitError):
    pass


class EmptyInput(ConstellationKitError):
    pass


class NotOrthogonalInput(ConstellationKitError):
    pass


class NotTransversalFoliation(ConstellationKitError):
    pass


class OrderOutOfRange(ConstellationKitError):
    pass


class ParseError(ConstellationKitError):
    pass


class PartialClash(ConstellationKitError):
    pass


# MU bases

class DimensionMismatch(ConstellationKitError):
    pass


class ConstructionInvalid(ConstellationKitError):
    pass


class DegenerateSpectrum(ConstellationKitError):
    pass


class UnsupportedOrder(ConstellationKitError):
    pass


# search

class BadSignature(ConstellationKitError):
    pass


class DimensionTooSmall(ConstellationKitError):
    pass


class BadCount(ConstellationKitError):
    pass
