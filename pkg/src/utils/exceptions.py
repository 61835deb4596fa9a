"""Custom exceptions for nugrass"""


class NuGrassError(Exception):
    """Base exception class for nugrass errors"""
    pass


class NotInvertible(NuGrassError):
    """Raised when an element has no inverse (odd, inhomogeneous or zero body)"""
    pass


class ParityViolation(NuGrassError):
    """Raised when an element or matrix entry has the wrong parity"""
    pass


class ContextMismatch(NuGrassError):
    """Raised when elements from different generator contexts are combined"""
    pass


class MissingImage(NuGrassError):
    """Raised when a substitution has no image for a generator in use"""
    pass


class FormalUnitSum(NuGrassError):
    """Raised when the formal unit would have to be added to a ring element"""
    pass


class DimensionMismatch(NuGrassError):
    """Raised when matrix shapes, block splits or ranks do not agree"""
    pass


class Singular(NuGrassError):
    """Raised when a supermatrix has no pivot in some column or a vanishing reduced determinant"""

    def __init__(self, message: str, column: int = -1) -> None:
        super().__init__(message)
        self.column = column


class EmptyOverlap(Singular):
    """Raised when two charts do not meet: the reduced determinant of the minor vanishes"""
    pass


class BadIndexBalance(NuGrassError):
    """Raised when a multi-index does not pick k even and l odd rows"""
    pass


class KernelNotTrivial(NuGrassError):
    """Raised when a stacked matrix has no left inverse modulo the partition relation"""
    pass


class EndpointMismatch(NuGrassError):
    """Raised when a homotopy does not specialise to its endpoints"""
    pass


class SchemaError(NuGrassError):
    """Raised when a bundle file does not match the schema"""
    pass


class ExpressionSyntaxError(NuGrassError):
    """Raised when an expression cannot be parsed"""

    def __init__(self, message: str, position: int = -1) -> None:
        super().__init__(message)
        self.position = position


class UnknownIdentifier(NuGrassError):
    """Raised when an expression names a generator outside its context"""
    pass


class DivisionByNonInvertible(NuGrassError):
    """Raised when an expression divides by an odd or non-invertible value"""
    pass
