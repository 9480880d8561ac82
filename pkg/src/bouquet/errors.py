"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class BouquetError(Exception):
    """Base class for every domain error raised by the package."""


class AddressSyntaxError(BouquetError, ValueError):
    def __init__(self, text: str, position: int, message: str):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position} in {text!r}")


class GrowthBoundViolated(BouquetError):
    pass


class UndecidedAtDepth(BouquetError):
    """A depth-capped comparison could not be resolved."""

    def __init__(self, depth: int, message: str = ""):
        self.depth = depth
        super().__init__(message or f"undecided after {depth} entries")


class EqualAddresses(BouquetError):
    pass


class NotExponentiallyBounded(BouquetError):
    pass


class CertificateStall(BouquetError):
    def __init__(self, interval, message: str = ""):
        self.interval = interval
        super().__init__(message or f"certificate stalled; widest certified interval {interval}")


class IsEndpoint(BouquetError):
    pass


class HitsPartition(BouquetError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"shift {index} of the address coincides with a translate of the partition address")


class EmptyRealization(BouquetError):
    pass


class PreconditionFailed(BouquetError):
    pass


class NotDisjoint(BouquetError):
    pass


class SearchBudgetExceeded(BouquetError):
    def __init__(self, summary):
        self.summary = summary
        super().__init__("search budget exceeded")


class SingularValueHit(BouquetError):
    pass


class PlaneOverflow(BouquetError, OverflowError):
    pass


class NotCertified(BouquetError):
    pass


class DepthInsufficient(BouquetError):
    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(f"pullback residual {residual:.3g} exceeds tolerance {tol:.3g}")


class OverflowInSeed(BouquetError):
    pass


class NoConvergence(BouquetError):
    pass


class BoundaryHit(BouquetError):
    def __init__(self, index: int):
        self.index = index
        super().__init__(f"iterate {index} lies on a partition boundary")
