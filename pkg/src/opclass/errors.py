class OpClassError(Exception):
    """Base class for library errors."""


class SpaceMismatch(OpClassError):
    pass


class FiniteSpaceError(OpClassError):
    """Essential-spectrum questions asked of a finite-dimensional operator."""


class NonCompactCoupling(OpClassError):
    """The Weyl reduction of a block needs a compact off-diagonal entry."""


class BorderlineError(OpClassError):
    """A numeric eigenvalue sits within tolerance of a decision threshold."""

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class UnrepresentableProduct(OpClassError):
    """The result falls outside the structured operator family."""


class NotPositive(OpClassError):
    pass


class NotInClass(OpClassError):
    pass
