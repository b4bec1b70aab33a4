"""Exception hierarchy.

Every validation error carries the first violating argument tuple in
``witness`` so callers (and the CLI) can name the broken invariant.
"""


class AlgebraError(ValueError):
    """Base class for invalid algebraic input."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness

    @property
    def invariant(self):
        return type(self).__name__


class InvalidTable(AlgebraError):
    pass


class NotAGroup(AlgebraError):
    pass


class NotAssociative(AlgebraError):
    pass


class NotDistributive(AlgebraError):
    pass


class BadUnit(AlgebraError):
    pass


class NotAdditive(AlgebraError):
    pass


class NotAssociativeAction(AlgebraError):
    pass


class UnitActsNontrivially(AlgebraError):
    pass


class NotMultiplicative(AlgebraError):
    pass


class NotUnital(AlgebraError):
    pass


class NotEquivariant(AlgebraError):
    pass


class NotNormalized(AlgebraError):
    pass


class NotMultilinear(AlgebraError):
    pass


class NotACocycle(AlgebraError):
    pass


class CarrierMismatch(AlgebraError):
    pass


class MismatchedType(AlgebraError):
    pass


class SubgroupNotContained(AlgebraError):
    pass
