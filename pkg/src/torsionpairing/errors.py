"""Exception taxonomy shared by every module.

Each error carries a stable machine-readable ``kind`` so the service layer
and CLI can serialize failures uniformly as ``{"error": {"kind", "detail"}}``.
"""


class MathDomainError(Exception):
    """A mathematical precondition failed (CLI exit code 2)."""

    kind = "domain"

    def __init__(self, detail=""):
        super().__init__(detail or self.kind)
        self.detail = detail or self.kind


class FactorTooHard(MathDomainError):
    kind = "FactorTooHard"


class NonTorsion(MathDomainError):
    kind = "NonTorsion"


class OrderTooSmall(MathDomainError):
    kind = "OrderTooSmall"


class OrderOutOfRange(MathDomainError):
    kind = "OrderOutOfRange"


class NotAnnihilated(MathDomainError):
    kind = "NotAnnihilated"


class DivisibilityViolation(MathDomainError):
    kind = "DivisibilityViolation"


class NonTorsionClass(MathDomainError):
    kind = "NonTorsionClass"


class NonZeroDegree(MathDomainError):
    kind = "NonZeroDegree"


class DegenerateParameter(MathDomainError):
    kind = "DegenerateParameter"


class WildPrime(MathDomainError):
    kind = "WildPrime"


class AmbiguousModel(MathDomainError):
    kind = "AmbiguousModel"


class WildCase(MathDomainError):
    kind = "WildCase"


class BothZero(MathDomainError):
    kind = "BothZero"


class DivByNonUnit(MathDomainError):
    kind = "DivByNonUnit"


class PrecisionExhausted(MathDomainError):
    kind = "PrecisionExhausted"


class UnsupportedCombination(MathDomainError):
    kind = "UnsupportedCombination"


class NoAuxiliaryPoint(MathDomainError):
    kind = "NoAuxiliaryPoint"


class InadmissibleRow(MathDomainError):
    kind = "InadmissibleRow"


class MissingRow(MathDomainError):
    kind = "MissingRow"
