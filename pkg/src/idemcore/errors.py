"""Exception hierarchy.

Every validation failure carries a ``witness`` dict holding the ids needed to
replay the failure (offending morphisms, objects, sieves).
"""


class IdemcoreError(Exception):
    """Base class for all errors raised by the engine."""

    kind = "error"

    def __init__(self, message, **witness):
        super().__init__(message)
        self.witness = witness

    def as_record(self):
        return {"kind": self.kind, "message": str(self), "witness": self.witness}


class BudgetExceeded(IdemcoreError):
    kind = "BudgetExceeded"


# -- category / functor validation -------------------------------------------


class CategoryError(IdemcoreError):
    kind = "CategoryError"


class MissingComposite(CategoryError):
    kind = "MissingComposite"


class NonAssociative(CategoryError):
    kind = "NonAssociative"


class BadIdentity(CategoryError):
    kind = "BadIdentity"


class EndpointMismatch(CategoryError):
    kind = "EndpointMismatch"


class UnknownReference(CategoryError):
    kind = "UnknownReference"


class FunctorError(IdemcoreError):
    kind = "FunctorError"


class NotNatural(IdemcoreError):
    kind = "NotNatural"


# -- monads and adjunctions -------------------------------------------------


class UnitLawFail(IdemcoreError):
    kind = "UnitLawFail"


class AssocFail(IdemcoreError):
    kind = "AssocFail"


class TriangleFail(IdemcoreError):
    kind = "TriangleFail"


# -- presheaves ---------------------------------------------------------------


class PresheafError(IdemcoreError):
    kind = "PresheafError"


# -- core machinery -----------------------------------------------------------


class HypothesisError(IdemcoreError):
    """An input violates a standing hypothesis (properness, Sigma inside Sigma_T)."""

    kind = "HypothesisError"


class AssumptionUnavailable(IdemcoreError):
    kind = "AssumptionUnavailable"


class NonUniqueExtension(IdemcoreError):
    kind = "NonUniqueExtension"


class TopologyError(IdemcoreError):
    kind = "TopologyError"


# -- problem files ------------------------------------------------------------


class SchemaError(IdemcoreError):
    kind = "SchemaError"


class DanglingRef(IdemcoreError):
    kind = "DanglingRef"
