"""
Error types raised by the library.

Every error is a DRF ``APIException``: it carries a stable ``code`` (the
string printed by the CLI) and a human-readable ``detail``, plus an
optional JSON-serialisable ``witness`` describing the offending data.
"""

from typing import Any

from rest_framework import status
from rest_framework.exceptions import APIException


class EhrfanError(APIException):
    status_code = status.HTTP_422_UNPROCESSABLE_ENTITY
    default_code = "EHRFAN_ERROR"
    default_detail = "Computation failed."

    def __init__(
        self,
        detail: str | None = None,
        code: str | None = None,
        witness: Any = None,
    ):
        super().__init__(detail, code)
        self.witness = witness

    @property
    def code(self) -> str:
        return self.detail.code

    def as_dict(self) -> dict:
        return {
            "code": self.code,
            "message": str(self.detail),
            "witness": self.witness,
        }

    def __str__(self):
        return f"{self.code}: {self.detail}"


# lattice


class ZeroVectorError(EhrfanError):
    default_code = "ZERO_VECTOR"
    default_detail = "The zero vector has no primitive direction."


class DependentVectorsError(EhrfanError):
    default_code = "DEPENDENT_VECTORS"
    default_detail = "Vectors are linearly dependent over the rationals."


class NotUnimodularError(EhrfanError):
    default_code = "NOT_UNIMODULAR"
    default_detail = "Vectors do not extend to a basis of the lattice."


# fans


class InvalidFanError(EhrfanError):
    default_code = "INVALID_FAN"
    default_detail = "Malformed fan data."


class NonPrimitiveRayError(EhrfanError):
    default_code = "NON_PRIMITIVE_RAY"
    default_detail = "Ray generator is not primitive."


class DuplicateRayError(EhrfanError):
    default_code = "DUPLICATE_RAY"
    default_detail = "Two rays have the same generator."


class NotSimplicialError(EhrfanError):
    default_code = "NOT_SIMPLICIAL"
    default_detail = "Cone generators are linearly dependent."


class BadIntersectionError(EhrfanError):
    default_code = "BAD_INTERSECTION"
    default_detail = "Two cones do not meet in a common face."


class ConeNotInFanError(EhrfanError):
    default_code = "CONE_NOT_IN_FAN"
    default_detail = "Cone is not a cone of the fan."


class NotPureError(EhrfanError):
    default_code = "NOT_PURE"
    default_detail = "Fan is not pure."


class NotCompleteError(EhrfanError):
    default_code = "NOT_COMPLETE"
    default_detail = "Fan is not complete."


class WrongDimensionError(EhrfanError):
    default_code = "WRONG_DIMENSION"
    default_detail = "Fan has the wrong dimension for this operation."


# piecewise-linear functions


class FanMismatchError(EhrfanError):
    default_code = "FAN_MISMATCH"
    default_detail = "Function does not live on the expected fan."


class BadRayError(EhrfanError):
    default_code = "BAD_RAY"
    default_detail = "Ray index out of range."


class MixedSignError(EhrfanError):
    default_code = "MIXED_SIGN_ON_CONE"
    default_detail = (
        "Functions are not comparable on a cone; a refinement is required."
    )


class NotASubdivisionError(EhrfanError):
    default_code = "NOT_A_SUBDIVISION"
    default_detail = "Fans are not related by the stellar subdivision."


# ehrhart


class NotEhrhartError(EhrfanError):
    default_code = "NOT_EHRHART"
    default_detail = "Fan is not Ehrhart."


class NotBalancedError(EhrfanError):
    default_code = "NOT_BALANCED"
    default_detail = "Fan is not balanced."


class DegreeBoundError(EhrfanError):
    default_code = "DEGREE_BOUND_EXCEEDED"
    default_detail = "Oracle is not a polynomial of the stated degree."


class InternalInconsistencyError(EhrfanError):
    status_code = status.HTTP_500_INTERNAL_SERVER_ERROR
    default_code = "INTERNAL_INCONSISTENCY"
    default_detail = "Two computations of the same quantity disagree."


# polytopes


class NotConvexError(EhrfanError):
    default_code = "NOT_CONVEX"
    default_detail = "Function is not convex."


class UnboundedPolytopeError(EhrfanError):
    default_code = "UNBOUNDED"
    default_detail = "Polytope is unbounded."


class ShellLimitError(EhrfanError):
    default_code = "SHELL_LIMIT_EXCEEDED"
    default_detail = "Enumeration did not stabilise within the shell limit."


# matroids


class InvalidMatroidError(EhrfanError):
    default_code = "INVALID_MATROID"
    default_detail = "Data does not describe a matroid."


class NotAFlatError(EhrfanError):
    default_code = "NOT_A_FLAT"
    default_detail = "Subset is not a proper flat."


class LoopsPresentError(EhrfanError):
    default_code = "LOOPS_PRESENT"
    default_detail = "Matroid has loops."


class ProductMatchingError(EhrfanError):
    default_code = "NO_PRODUCT_MATCHING"
    default_detail = "Star fan does not match the product of minors."


# piecewise-exponential elements


class RefinementRequiredError(EhrfanError):
    default_code = "REFINEMENT_REQUIRED"
    default_detail = (
        "Terms are not pairwise comparable on every maximal cone."
    )


# command line


class MalformedInputError(EhrfanError):
    status_code = status.HTTP_400_BAD_REQUEST
    default_code = "MALFORMED_INPUT"
    default_detail = "Input document is malformed."
