"""
Closed forms of the Ehrhart functional in dimensions one and two.

A one-dimensional fan is Ehrhart exactly when its rays sum to zero, and
then ``χ(f) = 1 + Σ f(u_ρ)``. A two-dimensional fan is Ehrhart exactly
when every ray ρ has an integer ``a_ρ`` with ``Σ_{τ~ρ} u_τ = a_ρ u_ρ``
(``STAR_SUMS``) and ``Σ (2 - a_ρ) u_ρ = 0`` (``LINEAR_CONDITION``).
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from core.exceptions import (
    InternalInconsistencyError,
    NotEhrhartError,
    NotPureError,
    WrongDimensionError,
)
from fans.fan import Fan
from lattice.linalg import quotient_projection
from plfunctions.functions import PLFunction

logger = logging.getLogger(__name__)

STAR_SUMS = "STAR_SUMS"
LINEAR_CONDITION = "LINEAR_CONDITION"


def _require_dimension(fan: Fan, dimension: int) -> None:
    fan.require_unimodular()
    if fan.dim != dimension:
        raise WrongDimensionError(
            f"a fan of dimension {dimension} is required",
            witness={"dimension": fan.dim},
        )
    if not fan.is_pure:
        raise NotPureError()


def chi_closed_form_dim1(f: PLFunction) -> int:
    fan = f.fan
    _require_dimension(fan, 1)
    residual = fan.ray_sum(range(len(fan.rays)))
    if any(residual):
        raise NotEhrhartError(
            "rays of a one-dimensional Ehrhart fan sum to zero",
            witness={"reason": STAR_SUMS, "residual": list(residual)},
        )
    return 1 + sum(f.values)


@dataclass(frozen=True)
class Dim2Criterion:
    is_ehrhart: bool
    a: tuple[int, ...] = ()
    failed_equation: str | None = None
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return self.is_ehrhart

    def to_json(self) -> dict:
        document = {"ehrhart": self.is_ehrhart, "a": list(self.a)}
        if self.failed_equation is not None:
            document["reason"] = self.failed_equation
            document.update(self.witness)
        return document

    def as_error(self) -> NotEhrhartError:
        return NotEhrhartError(
            f"fan is not Ehrhart ({self.failed_equation})",
            witness=self.to_json(),
        )


def _star_coefficient(fan: Fan, ray: int) -> int | tuple[int, ...]:
    """
    ``a_ρ`` with ``Σ_{τ~ρ} u_τ = a_ρ u_ρ``, or the image of the neighbour
    sum in the quotient lattice when no such integer exists.
    """
    u = fan.rays[ray]
    total = fan.ray_sum(fan.neighbor_rays((ray,)))
    residual = quotient_projection([u], fan.ambient_dim).apply(total)
    if any(residual):
        return residual
    pivot = next(i for i, x in enumerate(u) if x)
    return total[pivot] // u[pivot]


def dim2_is_ehrhart(fan: Fan) -> Dim2Criterion:
    _require_dimension(fan, 2)
    a = []
    for ray in range(len(fan.rays)):
        coefficient = _star_coefficient(fan, ray)
        if isinstance(coefficient, tuple):
            return Dim2Criterion(
                False,
                failed_equation=STAR_SUMS,
                witness={"ray": ray, "residual": list(coefficient)},
            )
        a.append(coefficient)
    residual = [
        sum((2 - a_r) * u[k] for a_r, u in zip(a, fan.rays))
        for k in range(fan.ambient_dim)
    ]
    if any(residual):
        logger.info("linear condition fails with residual %s", residual)
        return Dim2Criterion(
            False, tuple(a), LINEAR_CONDITION, {"residual": residual}
        )
    return Dim2Criterion(True, tuple(a))


def chi_closed_form_dim2(f: PLFunction) -> int:
    criterion = dim2_is_ehrhart(f.fan)
    if not criterion:
        raise criterion.as_error()
    values = f.values
    total = Fraction(1)
    for a_r, v in zip(criterion.a, values):
        total += (1 - Fraction(a_r, 2)) * v - Fraction(a_r, 2) * v * v
    for first, second in f.fan.cones_of_dim(2):
        total += values[first] * values[second]
    if total.denominator != 1:
        raise InternalInconsistencyError(
            "closed form value is not an integer",
            witness={"value": str(total), "a": list(criterion.a)},
        )
    return int(total)
