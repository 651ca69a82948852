"""
Integral piecewise-linear functions on unimodular fans.

On a unimodular fan a PL function is just an integer per ray. Classes
modulo integral linear functions are represented by a canonical coset
representative: the values reduced by the Hermite basis of the lattice of
linear functions restricted to the rays.
"""

import hashlib
import logging
import math
from dataclasses import dataclass
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

from core.exceptions import (
    BadRayError,
    FanMismatchError,
    InternalInconsistencyError,
    MixedSignError,
    NotASubdivisionError,
    NotCompleteError,
)
from fans.fan import (
    Cone,
    Fan,
    is_complete,
    linear_lattice_hnf,
    star_fan,
)
from lattice.linalg import (
    IntMatrix,
    LatticeVector,
    complete_to_unimodular_basis,
    hermite_normal_form,
    pairing,
    smith_diagonal,
)

logger = logging.getLogger(__name__)

INFINITE = math.inf


@dataclass(frozen=True)
class PLFunction:
    fan: Fan
    values: tuple[int, ...]

    def __post_init__(self):
        values = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) != len(self.fan.rays):
            raise FanMismatchError(
                "one value per ray is required",
                witness={"rays": len(self.fan.rays), "values": len(values)},
            )

    def __getitem__(self, ray: int) -> int:
        return self.values[ray]

    def _same_fan(self, other: "PLFunction") -> None:
        if self.fan != other.fan:
            raise FanMismatchError("functions live on different fans")

    def __add__(self, other: "PLFunction") -> "PLFunction":
        self._same_fan(other)
        return PLFunction(
            self.fan, tuple(a + b for a, b in zip(self.values, other.values))
        )

    def __sub__(self, other: "PLFunction") -> "PLFunction":
        self._same_fan(other)
        return PLFunction(
            self.fan, tuple(a - b for a, b in zip(self.values, other.values))
        )

    def __neg__(self) -> "PLFunction":
        return PLFunction(self.fan, tuple(-a for a in self.values))

    def __mul__(self, scalar: int) -> "PLFunction":
        return PLFunction(self.fan, tuple(scalar * a for a in self.values))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.values)

    def to_json(self) -> dict:
        return {"values": list(self.values)}


@dataclass(frozen=True)
class PLClass:
    rep: PLFunction

    @property
    def key(self) -> str:
        payload = ",".join(str(v) for v in self.rep.values)
        return hashlib.sha1(
            f"{self.rep.fan.key}:{payload}".encode()
        ).hexdigest()


class Convexity(StrEnum):
    CONVEX = "CONVEX"
    STRICTLY_CONVEX = "STRICTLY_CONVEX"
    CONCAVE = "CONCAVE"
    STRICTLY_CONCAVE = "STRICTLY_CONCAVE"
    LINEAR = "LINEAR"
    NONE = "NONE"


def zero_function(fan: Fan) -> PLFunction:
    return PLFunction(fan, (0,) * len(fan.rays))


def constant_function(fan: Fan, value: int) -> PLFunction:
    return PLFunction(fan, (value,) * len(fan.rays))


def courant(fan: Fan, ray: int) -> PLFunction:
    if not 0 <= ray < len(fan.rays):
        raise BadRayError(witness=ray)
    return PLFunction(
        fan, tuple(int(i == ray) for i in range(len(fan.rays)))
    )


def linear_function(fan: Fan, m: Sequence[int]) -> PLFunction:
    """The values of the linear function ``m`` on the rays."""
    return PLFunction(fan, tuple(pairing(m, u) for u in fan.rays))


def agreeing_linear_function(f: PLFunction, cone: Iterable[int]) -> tuple:
    """
    The linear function that agrees with ``f`` on ``cone``, built from the
    dual rows of the deterministic basis completion of the cone.
    """
    fan = f.fan
    cone = fan.require_cone(cone)
    fan.require_unimodular()
    _, dual = complete_to_unimodular_basis(
        [fan.rays[i] for i in cone], fan.ambient_dim
    )
    m = [0] * fan.ambient_dim
    for row, ray in zip(dual.rows, cone):
        value = f.values[ray]
        m = [a + value * b for a, b in zip(m, row)]
    return tuple(m)


@lru_cache(maxsize=1024)
def _linear_lattice(fan: Fan):
    return linear_lattice_hnf(fan)


def _reduce(fan: Fan, values: Sequence[int]) -> tuple[list[int], list[int]]:
    """Reduce values by the Hermite basis; returns (remainder, quotients)."""
    rows, _ = _linear_lattice(fan)
    rest = list(values)
    quotients = []
    for row in rows:
        col = next(i for i, x in enumerate(row) if x)
        q = rest[col] // row[col]
        quotients.append(q)
        if q:
            rest = [a - q * b for a, b in zip(rest, row)]
    return rest, quotients


def canonical_class_rep(f: PLFunction) -> PLClass:
    rest, _ = _reduce(f.fan, f.values)
    return PLClass(PLFunction(f.fan, tuple(rest)))


def is_linear(f: PLFunction) -> tuple[bool, LatticeVector | None]:
    """
    Decide whether ``f`` is the restriction of an integral linear function.

    Returns ``(True, m)`` with ``m(u_ρ) = f(u_ρ)`` for all rays, or
    ``(False, None)``.
    """
    rest, quotients = _reduce(f.fan, f.values)
    if any(rest):
        return False, None
    _, transforms = _linear_lattice(f.fan)
    m = [0] * f.fan.ambient_dim
    for q, row in zip(quotients, transforms):
        m = [a + q * b for a, b in zip(m, row)]
    return True, tuple(m)


def _saturation_index(fan: Fan) -> int:
    rows, _ = _linear_lattice(fan)
    if not rows:
        return 1
    h, _ = hermite_normal_form(IntMatrix.from_rows(rows).transpose())
    block = IntMatrix.from_rows(h.rows[: len(rows)])
    return math.prod(smith_diagonal(block))


def class_order(f: PLFunction) -> int | float:
    """
    Order of the class of ``f`` modulo linear functions: the least k >= 1
    with k·f linear, or ``INFINITE``.
    """
    rows, _ = _linear_lattice(f.fan)
    rest = [Fraction(v) for v in f.values]
    coefficients = []
    for row in rows:
        col = next(i for i, x in enumerate(row) if x)
        c = rest[col] / row[col]
        coefficients.append(c)
        rest = [a - c * b for a, b in zip(rest, row)]
    if any(rest):
        return INFINITE
    order = math.lcm(*(c.denominator for c in coefficients)) if rows else 1
    cap = _saturation_index(f.fan)
    if cap % order:
        raise InternalInconsistencyError(
            "class order does not divide the saturation index",
            witness={"order": order, "saturation_index": cap},
        )
    return order


def restrict_to_star(
    f: PLFunction, cone: Iterable[int], linear: Sequence[int] | None = None
) -> PLFunction:
    """
    Push ``f`` to the star fan of ``cone`` after subtracting a linear
    function that agrees with ``f`` on the cone (the deterministic one
    unless ``linear`` is given).
    """
    fan = f.fan
    cone = fan.require_cone(cone)
    star = star_fan(fan, cone)
    if linear is None:
        linear = agreeing_linear_function(f, cone)
    elif any(pairing(linear, fan.rays[i]) != f.values[i] for i in cone):
        raise FanMismatchError(
            "linear function does not agree with f on the cone",
            witness=list(cone),
        )
    return PLFunction(
        star.fan,
        tuple(
            f.values[p] - pairing(linear, fan.rays[p]) for p in star.ray_lift
        ),
    )


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def convexity_type(f: PLFunction) -> Convexity:
    fan = f.fan
    if not is_complete(fan):
        raise NotCompleteError()
    signs = set()
    for ridge, cofaces in fan.ridge_map().items():
        first, second = cofaces
        m = agreeing_linear_function(f, first)
        (opposite,) = set(second) - set(ridge)
        signs.add(_sign(f.values[opposite] - pairing(m, fan.rays[opposite])))

    if signs <= {0}:
        linear, _ = is_linear(f)
        if not linear:
            raise InternalInconsistencyError(
                "flat across every ridge but not linear",
                witness={"values": list(f.values)},
            )
        return Convexity.LINEAR
    if signs == {1}:
        return Convexity.STRICTLY_CONVEX
    if signs == {0, 1}:
        return Convexity.CONVEX
    if signs == {-1}:
        return Convexity.STRICTLY_CONCAVE
    if signs == {-1, 0}:
        return Convexity.CONCAVE
    return Convexity.NONE


def is_convex(f: PLFunction) -> bool:
    return convexity_type(f) in (
        Convexity.CONVEX,
        Convexity.STRICTLY_CONVEX,
        Convexity.LINEAR,
    )


def pointwise_max_min(
    f: PLFunction, g: PLFunction
) -> tuple[PLFunction, PLFunction]:
    f._same_fan(g)
    for cone in f.fan.maximal_cones:
        signs = {_sign(f.values[i] - g.values[i]) for i in cone}
        if {1, -1} <= signs:
            raise MixedSignError(witness=list(cone))
    upper = tuple(max(a, b) for a, b in zip(f.values, g.values))
    lower = tuple(min(a, b) for a, b in zip(f.values, g.values))
    return PLFunction(f.fan, upper), PLFunction(f.fan, lower)


def _require_subdivision(fine: Fan, coarse: Fan, cone: Cone | None = None):
    record = fine.subdivision_of
    if record is None or record.coarse != coarse:
        raise NotASubdivisionError()
    if cone is not None and tuple(sorted(cone)) != record.cone:
        raise NotASubdivisionError(witness=list(cone))
    return record


def transfer_to_subdivision(f: PLFunction, fine: Fan) -> PLFunction:
    """The same function viewed on the stellar subdivision ``fine``."""
    record = _require_subdivision(fine, f.fan)
    if record.new_ray < len(f.values):
        return PLFunction(fine, f.values)
    new_value = sum(f.values[i] for i in record.cone)
    return PLFunction(fine, f.values + (new_value,))


def decompose_on_subdivision(
    f_fine: PLFunction, coarse: Fan, cone: Iterable[int]
) -> tuple[PLFunction, int]:
    """
    Write ``f_fine`` as the transfer of a function on ``coarse`` plus ``a``
    times the Courant function of the new ray.
    """
    record = _require_subdivision(f_fine.fan, coarse, tuple(cone))
    if record.new_ray < len(coarse.rays):
        return PLFunction(coarse, f_fine.values), 0
    linear_value = sum(f_fine.values[i] for i in record.cone)
    a = f_fine.values[record.new_ray] - linear_value
    return PLFunction(coarse, f_fine.values[: len(coarse.rays)]), a
