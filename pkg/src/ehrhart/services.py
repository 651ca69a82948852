"""
The Ehrhart engine.

``EhrhartEngine`` evaluates the recursion that defines the Ehrhart
functional of a unimodular fan, synthesises its polynomial in the binomial
basis, decides whether the fan is Ehrhart, and evaluates the volume
polynomial of balanced fans. Certificates and evaluated values are kept in
the ``ehrhart`` cache alias.
"""

import logging
import math
import random
from dataclasses import dataclass, field
try:
    from enum import StrEnum
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        __str__ = str.__str__
        __format__ = str.__format__

from functools import lru_cache
from typing import Callable, Sequence

from django.conf import settings
from django.core.cache import caches

from core.exceptions import (
    InternalInconsistencyError,
    NotBalancedError,
    NotEhrhartError,
)
from ehrhart.polynomials import IVPoly, binomial_expand, make_alpha
from fans.fan import Cone, Fan, is_balanced, star_fan
from lattice.linalg import pairing
from plfunctions.functions import (
    PLFunction,
    agreeing_linear_function,
    canonical_class_rep,
    restrict_to_star,
)

logger = logging.getLogger(__name__)

StarTerm = Callable[[Fan, PLFunction, int], int]


class FailureReason(StrEnum):
    STAR_NOT_EHRHART = "STAR_NOT_EHRHART"
    COEFF_MISMATCH = "COEFF_MISMATCH"
    LINEAR_INVARIANCE = "LINEAR_INVARIANCE"


@dataclass(frozen=True)
class EhrhartCertificate:
    fan_key: str
    dimension: int
    polynomial: IVPoly
    star_certificates: dict[int, "EhrhartCertificate"] = field(
        default_factory=dict
    )

    def to_json(self) -> dict:
        return {
            "ehrhart": True,
            "dimension": self.dimension,
            "polynomial": self.polynomial.to_json(),
        }


@dataclass(frozen=True)
class EhrhartFailure:
    """
    Why a fan is not Ehrhart.

    Notes:
    - STAR_NOT_EHRHART: ``witness["ray"]`` has a non-Ehrhart star fan.
    - COEFF_MISMATCH: two rays propose different coefficients for
      ``witness["alpha"]``.
    - LINEAR_INVARIANCE: translating by the linear function of
      ``witness["basis_index"]`` changes the polynomial;
      ``witness["residual"]`` lists ``d!·(P(t(m_j)) - P(0))`` for every
      basis functional ``m_j``.
    """

    fan_key: str
    reason: FailureReason
    witness: dict

    def to_json(self) -> dict:
        return {"reason": str(self.reason), **self.witness}

    def as_error(self) -> NotEhrhartError:
        return NotEhrhartError(
            f"fan is not Ehrhart ({self.reason})", witness=self.to_json()
        )


class EhrhartEngine:
    def __init__(self, cache_alias: str = "ehrhart"):
        self.cache = caches[cache_alias]

    # certification

    def certify(self, fan: Fan) -> EhrhartCertificate | EhrhartFailure:
        fan.require_unimodular()
        cache_key = f"certificate:{fan.key}"
        outcome = self.cache.get(cache_key)
        if outcome is not None:
            return outcome
        if fan.dim == 0:
            outcome = EhrhartCertificate(fan.key, 0, IVPoly.constant(1))
        else:
            outcome = self._certify_from_stars(fan)
        self.cache.set(cache_key, outcome, None)
        if isinstance(outcome, EhrhartFailure):
            logger.info(
                "fan %s is not Ehrhart: %s", fan.key[:8], outcome.reason
            )
        else:
            logger.debug("fan %s certified", fan.key[:8])
        return outcome

    def _certify_from_stars(
        self, fan: Fan
    ) -> EhrhartCertificate | EhrhartFailure:
        children = {}
        for ray in range(len(fan.rays)):
            child = self.certify(star_fan(fan, (ray,)).fan)
            if isinstance(child, EhrhartFailure):
                return EhrhartFailure(
                    fan.key,
                    FailureReason.STAR_NOT_EHRHART,
                    {"ray": ray, "star": child.to_json()},
                )
            children[ray] = child

        proposals = {
            ray: self._star_expansion(fan, ray, child.polynomial)
            for ray, child in children.items()
        }
        coeffs = {(): 1}
        for alpha in sorted({a for p in proposals.values() for a in p}):
            rays = [var for var, _ in alpha]
            values = [proposals[ray].get(alpha, 0) for ray in rays]
            for ray, value in zip(rays[1:], values[1:]):
                if value != values[0]:
                    return EhrhartFailure(
                        fan.key,
                        FailureReason.COEFF_MISMATCH,
                        {
                            "alpha": {str(v): e for v, e in alpha},
                            "rays": [rays[0], ray],
                            "coefficients": [values[0], value],
                        },
                    )
            coeffs[alpha] = values[0]
        polynomial = IVPoly(range(len(fan.rays)), coeffs)

        failure = self._linear_invariance(fan, polynomial)
        if failure is not None:
            return failure
        certificate = EhrhartCertificate(
            fan.key, fan.dim, polynomial, children
        )
        self._spot_check(fan, certificate)
        return certificate

    def _star_expansion(
        self, fan: Fan, ray: int, star_polynomial: IVPoly
    ) -> dict:
        """
        Coefficients proposed by ``ray``: the star polynomial composed with
        the restriction map, expanded in the basis shifted by one in
        ``x_ray``.
        """
        star = star_fan(fan, (ray,))
        dual = star.dual_basis.rows[0]
        shift = [pairing(dual, fan.rays[p]) for p in star.ray_lift]

        def oracle(point: dict[int, int]) -> int:
            height = point[ray] + 1
            return star_polynomial.evaluate(
                {
                    s: point[p] - c * height
                    for s, (p, c) in enumerate(zip(star.ray_lift, shift))
                }
            )

        expansion = binomial_expand(
            oracle, (ray,) + star.ray_lift, fan.dim - 1
        )
        proposal = {}
        for alpha, c in expansion.coeffs.items():
            exponents = dict(alpha)
            exponents[ray] = exponents.get(ray, 0) + 1
            proposal[make_alpha(exponents)] = c
        return proposal

    def _linear_invariance(
        self, fan: Fan, polynomial: IVPoly
    ) -> EhrhartFailure | None:
        residuals = []
        failing = None
        for j in range(fan.ambient_dim):
            translation = {r: u[j] for r, u in enumerate(fan.rays)}
            difference = polynomial.shift(translation) - polynomial
            if not difference.is_zero() and failing is None:
                failing = (j, difference)
            residuals.append(
                math.factorial(fan.dim) * difference.evaluate({})
            )
        if failing is None:
            return None
        j, difference = failing
        return EhrhartFailure(
            fan.key,
            FailureReason.LINEAR_INVARIANCE,
            {
                "basis_index": j,
                "residual": residuals,
                "difference": difference.to_json(),
            },
        )

    def _spot_check(self, fan: Fan, certificate: EhrhartCertificate) -> None:
        rng = random.Random(settings.EHRFAN_SAMPLE_SEED)
        bound = settings.EHRFAN_SAMPLE_RANGE
        samples = [tuple(0 for _ in fan.rays)]
        samples += [
            tuple(rng.randint(-bound, bound) for _ in fan.rays)
            for _ in range(settings.EHRFAN_POLYNOMIAL_SAMPLES)
        ]
        for values in samples:
            expected = certificate.polynomial.evaluate_values(values)
            actual = self.walk(fan, values, self._certified_star_term)
            if expected != actual:
                raise InternalInconsistencyError(
                    witness={
                        "values": list(values),
                        "polynomial": expected,
                        "recursion": actual,
                    }
                )

    # evaluation

    def _certified_star_term(self, fan: Fan, g: PLFunction, ray: int) -> int:
        return self.chi(restrict_to_star(g, (ray,)), star_certified=True)

    def _raw_star_term(self, fan: Fan, g: PLFunction, ray: int) -> int:
        star = star_fan(fan, (ray,))
        return self.walk(
            star.fan,
            restrict_to_star(g, (ray,)).values,
            self._raw_star_term,
        )

    def walk(
        self,
        fan: Fan,
        values: Sequence[int],
        star_term: StarTerm,
        reference_cone: Cone | None = None,
        ray_order: Sequence[int] | None = None,
    ) -> int:
        """
        Evaluate the defining recursion.

        ``values`` is first normalised to vanish on ``reference_cone``
        (default: the fan's reference cone); then the least nonzero ray in
        ``ray_order`` is moved one step towards zero, adding or subtracting
        ``star_term`` at the function on the positive side of the step.
        """
        if fan.dim == 0:
            return 1
        f = PLFunction(fan, values)
        cone = fan.reference_cone if reference_cone is None else reference_cone
        m = agreeing_linear_function(f, cone)
        g = [v - pairing(m, u) for v, u in zip(values, fan.rays)]
        order = range(len(g)) if ray_order is None else ray_order
        total = 1
        while True:
            ray = next((r for r in order if g[r]), None)
            if ray is None:
                return total
            if g[ray] > 0:
                total += star_term(fan, PLFunction(fan, g), ray)
                g[ray] -= 1
            else:
                g[ray] += 1
                total -= star_term(fan, PLFunction(fan, g), ray)

    def chi(
        self,
        f: PLFunction,
        *,
        acknowledge_choice_dependence: bool = False,
        reference_cone: Cone | None = None,
        ray_order: Sequence[int] | None = None,
        star_certified: bool = False,
    ) -> int:
        fan = f.fan
        fan.require_unimodular()
        if fan.dim == 0:
            return 1
        if acknowledge_choice_dependence:
            return self.walk(
                fan, f.values, self._raw_star_term, reference_cone, ray_order
            )
        if not star_certified:
            outcome = self.certify(fan)
            if isinstance(outcome, EhrhartFailure):
                logger.warning("refusing to evaluate on a non-Ehrhart fan")
                raise outcome.as_error()
        if reference_cone is not None or ray_order is not None:
            return self.walk(
                fan,
                f.values,
                self._certified_star_term,
                reference_cone,
                ray_order,
            )
        cache_key = f"chi:{canonical_class_rep(f).key}"
        value = self.cache.get(cache_key)
        if value is None:
            value = self.walk(fan, f.values, self._certified_star_term)
            self.cache.set(cache_key, value, None)
        return value

    def polynomial(self, fan: Fan) -> IVPoly:
        outcome = self.certify(fan)
        if isinstance(outcome, EhrhartFailure):
            raise outcome.as_error()
        return outcome.polynomial

    # volume

    def volume(self, f: PLFunction) -> int:
        fan = f.fan
        report = is_balanced(fan)
        if not report:
            raise NotBalancedError(witness=report.to_json())
        return self._volume(f)

    def _volume(self, f: PLFunction) -> int:
        fan = f.fan
        if fan.dim == 0:
            return 1
        cache_key = f"volume:{canonical_class_rep(f).key}"
        value = self.cache.get(cache_key)
        if value is not None:
            return value
        m = agreeing_linear_function(f, fan.reference_cone)
        g = PLFunction(
            fan, [v - pairing(m, u) for v, u in zip(f.values, fan.rays)]
        )
        value = sum(
            g.values[ray] * self._volume(restrict_to_star(g, (ray,)))
            for ray in range(len(fan.rays))
            if g.values[ray]
        )
        self.cache.set(cache_key, value, None)
        return value


@lru_cache(maxsize=1)
def default_engine() -> EhrhartEngine:
    return EhrhartEngine()


def eval_chi(
    f: PLFunction,
    *,
    acknowledge_choice_dependence: bool = False,
    reference_cone: Cone | None = None,
    ray_order: Sequence[int] | None = None,
) -> int:
    return default_engine().chi(
        f,
        acknowledge_choice_dependence=acknowledge_choice_dependence,
        reference_cone=reference_cone,
        ray_order=ray_order,
    )


def is_ehrhart(fan: Fan) -> EhrhartCertificate | EhrhartFailure:
    return default_engine().certify(fan)


def ehrhart_polynomial(fan: Fan) -> IVPoly:
    return default_engine().polynomial(fan)


def volume_eval(f: PLFunction) -> int:
    return default_engine().volume(f)
