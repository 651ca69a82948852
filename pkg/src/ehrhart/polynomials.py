"""
Integer-valued polynomials in the binomial basis.

A polynomial is stored as integer coefficients ``c_α`` of the products
``Π binom(x_v, α_v)``; an exponent multi-index is a sorted tuple of
``(variable, exponent)`` pairs with positive exponents. Every polynomial
taking integer values on the integer grid has integer coefficients here.
"""

import itertools
import logging
import math
from collections import defaultdict
from typing import Callable, Iterable, Iterator, Mapping

from core.exceptions import DegreeBoundError

logger = logging.getLogger(__name__)

Alpha = tuple[tuple[int, int], ...]


def binomial(x: int, k: int) -> int:
    """Generalised binomial coefficient ``x choose k`` for any integer x."""
    if k < 0:
        return 0
    if x >= 0:
        return math.comb(x, k)
    return (-1) ** k * math.comb(k - x - 1, k)


def make_alpha(exponents: Mapping[int, int]) -> Alpha:
    return tuple(sorted((v, e) for v, e in exponents.items() if e))


class IVPoly:
    def __init__(
        self,
        variables: Iterable[int],
        coeffs: Mapping[Alpha, int] | None = None,
    ):
        self.variables = tuple(sorted(set(variables)))
        self.coeffs: dict[Alpha, int] = {
            alpha: int(c) for alpha, c in (coeffs or {}).items() if c
        }

    @classmethod
    def constant(cls, value: int, variables: Iterable[int] = ()) -> "IVPoly":
        return cls(variables, {(): value})

    def __repr__(self):
        return f"IVPoly({self.variables}, {self.terms()})"

    def __eq__(self, other):
        return (
            isinstance(other, IVPoly)
            and self.variables == other.variables
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.variables, tuple(self.terms())))

    def terms(self) -> list[tuple[Alpha, int]]:
        return sorted(
            self.coeffs.items(), key=lambda item: (_weight(item[0]), item[0])
        )

    @property
    def degree(self) -> int:
        return max((_weight(alpha) for alpha in self.coeffs), default=0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def _combine(self, other: "IVPoly", sign: int) -> "IVPoly":
        coeffs = defaultdict(int, self.coeffs)
        for alpha, c in other.coeffs.items():
            coeffs[alpha] += sign * c
        return IVPoly(set(self.variables) | set(other.variables), coeffs)

    def __add__(self, other: "IVPoly") -> "IVPoly":
        return self._combine(other, 1)

    def __sub__(self, other: "IVPoly") -> "IVPoly":
        return self._combine(other, -1)

    def __neg__(self) -> "IVPoly":
        return self.scale(-1)

    def scale(self, factor: int) -> "IVPoly":
        return IVPoly(
            self.variables,
            {alpha: factor * c for alpha, c in self.coeffs.items()},
        )

    def evaluate(self, point: Mapping[int, int]) -> int:
        """Value at an integer point; missing variables count as zero."""
        total = 0
        for alpha, c in self.coeffs.items():
            term = c
            for var, exponent in alpha:
                term *= binomial(point.get(var, 0), exponent)
                if not term:
                    break
            total += term
        return total

    def evaluate_values(self, values) -> int:
        """Value at the point whose coordinate for variable ``i`` is
        ``values[i]``."""
        return self.evaluate(dict(enumerate(values)))

    def shift(self, translation: Mapping[int, int]) -> "IVPoly":
        """
        The polynomial ``x ↦ P(x + t)``, re-expanded in the binomial basis
        through ``binom(x + t, a) = Σ_k binom(t, a - k) binom(x, k)``.
        """
        result: dict[Alpha, int] = defaultdict(int)
        for alpha, c in self.coeffs.items():
            factors = []
            for var, exponent in alpha:
                t = translation.get(var, 0)
                factors.append(
                    [
                        (var, k, binomial(t, exponent - k))
                        for k in range(exponent + 1)
                    ]
                )
            for combination in itertools.product(*factors):
                term = c
                shifted = []
                for var, k, weight in combination:
                    term *= weight
                    if k:
                        shifted.append((var, k))
                if term:
                    result[tuple(shifted)] += term
        return IVPoly(self.variables, result)

    def top_form(self, point: Mapping[int, int]) -> int:
        """
        ``d!`` times the degree-``d`` homogeneous part evaluated at ``point``.

        The top part of ``binom(x, a)`` is ``x^a / a!``, so the result is an
        integer.
        """
        d = self.degree
        total = 0
        for alpha, c in self.coeffs.items():
            if _weight(alpha) != d:
                continue
            term = c * math.factorial(d)
            for _, exponent in alpha:
                term //= math.factorial(exponent)
            for var, exponent in alpha:
                term *= point.get(var, 0) ** exponent
            total += term
        return total

    def to_json(self) -> dict:
        return {
            "vars": list(self.variables),
            "terms": [
                {"alpha": {str(v): e for v, e in alpha}, "c": c}
                for alpha, c in self.terms()
            ],
        }

    @classmethod
    def from_json(cls, document: dict) -> "IVPoly":
        return cls(
            document["vars"],
            {
                make_alpha({int(v): e for v, e in t["alpha"].items()}): t["c"]
                for t in document["terms"]
            },
        )


def _weight(alpha: Alpha) -> int:
    return sum(e for _, e in alpha)


def _grid(size: int, bound: int) -> Iterator[tuple[int, ...]]:
    """Points of N^size with coordinate sum at most ``bound``."""
    if size == 0:
        yield ()
        return
    for first in range(bound + 1):
        for rest in _grid(size - 1, bound - first):
            yield (first,) + rest


def binomial_expand(
    oracle: Callable[[dict[int, int]], int],
    variables: Iterable[int],
    degree_bound: int,
) -> IVPoly:
    """
    Expand an integer-valued polynomial given by values into the binomial
    basis: ``c_α`` is the iterated forward difference at the origin.

    The oracle is sampled on the simplex of points with coordinate sum at
    most ``degree_bound + 1``; a nonzero difference on the outer layer
    means the degree bound is wrong.
    """
    variables = tuple(variables)
    layer = degree_bound + 1
    points = list(_grid(len(variables), layer))
    table = {p: oracle(dict(zip(variables, p))) for p in points}
    for axis in range(len(variables)):
        differenced = {}
        for p in points:
            top = p[axis]
            total = 0
            for j in range(top + 1):
                q = p[:axis] + (j,) + p[axis + 1 :]
                total += (-1) ** (top - j) * math.comb(top, j) * table[q]
            differenced[p] = total
        table = differenced

    coeffs = {}
    for p, c in table.items():
        if not c:
            continue
        if sum(p) == layer:
            raise DegreeBoundError(
                witness={
                    "alpha": dict(zip(map(str, variables), p)),
                    "degree_bound": degree_bound,
                }
            )
        coeffs[make_alpha(dict(zip(variables, p)))] = c
    return IVPoly(variables, coeffs)
