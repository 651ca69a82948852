"""
Formal piecewise-exponential elements ``Σ c_i e^{f_i}`` on a fan.

Elements are kept as integer coefficients per PL function (by value
vector). The normal form sorts the positive and negative parts into
pointwise chains with max/min swaps and cancels what the two chains share,
so two elements are equal exactly when their normal forms coincide.
"""

import logging
from collections import Counter
from typing import Iterable

from core.exceptions import (
    FanMismatchError,
    MixedSignError,
    RefinementRequiredError,
)
from ehrhart.services import EhrhartFailure, eval_chi, is_ehrhart
from fans.fan import Fan
from plfunctions.functions import PLFunction, pointwise_max_min, zero_function

logger = logging.getLogger(__name__)

Values = tuple[int, ...]


class PEElement:
    def __init__(
        self, fan: Fan, terms: Iterable[tuple[int, PLFunction]] = ()
    ):
        self.fan = fan
        coefficients: Counter[Values] = Counter()
        for c, f in terms:
            if f.fan != fan:
                raise FanMismatchError("term lives on another fan")
            coefficients[f.values] += int(c)
        self.coefficients: dict[Values, int] = {
            values: c for values, c in coefficients.items() if c
        }

    @classmethod
    def exp(cls, f: PLFunction) -> "PEElement":
        return cls(f.fan, [(1, f)])

    @classmethod
    def one(cls, fan: Fan) -> "PEElement":
        return cls.exp(zero_function(fan))

    @classmethod
    def from_json(cls, fan: Fan, document: dict) -> "PEElement":
        return cls(
            fan,
            [
                (term["c"], PLFunction(fan, term["values"]))
                for term in document["terms"]
            ],
        )

    def __repr__(self):
        return f"PEElement({self.to_json()['terms']})"

    def __eq__(self, other):
        return (
            isinstance(other, PEElement)
            and self.fan == other.fan
            and self.coefficients == other.coefficients
        )

    @property
    def terms(self) -> list[tuple[int, PLFunction]]:
        return [
            (c, PLFunction(self.fan, values))
            for values, c in sorted(self.coefficients.items())
        ]

    def _check(self, other: "PEElement") -> None:
        if self.fan != other.fan:
            raise FanMismatchError("elements live on different fans")

    def __add__(self, other: "PEElement") -> "PEElement":
        self._check(other)
        return PEElement(self.fan, self.terms + other.terms)

    def __neg__(self) -> "PEElement":
        return PEElement(self.fan, [(-c, f) for c, f in self.terms])

    def __sub__(self, other: "PEElement") -> "PEElement":
        return self + (-other)

    def __mul__(self, other: "PEElement") -> "PEElement":
        """Exponents add: ``e^f · e^g = e^{f+g}``."""
        self._check(other)
        return PEElement(
            self.fan,
            [(a * b, f + g) for a, f in self.terms for b, g in other.terms],
        )

    def is_zero(self) -> bool:
        return not self.coefficients

    def positive_part(self) -> list[PLFunction]:
        return [f for c, f in self.terms if c > 0 for _ in range(c)]

    def negative_part(self) -> list[PLFunction]:
        return [f for c, f in self.terms if c < 0 for _ in range(-c)]

    def to_json(self) -> dict:
        return {
            "terms": [
                {"c": c, "values": list(f.values)} for c, f in self.terms
            ]
        }


def _sorted_chain(functions: list[PLFunction]) -> list[PLFunction]:
    """Bubble the list into a pointwise chain by max/min swaps."""
    chain = list(functions)
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(chain) - 1):
            first, second = chain[i], chain[i + 1]
            if all(a <= b for a, b in zip(first.values, second.values)):
                continue
            try:
                upper, lower = pointwise_max_min(first, second)
            except MixedSignError as exc:
                raise RefinementRequiredError(
                    witness={
                        "pair": [list(first.values), list(second.values)],
                        "cone": exc.witness,
                    }
                ) from exc
            chain[i], chain[i + 1] = lower, upper
            swapped = True
    return chain


def pe_normal_form(element: PEElement) -> PEElement:
    positive = Counter(
        f.values for f in _sorted_chain(element.positive_part())
    )
    negative = Counter(
        f.values for f in _sorted_chain(element.negative_part())
    )
    fan = element.fan
    terms = [
        (c, PLFunction(fan, values))
        for values, c in (positive - negative).items()
    ]
    terms += [
        (-c, PLFunction(fan, values))
        for values, c in (negative - positive).items()
    ]
    return PEElement(fan, terms)


def pe_equal(first: PEElement, second: PEElement) -> bool:
    return pe_normal_form(first - second).is_zero()


def chi_tilde(element: PEElement) -> int:
    outcome = is_ehrhart(element.fan)
    if isinstance(outcome, EhrhartFailure):
        raise outcome.as_error()
    return sum(c * eval_chi(f) for c, f in element.terms)


def verify_maxmin_relation(f: PLFunction, g: PLFunction) -> bool:
    upper, lower = pointwise_max_min(f, g)
    holds = eval_chi(f) + eval_chi(g) == eval_chi(upper) + eval_chi(lower)
    if not holds:
        logger.error("max/min relation fails for %s and %s", f, g)
    return holds
