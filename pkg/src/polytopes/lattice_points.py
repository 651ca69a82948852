"""
Lattice polytopes of convex piecewise-linear functions.

For a complete unimodular fan and a PL function ``f`` the polytope is
``P_f = {m : ⟨m, u_ρ⟩ <= f(u_ρ) for every ray ρ}``. Counting is done by
enumerating the integer box around the vertices, so the module is meant
for small examples and cross-checks of the Ehrhart engine.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from django.conf import settings

from core.exceptions import (
    FanMismatchError,
    NotCompleteError,
    NotConvexError,
    ShellLimitError,
    UnboundedPolytopeError,
)
from fans.fan import Fan, is_complete
from lattice import rational
from lattice.linalg import LatticeVector, pairing
from plfunctions.functions import (
    PLFunction,
    agreeing_linear_function,
    is_convex,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Inequality:
    """``⟨x, normal⟩ <= bound``."""

    normal: LatticeVector
    bound: int

    def value(self, point: Sequence[int]) -> int:
        return pairing(point, self.normal)

    def holds(self, point: Sequence[int], strict: bool = False) -> bool:
        value = self.value(point)
        return value < self.bound if strict else value <= self.bound


class HPolytope:
    def __init__(
        self,
        ambient_dim: int,
        inequalities: Iterable[Inequality],
        vertices: Iterable[Sequence] | None = None,
    ):
        self.ambient_dim = ambient_dim
        self.inequalities = tuple(inequalities)
        self._vertices = (
            None if vertices is None else tuple(tuple(v) for v in vertices)
        )

    def __repr__(self):
        return (
            f"HPolytope(ambient_dim={self.ambient_dim}, "
            f"inequalities={len(self.inequalities)})"
        )

    @classmethod
    def from_json(cls, document: dict) -> "HPolytope":
        inequalities = [
            Inequality(
                tuple(int(x) for x in row["normal"]), int(row["bound"])
            )
            for row in document["inequalities"]
        ]
        if not inequalities:
            raise UnboundedPolytopeError("no inequalities given")
        return cls(len(inequalities[0].normal), inequalities)

    def to_json(self) -> dict:
        return {
            "inequalities": [
                {"normal": list(row.normal), "bound": row.bound}
                for row in self.inequalities
            ]
        }

    def contains(self, point: Sequence[int], strict: bool = False) -> bool:
        return all(row.holds(point, strict) for row in self.inequalities)

    def is_bounded(self) -> bool:
        """No nonzero direction ``d`` has ``⟨d, normal⟩ <= 0`` for all rows."""
        n, k = self.ambient_dim, len(self.inequalities)
        rows = [
            list(row.normal)
            + [-x for x in row.normal]
            + [int(i == j) for j in range(k)]
            for i, row in enumerate(self.inequalities)
        ]
        for axis in range(n):
            unit = [int(j == axis) for j in range(n)]
            pinned = unit + [-x for x in unit] + [0] * k
            for sign in (1, -1):
                if rational.lp_feasible(
                    rows + [pinned], [0] * k + [sign]
                ) is not None:
                    return False
        return True

    @property
    def vertices(self) -> tuple[tuple, ...]:
        """
        Vertices, computed on first use by solving every nonsingular
        ``ambient_dim``-subset of the rows as equalities.
        """
        if self._vertices is None:
            if not self.is_bounded():
                raise UnboundedPolytopeError(witness=self.to_json())
            found = []
            for subset in itertools.combinations(
                self.inequalities, self.ambient_dim
            ):
                normals = [row.normal for row in subset]
                if rational.rank(normals) < self.ambient_dim:
                    continue
                point = rational.solve(normals, [row.bound for row in subset])
                if point not in found and self.contains(point):
                    found.append(point)
            self._vertices = tuple(found)
        return self._vertices

    def bounding_box(self) -> list[range]:
        vertices = self.vertices
        if not vertices:
            return []
        return [
            range(
                math.ceil(min(Fraction(v[i]) for v in vertices)),
                math.floor(max(Fraction(v[i]) for v in vertices)) + 1,
            )
            for i in range(self.ambient_dim)
        ]

    def lattice_points(self, strict: bool = False) -> Iterator[LatticeVector]:
        box = self.bounding_box()
        if not box and self.ambient_dim:
            return
        for point in itertools.product(*box):
            if self.contains(point, strict):
                yield point


@dataclass(frozen=True)
class SubfanSelector:
    """The cones on which ``m <= f``."""

    f: PLFunction
    m: LatticeVector

    def admits(self, ray: int) -> bool:
        return pairing(self.m, self.f.fan.rays[ray]) <= self.f.values[ray]

    def signed_count(self) -> int:
        allowed = {r for r in range(len(self.f.fan.rays)) if self.admits(r)}
        return sum(
            (-1) ** len(cone)
            for cone in self.f.fan.cones
            if allowed.issuperset(cone)
        )


def polytope_of(f: PLFunction, vertices=None) -> HPolytope:
    fan = f.fan
    return HPolytope(
        fan.ambient_dim,
        [Inequality(u, v) for u, v in zip(fan.rays, f.values)],
        vertices,
    )


def virtual_vertices(f: PLFunction) -> list[LatticeVector]:
    """The linear functions agreeing with ``f`` on each maximal cone."""
    found = []
    for cone in f.fan.maximal_cones:
        m = agreeing_linear_function(f, cone)
        if m not in found:
            found.append(m)
    return found


def polytope_from_pl(
    f: PLFunction,
) -> tuple[HPolytope, list[LatticeVector]]:
    """
    The polytope of a convex function on a complete fan and its vertices.

    Validation:
    - the fan must be complete (``NOT_COMPLETE``)
    - ``f`` must be convex (``NOT_CONVEX``)
    """
    if not is_convex(f):
        raise NotConvexError(witness=f.to_json())
    vertices = virtual_vertices(f)
    return polytope_of(f, vertices), vertices


def count_lattice_points(polytope: HPolytope, interior: bool = False) -> int:
    return sum(1 for _ in polytope.lattice_points(strict=interior))


def count_face_points(polytope: HPolytope, index: int) -> int:
    """Lattice points of ``polytope`` on which row ``index`` is tight."""
    row = polytope.inequalities[index]
    return sum(
        1
        for point in polytope.lattice_points()
        if row.value(point) == row.bound
    )


def chi_c_subfan(fan: Fan, f: PLFunction, m: Sequence[int]) -> int:
    """Signed count of the cones of ``fan`` on which ``m <= f``."""
    if f.fan != fan:
        raise FanMismatchError("function lives on another fan")
    return SubfanSelector(f, tuple(m)).signed_count()


def _shell(box: list[range]) -> Iterator[tuple[int, ...]]:
    """Integer points of ``box`` grown by one on every side, outside
    ``box``."""
    grown = [range(r.start - 1, r.stop + 1) for r in box]
    for point in itertools.product(*grown):
        if any(x not in r for x, r in zip(point, box)):
            yield point


def chi_via_alternating_sum(
    f: PLFunction, max_shells: int | None = None
) -> int:
    """
    Evaluate the Ehrhart functional of a complete fan as
    ``(-1)^n Σ_m Σ_{σ : m <= f on σ} (-1)^dim σ``.

    Notes:
    - The sum starts on the box around the linear functions of the
      maximal cones and grows one shell at a time until two consecutive
      shells contribute nothing.
    - Exceeding ``max_shells`` (default ``EHRFAN_MAX_SHELLS``) raises
      ``SHELL_LIMIT_EXCEEDED``.
    """
    fan = f.fan
    if not is_complete(fan):
        raise NotCompleteError()
    if max_shells is None:
        max_shells = settings.EHRFAN_MAX_SHELLS
    n = fan.ambient_dim
    vertices = virtual_vertices(f)
    box = [
        range(min(v[i] for v in vertices), max(v[i] for v in vertices) + 1)
        for i in range(n)
    ]
    total = sum(
        SubfanSelector(f, point).signed_count()
        for point in itertools.product(*box)
    )
    if n == 0:
        return total

    quiet = 0
    shells = 0
    while quiet < 2:
        if shells >= max_shells:
            raise ShellLimitError(
                witness={"max_shells": max_shells, "values": list(f.values)}
            )
        contribution = sum(
            SubfanSelector(f, point).signed_count() for point in _shell(box)
        )
        total += contribution
        quiet = quiet + 1 if contribution == 0 else 0
        box = [range(r.start - 1, r.stop + 1) for r in box]
        shells += 1
    logger.debug("alternating sum stabilised after %d shells", shells)
    return (-1) ** n * total
