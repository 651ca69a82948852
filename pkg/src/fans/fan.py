"""
Pointed rational simplicial fans.

A fan is stored as a list of primitive ray generators and the inclusion
maximal cones, each a sorted tuple of ray indices. Faces, ridge incidence
and star fans are derived lazily and cached on the (immutable) value.
"""

import hashlib
import itertools
import json
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from django.conf import settings

from core.exceptions import (
    BadIntersectionError,
    ConeNotInFanError,
    DependentVectorsError,
    DuplicateRayError,
    InvalidFanError,
    NonPrimitiveRayError,
    NotPureError,
    NotSimplicialError,
    NotUnimodularError,
)
from lattice import rational
from lattice.linalg import (
    IntMatrix,
    LatticeVector,
    complete_to_unimodular_basis,
    hermite_normal_form,
    is_unimodular_set,
    primitive_vector,
    quotient_projection,
)

logger = logging.getLogger(__name__)

Cone = tuple[int, ...]


def as_cone(indices: Iterable[int]) -> Cone:
    cone = tuple(sorted(int(i) for i in indices))
    if len(set(cone)) != len(cone):
        raise InvalidFanError("repeated ray index in cone", witness=cone)
    return cone


@dataclass(frozen=True)
class StellarRecord:
    """How a fan arose as the stellar subdivision of ``coarse`` at ``cone``."""

    coarse: "Fan"
    cone: Cone
    new_ray: int


class Fan:
    """
    A simplicial fan in Z^ambient_dim.

    ``maximal_cones`` are sorted lexicographically; the origin-only fan has
    the single maximal cone ``()``. Equality and hashing use ``key``, a
    digest of the ambient dimension, the ray list and the maximal cones.
    """

    def __init__(
        self,
        ambient_dim: int,
        rays: Iterable[Sequence[int]],
        maximal_cones: Iterable[Iterable[int]],
        subdivision_of: StellarRecord | None = None,
    ):
        self.ambient_dim = int(ambient_dim)
        self.rays: tuple[LatticeVector, ...] = tuple(
            tuple(int(x) for x in ray) for ray in rays
        )
        cones = {as_cone(c) for c in maximal_cones} or {()}
        maximal = [
            c
            for c in cones
            if not any(set(c) < set(other) for other in cones)
        ]
        self.maximal_cones: tuple[Cone, ...] = tuple(sorted(maximal))
        self.subdivision_of = subdivision_of

    def __repr__(self):
        return (
            f"Fan(ambient_dim={self.ambient_dim}, rays={list(self.rays)}, "
            f"maximal_cones={list(self.maximal_cones)})"
        )

    def __eq__(self, other):
        return isinstance(other, Fan) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @cached_property
    def key(self) -> str:
        payload = json.dumps(
            [self.ambient_dim, self.rays, self.maximal_cones],
            separators=(",", ":"),
        )
        return hashlib.sha1(payload.encode()).hexdigest()

    @cached_property
    def cones(self) -> frozenset[Cone]:
        faces: set[Cone] = set()
        for cone in self.maximal_cones:
            for size in range(len(cone) + 1):
                faces.update(itertools.combinations(cone, size))
        return frozenset(faces)

    @cached_property
    def star_cache(self) -> dict:
        return {}

    @property
    def dim(self) -> int:
        return max(len(c) for c in self.maximal_cones)

    @property
    def is_pure(self) -> bool:
        return len({len(c) for c in self.maximal_cones}) == 1

    @cached_property
    def is_unimodular(self) -> bool:
        try:
            return all(
                is_unimodular_set([self.rays[i] for i in cone])
                for cone in self.maximal_cones
            )
        except DependentVectorsError:
            return False

    @cached_property
    def reference_cone(self) -> Cone:
        """Lexicographically least cone of maximal dimension."""
        return min(c for c in self.maximal_cones if len(c) == self.dim)

    def cones_of_dim(self, k: int) -> list[Cone]:
        return sorted(c for c in self.cones if len(c) == k)

    def cones_containing(self, cone: Sequence[int]) -> list[Cone]:
        base = set(cone)
        return sorted(c for c in self.cones if base <= set(c))

    def maximal_cones_containing(self, cone: Sequence[int]) -> list[Cone]:
        base = set(cone)
        return [c for c in self.maximal_cones if base <= set(c)]

    def neighbor_rays(self, cone: Sequence[int]) -> list[int]:
        """Rays of cones containing ``cone``, excluding its own rays."""
        return sorted(
            {i for c in self.maximal_cones_containing(cone) for i in c}
            - set(cone)
        )

    def ridge_map(self) -> dict[Cone, list[Cone]]:
        """Codimension-one faces of maximal cones, with their cofaces."""
        ridges: dict[Cone, list[Cone]] = {}
        for cone in self.maximal_cones:
            for ridge in itertools.combinations(cone, len(cone) - 1):
                ridges.setdefault(ridge, []).append(cone)
        return ridges

    def ray_sum(self, cone: Sequence[int]) -> LatticeVector:
        return tuple(
            sum(self.rays[i][k] for i in cone)
            for k in range(self.ambient_dim)
        )

    def require_cone(self, cone: Iterable[int]) -> Cone:
        cone = as_cone(cone)
        if cone not in self.cones:
            raise ConeNotInFanError(witness=list(cone))
        return cone

    def require_unimodular(self) -> None:
        if not self.is_unimodular:
            raise NotUnimodularError("fan is not unimodular")

    def to_json(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "rays": [list(r) for r in self.rays],
            "maximal_cones": [list(c) for c in self.maximal_cones if c],
        }


@dataclass(frozen=True)
class StarFan:
    """
    The star fan of a cone, living in the quotient lattice.

    ``ray_lift[s]`` is the parent ray whose image is star ray ``s``;
    ``projection`` maps the parent lattice onto the quotient lattice;
    ``section_basis``/``dual_basis`` are the basis completion of the cone.
    """

    fan: Fan
    cone: Cone
    ray_lift: tuple[int, ...]
    projection: IntMatrix
    section_basis: IntMatrix
    dual_basis: IntMatrix


def cone_contains(
    generators: Sequence[Sequence[int]], point: Sequence[int | Fraction]
) -> bool:
    """Exact membership of ``point`` in the cone spanned by independent
    ``generators``."""
    if not generators:
        return not any(point)
    columns = [
        [g[i] for g in generators] for i in range(len(generators[0]))
    ]
    coefficients = rational.solve(columns, point)
    if coefficients is None:
        return False
    return all(c >= 0 for c in coefficients)


def _check_intersection(fan: Fan, first: Cone, second: Cone) -> None:
    shared = set(first) & set(second)
    own = [i for i in first if i not in shared]
    other = [i for i in second if i not in shared]
    if not own and not other:
        return
    # a·first - b·second = 0, non-shared weight 1, a, b >= 0
    columns = [fan.rays[i] for i in first] + [
        tuple(-x for x in fan.rays[i]) for i in second
    ]
    rows = [
        [col[k] for col in columns] for k in range(fan.ambient_dim)
    ]
    rows.append(
        [int(i not in shared) for i in first]
        + [int(i not in shared) for i in second]
    )
    rhs = [0] * fan.ambient_dim + [1]
    if rational.lp_feasible(rows, rhs) is not None:
        raise BadIntersectionError(witness=[list(first), list(second)])


def build_fan(
    ambient_dim: int,
    rays: Sequence[Sequence[int]],
    maximal_cones: Sequence[Iterable[int]],
    require_unimodular: bool = True,
    check_intersections: bool = True,
) -> Fan:
    """
    Validate fan data and return the fan.

    Validation:
    - every ray has ``ambient_dim`` coordinates, is primitive and distinct;
    - every cone index refers to a ray and every ray lies in some cone;
    - every cone is simplicial (independent generators);
    - with ``require_unimodular``, every cone is unimodular;
    - with ``check_intersections``, any two maximal cones meet in their
      common face (exact linear programming).
    """
    rays = [tuple(int(x) for x in ray) for ray in rays]
    seen: dict[LatticeVector, int] = {}
    for index, ray in enumerate(rays):
        if len(ray) != ambient_dim:
            raise InvalidFanError(
                "ray has the wrong number of coordinates",
                witness={"ray": index},
            )
        if not any(ray) or primitive_vector(ray) != ray:
            raise NonPrimitiveRayError(witness={"ray": index})
        if ray in seen:
            raise DuplicateRayError(witness={"rays": [seen[ray], index]})
        seen[ray] = index

    cones = [as_cone(c) for c in maximal_cones]
    used: set[int] = set()
    for cone in cones:
        if any(i < 0 or i >= len(rays) for i in cone):
            raise InvalidFanError(
                "cone refers to an unknown ray", witness=list(cone)
            )
        used.update(cone)
    if used != set(range(len(rays))):
        raise InvalidFanError(
            "ray belongs to no cone",
            witness=sorted(set(range(len(rays))) - used),
        )

    fan = Fan(ambient_dim, rays, cones)
    for cone in fan.maximal_cones:
        generators = [rays[i] for i in cone]
        if generators and rational.rank(generators) < len(generators):
            raise NotSimplicialError(witness=list(cone))
        if require_unimodular and not is_unimodular_set(generators):
            raise NotUnimodularError(witness=list(cone))
    if check_intersections:
        for first, second in itertools.combinations(fan.maximal_cones, 2):
            _check_intersection(fan, first, second)
    logger.debug(
        "built fan %s: %d rays, %d maximal cones",
        fan.key[:8],
        len(rays),
        len(fan.maximal_cones),
    )
    return fan


def fan_from_json(document: dict, require_unimodular: bool = True) -> Fan:
    return build_fan(
        document["ambient_dim"],
        document["rays"],
        document["maximal_cones"],
        require_unimodular=require_unimodular,
    )


def star_fan(fan: Fan, cone: Iterable[int]) -> StarFan:
    cone = fan.require_cone(cone)
    fan.require_unimodular()
    cached = fan.star_cache.get(cone)
    if cached is not None:
        return cached

    basis, dual = complete_to_unimodular_basis(
        [fan.rays[i] for i in cone], fan.ambient_dim
    )
    projection = IntMatrix.from_rows(dual.rows[len(cone):], fan.ambient_dim)
    lift = fan.neighbor_rays(cone)
    index = {parent: s for s, parent in enumerate(lift)}
    images = [primitive_vector(projection.apply(fan.rays[i])) for i in lift]
    star_cones = [
        [index[i] for i in c if i not in cone]
        for c in fan.maximal_cones_containing(cone)
    ]
    star = Fan(fan.ambient_dim - len(cone), images, star_cones)
    if not star.is_unimodular:
        raise NotUnimodularError(
            "star fan of a unimodular fan must be unimodular",
            witness=list(cone),
        )
    result = StarFan(star, cone, tuple(lift), projection, basis, dual)
    fan.star_cache[cone] = result
    return result


def _sample_points(n: int) -> list[tuple[Fraction, ...]]:
    points = []
    for i in range(n):
        for sign in (1, -1):
            points.append(
                tuple(Fraction(sign * int(i == j)) for j in range(n))
            )
    rng = random.Random(settings.EHRFAN_SAMPLE_SEED + n)
    while len(points) < 3 * n + 1:
        point = tuple(
            Fraction(rng.randint(-97, 97), rng.randint(1, 13))
            for _ in range(n)
        )
        if any(point):
            points.append(point)
    return points


def is_complete(fan: Fan) -> bool:
    """
    Decide whether the support of ``fan`` is all of R^n.

    The fan must be pure of full dimension, every ridge must lie in exactly
    two maximal cones, the dual graph must be connected and a fixed set of
    sample points must be covered.
    """
    n = fan.ambient_dim
    if n == 0:
        return True
    if not fan.is_pure or fan.dim != n:
        return False
    ridges = fan.ridge_map()
    if any(len(cofaces) != 2 for cofaces in ridges.values()):
        return False

    adjacency: dict[Cone, set[Cone]] = {c: set() for c in fan.maximal_cones}
    for first, second in ridges.values():
        adjacency[first].add(second)
        adjacency[second].add(first)
    reached = {fan.maximal_cones[0]}
    frontier = [fan.maximal_cones[0]]
    while frontier:
        for nxt in adjacency[frontier.pop()] - reached:
            reached.add(nxt)
            frontier.append(nxt)
    if len(reached) != len(fan.maximal_cones):
        return False

    generators = {
        c: [fan.rays[i] for i in c] for c in fan.maximal_cones
    }
    for point in _sample_points(n):
        if not any(cone_contains(g, point) for g in generators.values()):
            logger.debug("sample point %s not covered", point)
            return False
    return True


@dataclass(frozen=True)
class BalanceReport:
    balanced: bool
    ridge: Cone | None = None
    residual: LatticeVector | None = None

    def __bool__(self):
        return self.balanced

    def to_json(self) -> dict:
        return {
            "balanced": self.balanced,
            "ridge": None if self.ridge is None else list(self.ridge),
            "residual": (
                None if self.residual is None else list(self.residual)
            ),
        }


def is_balanced(fan: Fan) -> BalanceReport:
    """
    Check that around every ridge the sum of the opposite generators lies
    in the span of the ridge. The residual is the image of that sum in the
    quotient lattice of the ridge.
    """
    if not fan.is_pure:
        raise NotPureError()
    fan.require_unimodular()
    if fan.dim == 0:
        return BalanceReport(True)
    for ridge, cofaces in sorted(fan.ridge_map().items()):
        opposite = [next(i for i in c if i not in ridge) for c in cofaces]
        total = fan.ray_sum(opposite)
        projection = quotient_projection(
            [fan.rays[i] for i in ridge], fan.ambient_dim
        )
        residual = projection.apply(total)
        if any(residual):
            logger.debug("fan %s unbalanced at %s", fan.key[:8], ridge)
            return BalanceReport(False, ridge, residual)
    return BalanceReport(True)


def _check_subdivision_support(
    coarse: Fan, fine: Fan, cone: Cone, new_ray: int
) -> None:
    for sigma in coarse.maximal_cones_containing(cone):
        outer = [coarse.rays[i] for i in sigma]
        pieces = [
            c
            for c in fine.maximal_cones
            if new_ray in c and set(c) - {new_ray} <= set(sigma)
        ]
        if len(pieces) != len(cone):
            raise InvalidFanError(
                "subdivision lost a cone", witness=list(sigma)
            )
        samples = [fine.ray_sum(sigma)]
        for piece in pieces:
            samples.append(fine.ray_sum(piece))
            if not cone_contains(outer, fine.ray_sum(piece)):
                raise InvalidFanError(
                    "subdivided cone leaves its parent",
                    witness=list(piece),
                )
        for point in samples:
            if not any(
                cone_contains([fine.rays[i] for i in p], point)
                for p in pieces
            ):
                raise InvalidFanError(
                    "subdivision does not cover its parent",
                    witness=list(sigma),
                )


def stellar_subdivision(fan: Fan, cone: Iterable[int]) -> tuple[Fan, int]:
    """
    Subdivide ``fan`` at ``cone`` by the ray through the sum of its
    generators. The new ray is appended to the ray list; subdividing at a
    ray returns an equal fan and that ray's index.
    """
    cone = fan.require_cone(cone)
    if not cone:
        raise ConeNotInFanError(
            "cannot subdivide at the origin cone", witness=[]
        )
    fan.require_unimodular()
    if len(cone) == 1:
        record = StellarRecord(fan, cone, cone[0])
        return (
            Fan(fan.ambient_dim, fan.rays, fan.maximal_cones, record),
            cone[0],
        )

    new_ray = len(fan.rays)
    maximal: list[Cone] = []
    for sigma in fan.maximal_cones:
        if set(cone) <= set(sigma):
            for rho in cone:
                maximal.append(as_cone((set(sigma) - {rho}) | {new_ray}))
        else:
            maximal.append(sigma)
    fine = Fan(
        fan.ambient_dim,
        fan.rays + (fan.ray_sum(cone),),
        maximal,
        StellarRecord(fan, cone, new_ray),
    )
    if not fine.is_unimodular:
        raise NotUnimodularError(
            "stellar subdivision must stay unimodular", witness=list(cone)
        )
    _check_subdivision_support(fan, fine, cone, new_ray)
    logger.debug(
        "subdivided fan %s at %s into %s", fan.key[:8], cone, fine.key[:8]
    )
    return fine, new_ray


def product_fan(first: Fan, second: Fan) -> Fan:
    first.require_unimodular()
    second.require_unimodular()
    n1, n2 = first.ambient_dim, second.ambient_dim
    rays = [ray + (0,) * n2 for ray in first.rays]
    rays += [(0,) * n1 + ray for ray in second.rays]
    offset = len(first.rays)
    cones = [
        c1 + tuple(i + offset for i in c2)
        for c1 in first.maximal_cones
        for c2 in second.maximal_cones
    ]
    return Fan(n1 + n2, rays, cones)


def projective_fan(k: int) -> Fan:
    """Normal fan of the standard k-simplex."""
    if k < 0:
        raise InvalidFanError("dimension must be nonnegative", witness=k)
    if k == 0:
        return Fan(0, [], [])
    rays = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    rays.append(tuple(-1 for _ in range(k)))
    return Fan(k, rays, itertools.combinations(range(k + 1), k))


@dataclass(frozen=True)
class FanIsomorphism:
    """
    A ray bijection that carries cones onto cones and linear functions onto
    linear functions. ``transform`` is an integral matrix ``X`` with
    ``source ray · X = target ray`` when one is found.
    """

    ray_map: tuple[int, ...]
    transform: IntMatrix | None


def linear_lattice_hnf(fan: Fan, order: Sequence[int] | None = None):
    """
    Hermite basis of the lattice of linear functions restricted to the rays.

    Row j of the input is the j-th coordinate of every ray (in ``order``).
    Returns the nonzero HNF rows together with the matching transform rows.
    """
    order = range(len(fan.rays)) if order is None else order
    values = IntMatrix.from_rows(
        [[fan.rays[r][j] for r in order] for j in range(fan.ambient_dim)],
        len(order),
    )
    h, u = hermite_normal_form(values)
    keep = [i for i, row in enumerate(h.rows) if any(row)]
    return (
        tuple(h.rows[i] for i in keep),
        tuple(u.rows[i] for i in keep),
    )


def lattice_isomorphism(
    source: Fan, target: Fan, ray_map: Sequence[int]
) -> FanIsomorphism | None:
    """
    Check that ``ray_map`` (source ray → target ray) identifies the fans.

    Returns ``None`` when the cone structures or the linear-function lattices
    do not correspond.
    """
    ray_map = tuple(ray_map)
    if len(source.rays) != len(target.rays) or sorted(ray_map) != list(
        range(len(target.rays))
    ):
        return None
    mapped = {as_cone(ray_map[i] for i in c) for c in source.maximal_cones}
    if mapped != set(target.maximal_cones):
        return None
    if linear_lattice_hnf(source)[0] != linear_lattice_hnf(target, ray_map)[0]:
        return None

    transform = None
    if source.rays:
        columns = []
        for j in range(target.ambient_dim):
            column = rational.solve(
                source.rays, [target.rays[r][j] for r in ray_map]
            )
            if column is None:
                break
            columns.append(column)
        else:
            if all(x.denominator == 1 for col in columns for x in col):
                transform = IntMatrix.from_rows(
                    [
                        [int(col[i]) for col in columns]
                        for i in range(source.ambient_dim)
                    ],
                    target.ambient_dim,
                )
    return FanIsomorphism(ray_map, transform)
