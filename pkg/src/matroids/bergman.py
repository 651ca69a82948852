"""
Bergman fans of loopless matroids and the matroid Euler characteristic.

The lattice ``Z^E / Z·(1, ..., 1)`` is written in coordinates by dropping
the last element: ``ē_i = e_i`` for ``i < n`` and ``ē_n = -(e_0 + ... +
e_{n-1})``. Rays follow the order of ``Matroid.proper_flats``.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

from core.exceptions import (
    FanMismatchError,
    LoopsPresentError,
    ProductMatchingError,
)
from ehrhart.services import default_engine, eval_chi
from fans.fan import (
    Fan,
    FanIsomorphism,
    StarFan,
    build_fan,
    lattice_isomorphism,
    product_fan,
    star_fan,
)
from lattice.linalg import LatticeVector, primitive_vector
from matroids.matroid import Flat, Matroid
from plfunctions.functions import (
    PLFunction,
    canonical_class_rep,
    restrict_to_star,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BergmanFan:
    fan: Fan
    flats: tuple[Flat, ...]
    index: dict[Flat, int]

    def ray_of(self, flat) -> int:
        return self.index[frozenset(flat)]


def flat_vector(ground_size: int, flat: Flat) -> LatticeVector:
    n = ground_size - 1
    vector = [int(i in flat) for i in range(n)]
    if n in flat:
        vector = [x - 1 for x in vector]
    return primitive_vector(vector)


@lru_cache(maxsize=256)
def bergman_fan(matroid: Matroid) -> BergmanFan:
    """
    Validation:
    - the matroid has no loops (``LOOPS_PRESENT``)
    """
    loops = matroid.loops()
    if loops:
        raise LoopsPresentError(witness=sorted(loops))
    flats = matroid.proper_flats
    index = {flat: i for i, flat in enumerate(flats)}
    rays = [flat_vector(matroid.ground_size, flat) for flat in flats]
    cones = [
        [index[flat] for flat in chain.flats]
        for chain in matroid.maximal_chains()
    ]
    fan = build_fan(
        max(matroid.ground_size - 1, 0), rays, cones, check_intersections=False
    )
    logger.debug(
        "Bergman fan of %r: %d rays, dimension %d", matroid, len(rays), fan.dim
    )
    return BergmanFan(fan, flats, index)


@dataclass(frozen=True)
class StarProductIdentification:
    """
    The star of a Bergman fan at ``ρ_F`` identified with the product of
    the Bergman fans of the restriction and the contraction at ``F``.
    """

    flat: Flat
    star: StarFan
    restriction: Matroid
    contraction: Matroid
    product: Fan
    isomorphism: FanIsomorphism

    def split(self, g: PLFunction) -> tuple[PLFunction, PLFunction]:
        """Transport ``g`` on the star fan to a pair of functions on the
        two factors."""
        if g.fan != self.star.fan:
            raise FanMismatchError("function does not live on the star fan")
        values = [0] * len(g.values)
        for s, target in enumerate(self.isomorphism.ray_map):
            values[target] = g.values[s]
        first = bergman_fan(self.restriction).fan
        cut = len(first.rays)
        return (
            PLFunction(first, values[:cut]),
            PLFunction(bergman_fan(self.contraction).fan, values[cut:]),
        )


@lru_cache(maxsize=1024)
def star_product_isomorphism(
    matroid: Matroid, flat: Flat
) -> StarProductIdentification:
    flat = frozenset(flat)
    ambient = bergman_fan(matroid)
    star = star_fan(ambient.fan, (ambient.ray_of(flat),))
    restriction = matroid.restriction(flat)
    contraction = matroid.contraction(flat)
    first = bergman_fan(restriction)
    second = bergman_fan(contraction)
    product = product_fan(first.fan, second.fan)

    inside = sorted(flat)
    outside = sorted(matroid.ground_set - flat)
    ray_map = []
    for parent in star.ray_lift:
        other = ambient.flats[parent]
        if other < flat:
            ray_map.append(first.ray_of(inside.index(e) for e in other))
        else:
            ray_map.append(
                len(first.flats)
                + second.ray_of(outside.index(e) for e in other - flat)
            )
    isomorphism = lattice_isomorphism(star.fan, product, ray_map)
    if isomorphism is None:
        raise ProductMatchingError(
            witness={"flat": inside, "ray_map": ray_map}
        )
    return StarProductIdentification(
        flat, star, restriction, contraction, product, isomorphism
    )


def chi_matroid(
    matroid: Matroid, f: PLFunction, fast_path: bool = True
) -> int:
    """
    The Ehrhart functional of the Bergman fan at ``f``.

    With ``fast_path`` the star terms of the recursion are evaluated as
    products over the restriction and contraction at each flat; otherwise
    the Bergman fan goes through the general engine, certification
    included.
    """
    bergman = bergman_fan(matroid)
    if f.fan != bergman.fan:
        raise FanMismatchError(
            "function does not live on the Bergman fan",
            witness={"rays": len(bergman.fan.rays), "values": len(f.values)},
        )
    if not fast_path:
        return eval_chi(f)
    if bergman.fan.dim == 0:
        return 1

    def star_term(fan: Fan, g: PLFunction, ray: int) -> int:
        identification = star_product_isomorphism(
            matroid, bergman.flats[ray]
        )
        first, second = identification.split(restrict_to_star(g, (ray,)))
        return chi_matroid(
            identification.restriction, first
        ) * chi_matroid(identification.contraction, second)

    engine = default_engine()
    cache_key = f"matroid-chi:{matroid.key}:{canonical_class_rep(f).key}"
    value = engine.cache.get(cache_key)
    if value is None:
        value = engine.walk(bergman.fan, f.values, star_term)
        engine.cache.set(cache_key, value, None)
    return value
