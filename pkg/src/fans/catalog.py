"""Named fans used throughout the test-suite and the sample data."""

import random

from fans.fan import Fan, build_fan, stellar_subdivision


def square_fan() -> Fan:
    """The four closed quadrants, rays e1, e2, -e1, -e2."""
    return build_fan(
        2,
        [(1, 0), (0, 1), (-1, 0), (0, -1)],
        [(0, 1), (1, 2), (2, 3), (3, 0)],
    )


def pentagon_fan() -> Fan:
    """
    The square fan with the first quadrant split along (1, 1).

    Rays in order (1,0), (1,1), (0,1), (-1,0), (0,-1); the all-ones
    function has a pentagon as its polytope.
    """
    return build_fan(
        2,
        [(1, 0), (1, 1), (0, 1), (-1, 0), (0, -1)],
        [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)],
    )


def quadrant_fan() -> Fan:
    """A single two-dimensional cone and its faces."""
    return build_fan(2, [(1, 0), (0, 1)], [(0, 1)])


def subdivided_quadrant_fan() -> tuple[Fan, int]:
    """The first quadrant subdivided at itself, with the new ray index."""
    return stellar_subdivision(quadrant_fan(), (0, 1))


def hirzebruch_fan(a: int = 1) -> Fan:
    return build_fan(
        2,
        [(1, 0), (0, 1), (-1, a), (0, -1)],
        [(0, 1), (1, 2), (2, 3), (3, 0)],
    )


def line_fan(direction: tuple[int, ...] = (1,)) -> Fan:
    """Complete one-dimensional fan: the rays through u and -u."""
    return build_fan(
        len(direction),
        [direction, tuple(-x for x in direction)],
        [(0,), (1,)],
    )


def torsion_fan() -> Fan:
    """Two rays (1,0), (1,2): every cone unimodular, rays not summing to
    zero, and a piecewise-linear function of order two modulo linear
    ones."""
    return build_fan(2, [(1, 0), (1, 2)], [(0,), (1,)])


def balanced_non_ehrhart_fan() -> Fan:
    """
    A balanced unimodular surface fan in Z^4 with 14 rays and 18 cones
    that is not Ehrhart.
    """
    rays = [
        (1, 0, 0, 0),
        (0, 1, 0, 0),
        (0, 0, 1, 0),
        (0, 0, 0, 1),
        (0, -1, 0, 0),
        (0, 0, -1, 0),
        (0, 0, 0, -1),
        (0, 1, 1, 1),
        (1, 0, -1, 1),
        (1, 1, 0, -1),
        (1, -1, 1, 0),
        (-1, 0, 1, -1),
        (-1, -1, 0, 1),
        (-1, 1, -1, 0),
    ]
    cones = [
        (0, 8),
        (0, 9),
        (0, 10),
        (1, 7),
        (1, 9),
        (1, 13),
        (2, 7),
        (2, 10),
        (2, 11),
        (3, 7),
        (3, 8),
        (3, 12),
        (5, 8),
        (6, 9),
        (4, 10),
        (4, 13),
        (5, 11),
        (6, 12),
    ]
    return build_fan(4, rays, cones)


def random_subdivision(
    fan: Fan, rng: random.Random, steps: int, dimension: int = 2
) -> Fan:
    """Apply ``steps`` stellar subdivisions at randomly chosen cones of
    the given dimension."""
    for _ in range(steps):
        cone = rng.choice(fan.cones_of_dim(dimension))
        fan, _ = stellar_subdivision(fan, cone)
    return fan
