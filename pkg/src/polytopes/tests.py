import random

from django.test import SimpleTestCase

from core.exceptions import (
    NotCompleteError,
    NotConvexError,
    ShellLimitError,
    UnboundedPolytopeError,
)
from ehrhart.services import eval_chi
from fans.catalog import (
    hirzebruch_fan,
    pentagon_fan,
    quadrant_fan,
    square_fan,
)
from fans.fan import projective_fan
from plfunctions.functions import (
    Convexity,
    PLFunction,
    constant_function,
    convexity_type,
    courant,
    is_convex,
    zero_function,
)
from polytopes.lattice_points import (
    HPolytope,
    Inequality,
    chi_c_subfan,
    chi_via_alternating_sum,
    count_face_points,
    count_lattice_points,
    polytope_from_pl,
)


def complete_fans():
    return (
        projective_fan(1),
        projective_fan(2),
        square_fan(),
        pentagon_fan(),
        hirzebruch_fan(1),
        hirzebruch_fan(2),
    )


def random_convex_function(fan, rng, strict=False):
    accepted = {Convexity.STRICTLY_CONVEX}
    if not strict:
        accepted |= {Convexity.CONVEX, Convexity.LINEAR}
    while True:
        f = PLFunction(fan, [rng.randint(-2, 3) for _ in fan.rays])
        if convexity_type(f) in accepted:
            return f


def box_polytope(low, high):
    return HPolytope(
        2,
        [
            Inequality((-1, 0), -low),
            Inequality((1, 0), high),
            Inequality((0, -1), -low),
            Inequality((0, 1), high),
        ],
    )


class PolytopeFromPLTests(SimpleTestCase):
    def test_pentagon(self):
        polytope, vertices = polytope_from_pl(
            constant_function(pentagon_fan(), 1)
        )
        self.assertEqual(
            set(vertices), {(1, 0), (0, 1), (-1, 1), (-1, -1), (1, -1)}
        )
        self.assertEqual(len(polytope.inequalities), 5)

    def test_triangle(self):
        _, vertices = polytope_from_pl(constant_function(projective_fan(2), 1))
        self.assertEqual(set(vertices), {(1, 1), (1, -2), (-2, 1)})

    def test_zero_function(self):
        _, vertices = polytope_from_pl(zero_function(pentagon_fan()))
        self.assertEqual(vertices, [(0, 0)])

    def test_validation(self):
        fan = pentagon_fan()
        with self.assertRaises(NotConvexError):
            polytope_from_pl(courant(fan, 0) - courant(fan, 2))
        with self.assertRaises(NotCompleteError):
            polytope_from_pl(zero_function(quadrant_fan()))


class CountLatticePointsTests(SimpleTestCase):
    def test_pentagon(self):
        polytope, _ = polytope_from_pl(constant_function(pentagon_fan(), 1))
        self.assertEqual(count_lattice_points(polytope), 8)
        self.assertEqual(count_lattice_points(polytope, interior=True), 1)

    def test_unit_square(self):
        square = box_polytope(0, 1)
        self.assertEqual(count_lattice_points(square), 4)
        self.assertEqual(count_lattice_points(square, interior=True), 0)
        self.assertEqual(
            set(square.vertices), {(0, 0), (1, 0), (0, 1), (1, 1)}
        )

    def test_triangle(self):
        polytope, _ = polytope_from_pl(constant_function(projective_fan(2), 1))
        self.assertEqual(count_lattice_points(polytope), 10)
        self.assertEqual(count_lattice_points(polytope, interior=True), 1)

    def test_vertices_from_inequalities(self):
        document = {
            "inequalities": [
                {"normal": [1, 0], "bound": 1},
                {"normal": [0, 1], "bound": 1},
                {"normal": [-1, -1], "bound": 1},
            ]
        }
        polytope = HPolytope.from_json(document)
        self.assertEqual(count_lattice_points(polytope), 10)
        self.assertEqual(polytope.to_json(), document)

    def test_unbounded(self):
        half_line = HPolytope(1, [Inequality((1,), 1)])
        self.assertFalse(half_line.is_bounded())
        with self.assertRaises(UnboundedPolytopeError):
            count_lattice_points(half_line)

    def test_empty(self):
        empty = HPolytope(1, [Inequality((1,), -1), Inequality((-1,), -1)])
        self.assertEqual(count_lattice_points(empty), 0)

    def test_face_points(self):
        polytope, _ = polytope_from_pl(constant_function(pentagon_fan(), 1))
        self.assertEqual(count_face_points(polytope, 1), 2)
        self.assertEqual(count_face_points(polytope, 3), 3)

    def test_sliding_a_face(self):
        rng = random.Random(41)
        checked = 0
        for fan in (pentagon_fan(), hirzebruch_fan(1), projective_fan(2)):
            for _ in range(40):
                f = PLFunction(fan, [rng.randint(0, 3) for _ in fan.rays])
                ray = rng.randrange(len(fan.rays))
                smaller = f - courant(fan, ray)
                if not (is_convex(f) and is_convex(smaller)):
                    continue
                checked += 1
                polytope, _ = polytope_from_pl(f)
                with self.subTest(fan=fan, f=f.values, ray=ray):
                    self.assertEqual(
                        count_lattice_points(polytope),
                        count_lattice_points(polytope_from_pl(smaller)[0])
                        + count_face_points(polytope, ray),
                    )
        self.assertGreater(checked, 0)


class AlternatingSumTests(SimpleTestCase):
    def test_signed_cone_counts(self):
        fan = pentagon_fan()
        self.assertEqual(chi_c_subfan(fan, zero_function(fan), (0, 0)), 1)
        ones = constant_function(fan, 1)
        self.assertEqual(chi_c_subfan(fan, ones, (0, 0)), 1)
        self.assertEqual(chi_c_subfan(fan, ones, (1, 1)), 0)
        self.assertEqual(chi_c_subfan(fan, ones, (5, -3)), 0)

    def test_pentagon(self):
        fan = pentagon_fan()
        ones = constant_function(fan, 1)
        self.assertEqual(chi_via_alternating_sum(ones), 8)
        self.assertEqual(chi_via_alternating_sum(-ones), 1)
        self.assertEqual(chi_via_alternating_sum(zero_function(fan)), 1)

    def test_reciprocity(self):
        rng = random.Random(43)
        for fan in complete_fans():
            for _ in range(30):
                f = random_convex_function(fan, rng, strict=True)
                polytope, _ = polytope_from_pl(f)
                with self.subTest(fan=fan, f=f.values):
                    self.assertEqual(
                        eval_chi(-f),
                        (-1) ** fan.ambient_dim
                        * count_lattice_points(polytope, interior=True),
                    )

    def test_three_way_agreement(self):
        rng = random.Random(42)
        for fan in complete_fans():
            for _ in range(30):
                f = random_convex_function(fan, rng)
                polytope, _ = polytope_from_pl(f)
                with self.subTest(fan=fan, f=f.values):
                    value = eval_chi(f)
                    self.assertEqual(value, count_lattice_points(polytope))
                    self.assertEqual(value, chi_via_alternating_sum(f))

    def test_alternating_sum_without_convexity(self):
        rng = random.Random(44)
        for fan in (pentagon_fan(), hirzebruch_fan(2), projective_fan(2)):
            for _ in range(10):
                f = PLFunction(fan, [rng.randint(-2, 3) for _ in fan.rays])
                with self.subTest(fan=fan, f=f.values):
                    self.assertEqual(chi_via_alternating_sum(f), eval_chi(f))

    def test_projective_space(self):
        f = constant_function(projective_fan(3), 1)
        self.assertEqual(chi_via_alternating_sum(f), eval_chi(f))

    def test_shell_limit(self):
        with self.assertRaises(ShellLimitError):
            chi_via_alternating_sum(
                constant_function(pentagon_fan(), 1), max_shells=1
            )

    def test_incomplete_fan(self):
        with self.assertRaises(NotCompleteError):
            chi_via_alternating_sum(zero_function(quadrant_fan()))
