import random

from django.test import SimpleTestCase

from core.exceptions import (
    BadIntersectionError,
    ConeNotInFanError,
    DuplicateRayError,
    NonPrimitiveRayError,
    NotUnimodularError,
)
from fans.catalog import (
    balanced_non_ehrhart_fan,
    hirzebruch_fan,
    line_fan,
    pentagon_fan,
    quadrant_fan,
    random_subdivision,
    square_fan,
    torsion_fan,
)
from fans.fan import (
    build_fan,
    cone_contains,
    fan_from_json,
    is_balanced,
    is_complete,
    lattice_isomorphism,
    product_fan,
    projective_fan,
    star_fan,
    stellar_subdivision,
)


class BuildFanTests(SimpleTestCase):
    def test_pentagon_fan(self):
        fan = pentagon_fan()
        self.assertTrue(fan.is_unimodular)
        self.assertEqual(len(fan.cones), 11)
        self.assertEqual(len(fan.cones_of_dim(1)), 5)
        self.assertEqual(fan.dim, 2)

    def test_overlapping_cones(self):
        with self.assertRaises(BadIntersectionError):
            build_fan(2, [(1, 0), (0, 1), (1, 1)], [(0, 1), (2, 0)])

    def test_single_ray(self):
        fan = build_fan(2, [(1, 0)], [(0,)])
        self.assertEqual(len(fan.cones), 2)

    def test_rejects_non_primitive_and_duplicate_rays(self):
        with self.assertRaises(NonPrimitiveRayError):
            build_fan(2, [(2, 0)], [(0,)])
        with self.assertRaises(DuplicateRayError):
            build_fan(2, [(1, 0), (1, 0)], [(0,), (1,)])

    def test_rejects_non_unimodular_cone(self):
        with self.assertRaises(NotUnimodularError):
            build_fan(2, [(1, 0), (1, 2)], [(0, 1)])
        fan = build_fan(
            2, [(1, 0), (1, 2)], [(0, 1)], require_unimodular=False
        )
        self.assertFalse(fan.is_unimodular)

    def test_json_round_trip(self):
        fan = pentagon_fan()
        self.assertEqual(fan_from_json(fan.to_json()), fan)

    def test_faces_are_closed(self):
        fan = balanced_non_ehrhart_fan()
        for cone in fan.cones:
            for i in range(len(cone)):
                self.assertIn(cone[:i] + cone[i + 1 :], fan.cones)


class StarFanTests(SimpleTestCase):
    def test_star_at_diagonal_ray(self):
        star = star_fan(pentagon_fan(), (1,))
        self.assertEqual(star.fan.ambient_dim, 1)
        self.assertEqual(star.ray_lift, (0, 2))
        self.assertEqual(star.fan.rays, ((-1,), (1,)))

    def test_star_at_origin_is_the_fan(self):
        fan = pentagon_fan()
        self.assertEqual(star_fan(fan, ()).fan, fan)

    def test_star_at_maximal_cone(self):
        star = star_fan(pentagon_fan(), (0, 1))
        self.assertEqual(star.fan.ambient_dim, 0)
        self.assertEqual(star.fan.dim, 0)

    def test_cone_not_in_fan(self):
        with self.assertRaises(ConeNotInFanError):
            star_fan(pentagon_fan(), (0, 2))

    def test_projection_matches_star_cones(self):
        fan = balanced_non_ehrhart_fan()
        for ray in range(len(fan.rays)):
            star = star_fan(fan, (ray,))
            with self.subTest(ray=ray):
                self.assertTrue(star.fan.is_unimodular)
                for s, parent in enumerate(star.ray_lift):
                    self.assertEqual(
                        star.projection.apply(fan.rays[parent]),
                        star.fan.rays[s],
                    )


class CompletenessTests(SimpleTestCase):
    def test_complete_fans(self):
        for fan in (
            pentagon_fan(),
            square_fan(),
            hirzebruch_fan(),
            projective_fan(2),
            projective_fan(3),
            line_fan(),
        ):
            with self.subTest(fan=fan):
                self.assertTrue(is_complete(fan))

    def test_incomplete_fans(self):
        self.assertFalse(is_complete(quadrant_fan()))
        self.assertFalse(is_complete(torsion_fan()))
        three_rays = build_fan(
            2, [(1, 0), (0, 1), (-1, -1)], [(0,), (1,), (2,)]
        )
        self.assertFalse(is_complete(three_rays))

    def test_cone_contains(self):
        self.assertTrue(cone_contains([(1, 0), (1, 1)], (2, 1)))
        self.assertFalse(cone_contains([(1, 0), (1, 1)], (0, 1)))


class BalanceTests(SimpleTestCase):
    def test_unbalanced_rays(self):
        report = is_balanced(torsion_fan())
        self.assertFalse(report)
        self.assertEqual(report.residual, (2, 2))

    def test_balanced_fans(self):
        self.assertTrue(is_balanced(pentagon_fan()))
        self.assertTrue(is_balanced(balanced_non_ehrhart_fan()))


class StellarSubdivisionTests(SimpleTestCase):
    def test_square_to_pentagon(self):
        fine, new_ray = stellar_subdivision(square_fan(), (0, 1))
        self.assertEqual(fine.rays[new_ray], (1, 1))
        self.assertEqual(len(fine.maximal_cones), 5)
        self.assertTrue(is_complete(fine))

    def test_subdivision_at_ray_keeps_the_fan(self):
        fan = pentagon_fan()
        fine, new_ray = stellar_subdivision(fan, (2,))
        self.assertEqual(fine, fan)
        self.assertEqual(new_ray, 2)

    def test_pentagon_subdivided(self):
        fine, new_ray = stellar_subdivision(pentagon_fan(), (1, 2))
        self.assertEqual(fine.rays[new_ray], (1, 2))
        self.assertEqual(len(fine.maximal_cones), 6)

    def test_random_subdivisions_stay_complete(self):
        rng = random.Random(3)
        for _ in range(10):
            fan = random_subdivision(square_fan(), rng, rng.randint(1, 5))
            with self.subTest(fan=fan):
                self.assertTrue(fan.is_unimodular)
                self.assertTrue(is_complete(fan))

    def test_stars_away_from_the_subdivided_cone(self):
        coarse = pentagon_fan()
        for cone in coarse.cones_of_dim(2):
            fine, _ = stellar_subdivision(coarse, cone)
            near = set(coarse.neighbor_rays(cone)) | set(cone)
            for ray in range(len(coarse.rays)):
                if ray in near:
                    continue
                before = star_fan(coarse, (ray,))
                after = star_fan(fine, (ray,))
                with self.subTest(cone=cone, ray=ray):
                    self.assertEqual(before.ray_lift, after.ray_lift)
                    self.assertIsNotNone(
                        lattice_isomorphism(
                            before.fan,
                            after.fan,
                            range(len(before.ray_lift)),
                        )
                    )


class ProductAndProjectiveTests(SimpleTestCase):
    def test_product_of_lines(self):
        fan = product_fan(projective_fan(1), projective_fan(1))
        self.assertEqual(
            set(fan.rays), {(1, 0), (-1, 0), (0, 1), (0, -1)}
        )
        self.assertEqual(len(fan.maximal_cones), 4)

    def test_product_with_a_point(self):
        fan = pentagon_fan()
        product = product_fan(fan, projective_fan(0))
        self.assertEqual(product.rays, fan.rays)
        self.assertEqual(product.maximal_cones, fan.maximal_cones)

    def test_product_cone_counts(self):
        first, second = pentagon_fan(), projective_fan(1)
        product = product_fan(first, second)
        self.assertEqual(len(product.maximal_cones), 10)
        self.assertEqual(product.dim, 3)
        self.assertTrue(product.is_pure)
        self.assertEqual(
            len(product.cones), len(first.cones) * len(second.cones)
        )

    def test_projective_fans(self):
        self.assertEqual(projective_fan(1).rays, ((1,), (-1,)))
        plane = projective_fan(2)
        self.assertEqual(plane.rays, ((1, 0), (0, 1), (-1, -1)))
        self.assertEqual(len(plane.maximal_cones), 3)
        point = projective_fan(0)
        self.assertEqual(point.maximal_cones, ((),))
        self.assertEqual(len(point.cones), 1)
