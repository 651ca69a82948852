import random
from unittest import mock

from django.test import SimpleTestCase

from core.exceptions import (
    InternalInconsistencyError,
    MixedSignError,
    NotASubdivisionError,
    NotCompleteError,
)
from fans.catalog import (
    pentagon_fan,
    quadrant_fan,
    square_fan,
    torsion_fan,
)
from fans.fan import (
    build_fan,
    projective_fan,
    star_fan,
    stellar_subdivision,
)
from plfunctions.functions import (
    INFINITE,
    Convexity,
    PLFunction,
    agreeing_linear_function,
    canonical_class_rep,
    class_order,
    constant_function,
    convexity_type,
    courant,
    decompose_on_subdivision,
    is_convex,
    is_linear,
    linear_function,
    pointwise_max_min,
    restrict_to_star,
    transfer_to_subdivision,
    zero_function,
)


class CourantTests(SimpleTestCase):
    def test_diagonal_ray(self):
        self.assertEqual(courant(pentagon_fan(), 1).values, (0, 1, 0, 0, 0))

    def test_line(self):
        self.assertEqual(courant(projective_fan(1), 0).values, (1, 0))

    def test_sum_is_all_ones(self):
        fan = pentagon_fan()
        total = zero_function(fan)
        for ray in range(len(fan.rays)):
            total = total + courant(fan, ray)
        self.assertEqual(total, constant_function(fan, 1))


class LinearityTests(SimpleTestCase):
    def test_torsion_class(self):
        fan = torsion_fan()
        f = PLFunction(fan, (0, 1))
        self.assertEqual(is_linear(f), (False, None))
        self.assertEqual(class_order(f), 2)
        self.assertEqual(is_linear(2 * f)[0], True)

    def test_order_must_divide_the_saturation_index(self):
        f = PLFunction(torsion_fan(), (0, 1))
        with mock.patch(
            "plfunctions.functions._saturation_index", return_value=3
        ):
            with self.assertRaises(InternalInconsistencyError) as ctx:
                class_order(f)
        self.assertEqual(
            ctx.exception.witness, {"order": 2, "saturation_index": 3}
        )

    def test_zero(self):
        f = zero_function(pentagon_fan())
        self.assertEqual(is_linear(f)[0], True)
        self.assertEqual(class_order(f), 1)

    def test_linear_witness(self):
        fan = torsion_fan()
        linear, m = is_linear(PLFunction(fan, (1, 1)))
        self.assertTrue(linear)
        self.assertEqual(m, (1, 0))

    def test_witness_reproduces_values(self):
        rng = random.Random(2)
        fan = pentagon_fan()
        for _ in range(20):
            m = (rng.randint(-5, 5), rng.randint(-5, 5))
            linear, witness = is_linear(linear_function(fan, m))
            self.assertTrue(linear)
            self.assertEqual(witness, m)

    def test_infinite_order(self):
        fan = build_fan(1, [(1,), (-1,)], [(0,), (1,)])
        self.assertEqual(class_order(PLFunction(fan, (1, 0))), INFINITE)


class CanonicalRepresentativeTests(SimpleTestCase):
    def test_linear_shift_has_same_rep(self):
        fan = pentagon_fan()
        ones = constant_function(fan, 1)
        shifted = PLFunction(fan, (2, 2, 1, 0, 1))
        self.assertEqual(
            canonical_class_rep(ones), canonical_class_rep(shifted)
        )

    def test_zero(self):
        fan = pentagon_fan()
        self.assertTrue(canonical_class_rep(zero_function(fan)).rep.is_zero())

    def test_torsion(self):
        fan = torsion_fan()
        f = PLFunction(fan, (0, 1))
        zero = canonical_class_rep(zero_function(fan))
        self.assertNotEqual(canonical_class_rep(f), zero)
        self.assertEqual(canonical_class_rep(f + f), zero)

    def test_invariance_under_basis_shifts(self):
        rng = random.Random(8)
        fan = pentagon_fan()
        for _ in range(25):
            f = PLFunction(fan, [rng.randint(-9, 9) for _ in fan.rays])
            for m in ((1, 0), (0, 1)):
                with self.subTest(f=f.values, m=m):
                    self.assertEqual(
                        canonical_class_rep(f),
                        canonical_class_rep(f + linear_function(fan, m)),
                    )
            self.assertEqual(
                class_order(f) == 1, is_linear(f)[0]
            )


class RestrictToStarTests(SimpleTestCase):
    def test_diagonal_ray_of_pentagon(self):
        fan = pentagon_fan()
        restricted = restrict_to_star(constant_function(fan, 1), (1,))
        self.assertEqual(restricted.values, (0, 1))

    def test_origin(self):
        fan = pentagon_fan()
        f = PLFunction(fan, (3, 1, 4, 1, 5))
        self.assertEqual(restrict_to_star(f, ()).values, f.values)

    def test_linear_restricts_to_zero(self):
        fan = pentagon_fan()
        f = linear_function(fan, (2, -3))
        for ray in range(len(fan.rays)):
            self.assertTrue(restrict_to_star(f, (ray,)).is_zero())

    def test_class_does_not_depend_on_the_linear_function(self):
        rng = random.Random(4)
        fan = projective_fan(3)
        for _ in range(15):
            f = PLFunction(fan, [rng.randint(-4, 4) for _ in fan.rays])
            ray = rng.randrange(len(fan.rays))
            m = agreeing_linear_function(f, (ray,))
            # perturb by a functional vanishing on the ray
            star = star_fan(fan, (ray,))
            kernel = star.dual_basis.rows[1]
            other = tuple(a + 3 * b for a, b in zip(m, kernel))
            with self.subTest(f=f.values, ray=ray):
                self.assertEqual(
                    canonical_class_rep(restrict_to_star(f, (ray,))),
                    canonical_class_rep(
                        restrict_to_star(f, (ray,), linear=other)
                    ),
                )


class ConvexityTests(SimpleTestCase):
    def test_pentagon_function_is_strictly_convex(self):
        f = constant_function(pentagon_fan(), 1)
        self.assertEqual(convexity_type(f), Convexity.STRICTLY_CONVEX)
        self.assertEqual(convexity_type(-f), Convexity.STRICTLY_CONCAVE)
        self.assertTrue(is_convex(f))

    def test_non_strict(self):
        # the square function pulled back to the pentagon fan is flat
        # across the diagonal ray
        f = PLFunction(pentagon_fan(), (1, 2, 1, 1, 1))
        self.assertEqual(convexity_type(f), Convexity.CONVEX)
        self.assertEqual(convexity_type(-f), Convexity.CONCAVE)

    def test_linear(self):
        f = linear_function(pentagon_fan(), (1, -2))
        self.assertEqual(convexity_type(f), Convexity.LINEAR)

    def test_neither(self):
        f = courant(pentagon_fan(), 0) - courant(pentagon_fan(), 2)
        self.assertEqual(convexity_type(f), Convexity.NONE)

    def test_incomplete_fan(self):
        with self.assertRaises(NotCompleteError):
            convexity_type(zero_function(quadrant_fan()))

    def test_flat_function_must_be_linear(self):
        f = zero_function(square_fan())
        with mock.patch(
            "plfunctions.functions.is_linear", return_value=(False, None)
        ):
            with self.assertRaises(InternalInconsistencyError):
                convexity_type(f)


class MaxMinTests(SimpleTestCase):
    def test_comparable(self):
        f = constant_function(pentagon_fan(), 1)
        upper, lower = pointwise_max_min(f, 2 * f)
        self.assertEqual((upper, lower), (2 * f, f))

    def test_line(self):
        fan = projective_fan(1)
        upper, lower = pointwise_max_min(
            PLFunction(fan, (1, 0)), PLFunction(fan, (0, 1))
        )
        self.assertEqual(upper.values, (1, 1))
        self.assertEqual(lower.values, (0, 0))

    def test_mixed_sign(self):
        fan = pentagon_fan()
        with self.assertRaises(MixedSignError) as ctx:
            pointwise_max_min(
                constant_function(fan, 1), PLFunction(fan, (2, 0, 2, 0, 0))
            )
        self.assertEqual(ctx.exception.witness, [0, 1])

    def test_sum_is_preserved(self):
        rng = random.Random(6)
        fan = projective_fan(1)
        for _ in range(20):
            f = PLFunction(fan, [rng.randint(-5, 5) for _ in fan.rays])
            g = PLFunction(fan, [rng.randint(-5, 5) for _ in fan.rays])
            upper, lower = pointwise_max_min(f, g)
            self.assertEqual(upper + lower, f + g)


class SubdivisionTransferTests(SimpleTestCase):
    def test_quadrant_decomposition(self):
        coarse = quadrant_fan()
        fine, new_ray = stellar_subdivision(coarse, (0, 1))
        f, a = decompose_on_subdivision(
            PLFunction(fine, (3, 3, 3)), coarse, (0, 1)
        )
        self.assertEqual(f.values, (3, 3))
        self.assertEqual(sum(f.values[i] for i in (0, 1)), 6)
        self.assertEqual(a, -3)

    def test_square_to_pentagon(self):
        coarse = square_fan()
        fine, new_ray = stellar_subdivision(coarse, (0, 1))
        transferred = transfer_to_subdivision(
            constant_function(coarse, 1), fine
        )
        self.assertEqual(transferred.values, (1, 1, 1, 1, 2))
        self.assertEqual(
            decompose_on_subdivision(transferred, coarse, (0, 1)),
            (constant_function(coarse, 1), 0),
        )

    def test_round_trip(self):
        rng = random.Random(9)
        coarse = projective_fan(3)
        for cone in coarse.cones_of_dim(2) + coarse.cones_of_dim(3):
            fine, _ = stellar_subdivision(coarse, cone)
            f = PLFunction(coarse, [rng.randint(-5, 5) for _ in coarse.rays])
            with self.subTest(cone=cone):
                self.assertEqual(
                    decompose_on_subdivision(
                        transfer_to_subdivision(f, fine), coarse, cone
                    ),
                    (f, 0),
                )

    def test_unrelated_fans(self):
        with self.assertRaises(NotASubdivisionError):
            transfer_to_subdivision(
                zero_function(square_fan()), pentagon_fan()
            )
