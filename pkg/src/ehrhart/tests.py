import itertools
import random
from fractions import Fraction
from unittest import mock

from django.test import SimpleTestCase

from core.exceptions import (
    DegreeBoundError,
    InternalInconsistencyError,
    NotBalancedError,
    NotEhrhartError,
    WrongDimensionError,
)
from ehrhart.closed_forms import (
    LINEAR_CONDITION,
    Dim2Criterion,
    chi_closed_form_dim1,
    chi_closed_form_dim2,
    dim2_is_ehrhart,
)
from ehrhart.polynomials import IVPoly, binomial, binomial_expand
from ehrhart.services import (
    EhrhartCertificate,
    EhrhartFailure,
    FailureReason,
    ehrhart_polynomial,
    eval_chi,
    is_ehrhart,
    volume_eval,
)
from fans.catalog import (
    balanced_non_ehrhart_fan,
    hirzebruch_fan,
    line_fan,
    pentagon_fan,
    random_subdivision,
    square_fan,
    torsion_fan,
)
from fans.fan import (
    build_fan,
    is_balanced,
    product_fan,
    projective_fan,
    stellar_subdivision,
)
from lattice.linalg import primitive_vector
from matroids.bergman import bergman_fan
from matroids.matroid import Matroid
from plfunctions.functions import (
    PLFunction,
    constant_function,
    courant,
    restrict_to_star,
    transfer_to_subdivision,
    zero_function,
)


def random_function(fan, rng, bound=3):
    return PLFunction(fan, [rng.randint(-bound, bound) for _ in fan.rays])


def product_factors():
    return (
        projective_fan(1),
        projective_fan(2),
        bergman_fan(Matroid.uniform(2, 3)).fan,
    )


def certified_fans(rng):
    """The pentagon, subdivided squares, the named complete fans and
    products of small Ehrhart fans."""
    fans = [pentagon_fan()]
    fans += [
        random_subdivision(square_fan(), rng, rng.randint(0, 4))
        for _ in range(20)
    ]
    fans += [
        projective_fan(1),
        projective_fan(2),
        square_fan(),
        hirzebruch_fan(1),
    ]
    fans += [
        product_fan(first, second)
        for first, second in itertools.combinations_with_replacement(
            product_factors(), 2
        )
    ]
    return fans


class BinomialTests(SimpleTestCase):
    def test_negative_arguments(self):
        self.assertEqual(binomial(-3, 2), 6)
        self.assertEqual(binomial(-1, 3), -1)
        self.assertEqual(binomial(4, 5), 0)
        self.assertEqual(binomial(4, -1), 0)


class BinomialExpandTests(SimpleTestCase):
    def test_square(self):
        poly = binomial_expand(lambda p: p[0] ** 2, (0,), 2)
        self.assertEqual(poly.coeffs, {((0, 1),): 1, ((0, 2),): 2})

    def test_product_of_two_variables(self):
        poly = binomial_expand(lambda p: p[0] * p[1], (0, 1), 2)
        self.assertEqual(poly.coeffs, {((0, 1), (1, 1)): 1})

    def test_constant(self):
        poly = binomial_expand(lambda p: 1, (0, 1, 2), 0)
        self.assertEqual(poly, IVPoly.constant(1, (0, 1, 2)))

    def test_degree_bound_violation(self):
        with self.assertRaises(DegreeBoundError):
            binomial_expand(lambda p: p[0] ** 3, (0,), 2)

    def test_reconstruction_on_random_polynomials(self):
        rng = random.Random(11)
        for _ in range(10):
            a, b, c = (rng.randint(-5, 5) for _ in range(3))

            def oracle(p):
                return a * p[0] * (p[0] - 1) + b * p[0] * p[1] + c * p[1]

            poly = binomial_expand(oracle, (0, 1), 2)
            for x, y in itertools.product(range(-4, 5), repeat=2):
                self.assertEqual(
                    poly.evaluate({0: x, 1: y}), oracle({0: x, 1: y})
                )


class IVPolyTests(SimpleTestCase):
    def setUp(self):
        self.square = IVPoly((0,), {((0, 1),): 1, ((0, 2),): 2})

    def test_evaluate(self):
        self.assertEqual(self.square.evaluate({0: -3}), 9)
        self.assertEqual(self.square.evaluate_values([5]), 25)

    def test_shift(self):
        shifted = self.square.shift({0: 2})
        for x in range(-5, 6):
            self.assertEqual(shifted.evaluate({0: x}), (x + 2) ** 2)

    def test_top_form(self):
        self.assertEqual(self.square.degree, 2)
        self.assertEqual(self.square.top_form({0: 3}), 18)

    def test_json(self):
        document = self.square.to_json()
        self.assertEqual(document["vars"], [0])
        self.assertEqual(
            document["terms"],
            [{"alpha": {"0": 1}, "c": 1}, {"alpha": {"0": 2}, "c": 2}],
        )
        self.assertEqual(IVPoly.from_json(document), self.square)


class EvalChiTests(SimpleTestCase):
    def test_pentagon(self):
        fan = pentagon_fan()
        ones = constant_function(fan, 1)
        self.assertEqual(eval_chi(ones), 8)
        self.assertEqual(eval_chi(ones - courant(fan, 1)), 6)
        self.assertEqual(eval_chi(restrict_to_star(ones, (1,))), 2)

    def test_zero_function(self):
        for fan in (pentagon_fan(), projective_fan(3), line_fan()):
            with self.subTest(fan=fan):
                self.assertEqual(eval_chi(zero_function(fan)), 1)

    def test_projective_plane(self):
        self.assertEqual(eval_chi(constant_function(projective_fan(2), 1)), 10)

    def test_point(self):
        fan = projective_fan(0)
        self.assertEqual(eval_chi(PLFunction(fan, ())), 1)

    def test_square_and_its_subdivision(self):
        self.assertEqual(eval_chi(constant_function(square_fan(), 1)), 9)
        subdivided = PLFunction(pentagon_fan(), (1, 2, 1, 1, 1))
        self.assertEqual(eval_chi(subdivided), 9)

    def test_recursion_consistency(self):
        rng = random.Random(5)
        for fan in (pentagon_fan(), hirzebruch_fan(2), projective_fan(3)):
            for _ in range(10):
                f = random_function(fan, rng)
                ray = rng.randrange(len(fan.rays))
                with self.subTest(fan=fan, f=f.values, ray=ray):
                    self.assertEqual(
                        eval_chi(f) - eval_chi(f - courant(fan, ray)),
                        eval_chi(restrict_to_star(f, (ray,))),
                    )

    def test_choice_independence(self):
        rng = random.Random(12)
        fan = pentagon_fan()
        for _ in range(10):
            f = random_function(fan, rng)
            expected = eval_chi(f)
            order = list(range(len(fan.rays)))
            rng.shuffle(order)
            for cone in fan.cones_of_dim(2):
                with self.subTest(f=f.values, cone=cone, order=order):
                    self.assertEqual(
                        eval_chi(f, reference_cone=cone, ray_order=order),
                        expected,
                    )

    def test_refuses_non_ehrhart_fans(self):
        fan = balanced_non_ehrhart_fan()
        with self.assertRaises(NotEhrhartError) as ctx:
            eval_chi(constant_function(fan, 1))
        self.assertEqual(ctx.exception.code, "NOT_EHRHART")
        self.assertEqual(
            eval_chi(zero_function(fan), acknowledge_choice_dependence=True),
            1,
        )

    def test_acknowledged_evaluation_matches_on_ehrhart_fans(self):
        rng = random.Random(13)
        fan = pentagon_fan()
        for _ in range(5):
            f = random_function(fan, rng)
            self.assertEqual(
                eval_chi(f, acknowledge_choice_dependence=True), eval_chi(f)
            )

    def test_stellar_subdivisions_keep_the_value(self):
        rng = random.Random(14)
        coarse_fans = (square_fan(), pentagon_fan(), projective_fan(2))
        for _ in range(20):
            fan = random_subdivision(
                rng.choice(coarse_fans), rng, rng.randint(0, 2)
            )
            f = random_function(fan, rng)
            cone = rng.choice(fan.cones_of_dim(2))
            fine, _ = stellar_subdivision(fan, cone)
            with self.subTest(fan=fan, cone=cone, f=f.values):
                self.assertEqual(
                    eval_chi(transfer_to_subdivision(f, fine)), eval_chi(f)
                )

    def test_square_ones_before_and_after_subdivision(self):
        fan = square_fan()
        f = constant_function(fan, 1)
        fine, _ = stellar_subdivision(fan, (0, 1))
        self.assertEqual(eval_chi(f), 9)
        self.assertEqual(eval_chi(transfer_to_subdivision(f, fine)), 9)

    def test_products(self):
        rng = random.Random(15)
        factors = product_factors()
        for _ in range(50):
            first, second = rng.choice(factors), rng.choice(factors)
            product = product_fan(first, second)
            f = random_function(first, rng)
            g = random_function(second, rng)
            with self.subTest(f=f.values, g=g.values):
                self.assertEqual(
                    eval_chi(PLFunction(product, f.values + g.values)),
                    eval_chi(f) * eval_chi(g),
                )


class EhrhartPolynomialTests(SimpleTestCase):
    def test_line(self):
        self.assertEqual(
            ehrhart_polynomial(projective_fan(1)),
            IVPoly((0, 1), {(): 1, ((0, 1),): 1, ((1, 1),): 1}),
        )

    def test_point(self):
        self.assertEqual(
            ehrhart_polynomial(projective_fan(0)), IVPoly.constant(1)
        )

    def test_pentagon_coefficients(self):
        # a = (1, 1, 1, 0, 0)
        expected = {
            (): 1,
            ((3, 1),): 1,
            ((4, 1),): 1,
            ((0, 2),): -1,
            ((1, 2),): -1,
            ((2, 2),): -1,
            ((0, 1), (1, 1)): 1,
            ((1, 1), (2, 1)): 1,
            ((2, 1), (3, 1)): 1,
            ((3, 1), (4, 1)): 1,
            ((0, 1), (4, 1)): 1,
        }
        self.assertEqual(ehrhart_polynomial(pentagon_fan()).coeffs, expected)

    def test_polynomial_matches_recursion(self):
        rng = random.Random(21)
        for fan in (pentagon_fan(), hirzebruch_fan(), projective_fan(3)):
            poly = ehrhart_polynomial(fan)
            self.assertEqual(poly.degree, fan.dim)
            for _ in range(10):
                f = random_function(fan, rng)
                with self.subTest(fan=fan, f=f.values):
                    self.assertEqual(
                        poly.evaluate_values(f.values), eval_chi(f)
                    )

    def test_leading_term_is_the_volume(self):
        rng = random.Random(22)
        for fan in certified_fans(rng):
            poly = ehrhart_polynomial(fan)
            for _ in range(50):
                f = random_function(fan, rng)
                with self.subTest(fan=fan, f=f.values):
                    self.assertEqual(
                        volume_eval(f),
                        poly.top_form(dict(enumerate(f.values))),
                    )

    def test_non_ehrhart_fan(self):
        with self.assertRaises(NotEhrhartError):
            ehrhart_polynomial(torsion_fan())


class IsEhrhartTests(SimpleTestCase):
    def test_pentagon(self):
        certificate = is_ehrhart(pentagon_fan())
        self.assertIsInstance(certificate, EhrhartCertificate)
        self.assertEqual(certificate.dimension, 2)
        self.assertEqual(len(certificate.star_certificates), 5)
        self.assertTrue(certificate.to_json()["ehrhart"])

    def test_balanced_non_ehrhart_fan(self):
        failure = is_ehrhart(balanced_non_ehrhart_fan())
        self.assertIsInstance(failure, EhrhartFailure)
        self.assertEqual(failure.reason, FailureReason.LINEAR_INVARIANCE)
        self.assertEqual(failure.witness["residual"], [-4, -2, -2, -2])

    def test_failure_is_reproducible(self):
        fan = balanced_non_ehrhart_fan()
        self.assertEqual(is_ehrhart(fan), is_ehrhart(fan))

    def test_rays_not_summing_to_zero(self):
        failure = is_ehrhart(torsion_fan())
        self.assertIsInstance(failure, EhrhartFailure)
        self.assertEqual(failure.reason, FailureReason.LINEAR_INVARIANCE)
        self.assertEqual(failure.witness["residual"], [2, 2])

    def test_bad_star(self):
        failure = is_ehrhart(product_fan(torsion_fan(), projective_fan(1)))
        self.assertEqual(failure.reason, FailureReason.STAR_NOT_EHRHART)
        self.assertEqual(failure.witness["ray"], 2)

    def test_certified_fans_are_balanced(self):
        rng = random.Random(23)
        fans = [
            pentagon_fan(),
            hirzebruch_fan(3),
            projective_fan(3),
            product_fan(projective_fan(2), projective_fan(1)),
        ]
        fans += [
            random_subdivision(square_fan(), rng, rng.randint(1, 4))
            for _ in range(5)
        ]
        for fan in fans:
            with self.subTest(fan=fan):
                self.assertIsInstance(is_ehrhart(fan), EhrhartCertificate)
                self.assertTrue(is_balanced(fan))


class DimensionOneTests(SimpleTestCase):
    def test_line(self):
        f = PLFunction(line_fan(), (2, 3))
        self.assertEqual(chi_closed_form_dim1(f), 6)
        self.assertEqual(chi_closed_form_dim1(zero_function(line_fan())), 1)

    def test_rays_not_summing_to_zero(self):
        with self.assertRaises(NotEhrhartError) as ctx:
            chi_closed_form_dim1(zero_function(torsion_fan()))
        self.assertEqual(ctx.exception.witness["residual"], [2, 2])

    def test_wrong_dimension(self):
        with self.assertRaises(WrongDimensionError):
            chi_closed_form_dim1(zero_function(pentagon_fan()))

    def test_three_rays(self):
        fan = build_fan(2, [(1, 0), (0, 1), (-1, -1)], [(0,), (1,), (2,)])
        f = PLFunction(fan, (4, -1, 2))
        self.assertEqual(chi_closed_form_dim1(f), 6)
        self.assertEqual(eval_chi(f), 6)

    def test_random_lines(self):
        rng = random.Random(31)
        for _ in range(200):
            n = rng.randint(1, 3)
            direction = (0,) * n
            while not any(direction):
                direction = tuple(rng.randint(-6, 6) for _ in range(n))
            fan = line_fan(primitive_vector(direction))
            f = random_function(fan, rng, 20)
            with self.subTest(direction=direction, f=f.values):
                self.assertEqual(chi_closed_form_dim1(f), 1 + sum(f.values))
                self.assertEqual(eval_chi(f), 1 + sum(f.values))


class DimensionTwoTests(SimpleTestCase):
    def test_pentagon(self):
        fan = pentagon_fan()
        self.assertEqual(dim2_is_ehrhart(fan).a, (1, 1, 1, 0, 0))
        self.assertEqual(chi_closed_form_dim2(constant_function(fan, 1)), 8)
        self.assertEqual(
            chi_closed_form_dim2(PLFunction(fan, (1, 2, 1, 1, 1))), 9
        )

    def test_balanced_non_ehrhart_fan(self):
        criterion = dim2_is_ehrhart(balanced_non_ehrhart_fan())
        self.assertFalse(criterion)
        self.assertEqual(criterion.failed_equation, LINEAR_CONDITION)
        self.assertEqual(criterion.witness["residual"], [-4, -2, -2, -2])
        with self.assertRaises(NotEhrhartError):
            chi_closed_form_dim2(zero_function(balanced_non_ehrhart_fan()))

    def test_non_integral_value_is_an_inconsistency(self):
        fan = projective_fan(2)
        criterion = Dim2Criterion(True, (Fraction(1, 2), -1, -1))
        with mock.patch(
            "ehrhart.closed_forms.dim2_is_ehrhart", return_value=criterion
        ):
            with self.assertRaises(InternalInconsistencyError) as ctx:
                chi_closed_form_dim2(PLFunction(fan, (1, 0, 0)))
        self.assertEqual(ctx.exception.witness["value"], "3/2")

    def test_agrees_with_the_engine(self):
        rng = random.Random(32)
        for _ in range(20):
            fan = random_subdivision(square_fan(), rng, rng.randint(0, 4))
            poly = ehrhart_polynomial(fan)
            for _ in range(50):
                f = random_function(fan, rng)
                with self.subTest(fan=fan, f=f.values):
                    value = chi_closed_form_dim2(f)
                    self.assertEqual(value, eval_chi(f))
                    self.assertEqual(value, poly.evaluate_values(f.values))


class VolumeTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(volume_eval(constant_function(pentagon_fan(), 1)), 7)
        self.assertEqual(
            volume_eval(constant_function(projective_fan(2), 1)), 9
        )
        self.assertEqual(volume_eval(PLFunction(projective_fan(0), ())), 1)

    def test_line(self):
        self.assertEqual(volume_eval(PLFunction(line_fan(), (2, 3))), 5)

    def test_unbalanced_fan(self):
        with self.assertRaises(NotBalancedError):
            volume_eval(zero_function(torsion_fan()))

    def test_linear_functions_have_zero_volume_in_positive_dimension(self):
        fan = pentagon_fan()
        f = PLFunction(fan, (1, 2, 1, -1, -1))
        self.assertEqual(volume_eval(f), 0)
