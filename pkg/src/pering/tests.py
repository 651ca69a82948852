import random

from django.test import SimpleTestCase

from core.exceptions import (
    FanMismatchError,
    MixedSignError,
    NotEhrhartError,
    RefinementRequiredError,
)
from ehrhart.services import eval_chi
from fans.catalog import pentagon_fan, torsion_fan
from fans.fan import projective_fan
from pering.elements import (
    PEElement,
    chi_tilde,
    pe_equal,
    pe_normal_form,
    verify_maxmin_relation,
)
from plfunctions.functions import (
    PLFunction,
    canonical_class_rep,
    constant_function,
    linear_function,
    pointwise_max_min,
    zero_function,
)


def comparable_pair(fan, rng):
    """Two functions differing by a non-negative function."""
    f = PLFunction(fan, [rng.randint(-3, 3) for _ in fan.rays])
    return f, f + PLFunction(fan, [rng.randint(0, 2) for _ in fan.rays])


class PEElementTests(SimpleTestCase):
    def test_arithmetic(self):
        fan = pentagon_fan()
        ones = constant_function(fan, 1)
        e = PEElement.exp(ones)
        self.assertTrue((e - e).is_zero())
        self.assertEqual(e * PEElement.one(fan), e)
        self.assertEqual(e * e, PEElement.exp(2 * ones))
        self.assertEqual((e + e).coefficients, {ones.values: 2})

    def test_parts(self):
        fan = projective_fan(1)
        f, g = PLFunction(fan, (1, 0)), PLFunction(fan, (0, 1))
        element = PEElement(fan, [(2, f), (-1, g)])
        self.assertEqual(element.positive_part(), [f, f])
        self.assertEqual(element.negative_part(), [g])
        self.assertEqual(
            element.to_json(),
            {
                "terms": [
                    {"c": -1, "values": [0, 1]},
                    {"c": 2, "values": [1, 0]},
                ]
            },
        )
        self.assertEqual(PEElement.from_json(fan, element.to_json()), element)

    def test_terms_on_another_fan(self):
        with self.assertRaises(FanMismatchError):
            PEElement(pentagon_fan(), [(1, zero_function(projective_fan(2)))])


class NormalFormTests(SimpleTestCase):
    def test_line(self):
        fan = projective_fan(1)
        left = PEElement.exp(PLFunction(fan, (1, 0))) + PEElement.exp(
            PLFunction(fan, (0, 1))
        )
        right = PEElement.exp(PLFunction(fan, (1, 1))) + PEElement.one(fan)
        self.assertTrue(pe_equal(left, right))
        self.assertEqual(pe_normal_form(left), right)

    def test_reflexive(self):
        e = PEElement.exp(constant_function(pentagon_fan(), 1))
        self.assertTrue(pe_equal(e, e))

    def test_max_min_relation(self):
        rng = random.Random(61)
        fan = pentagon_fan()
        for _ in range(10):
            f = PLFunction(fan, [rng.randint(-3, 3) for _ in fan.rays])
            g = f + PLFunction(fan, [rng.choice((0, 2)) for _ in fan.rays])
            upper, lower = pointwise_max_min(f, g)
            self.assertTrue(
                pe_equal(
                    PEElement.exp(f) + PEElement.exp(g),
                    PEElement.exp(upper) + PEElement.exp(lower),
                )
            )

    def test_idempotent(self):
        fan = projective_fan(1)
        element = PEElement(
            fan,
            [
                (1, PLFunction(fan, (2, 0))),
                (1, PLFunction(fan, (0, 3))),
                (-1, PLFunction(fan, (1, 1))),
            ],
        )
        once = pe_normal_form(element)
        self.assertEqual(pe_normal_form(once), once)

    def test_distinct_elements(self):
        fan = pentagon_fan()
        ones = constant_function(fan, 1)
        self.assertFalse(
            pe_equal(PEElement.exp(ones), PEElement.exp(2 * ones))
        )

    def test_refinement_required(self):
        fan = pentagon_fan()
        element = PEElement.exp(constant_function(fan, 1)) + PEElement.exp(
            PLFunction(fan, (2, 0, 2, 0, 0))
        )
        with self.assertRaises(RefinementRequiredError) as ctx:
            pe_normal_form(element)
        self.assertEqual(ctx.exception.witness["cone"], [0, 1])


class ChiTildeTests(SimpleTestCase):
    def test_examples(self):
        fan = pentagon_fan()
        ones = constant_function(fan, 1)
        self.assertEqual(chi_tilde(PEElement.exp(ones)), 8)
        self.assertEqual(chi_tilde(PEElement.one(fan)), 1)
        self.assertEqual(chi_tilde(PEElement(fan)), 0)

    def test_max_min_rearranged(self):
        rng = random.Random(62)
        fan = pentagon_fan()
        for _ in range(10):
            f, g = comparable_pair(fan, rng)
            upper, lower = pointwise_max_min(f, g)
            element = (
                PEElement.exp(f) + PEElement.exp(g) - PEElement.exp(upper)
            )
            self.assertEqual(chi_tilde(element), eval_chi(lower))

    def test_linear_shifts(self):
        rng = random.Random(63)
        fan = pentagon_fan()
        for _ in range(10):
            f = PLFunction(fan, [rng.randint(-3, 3) for _ in fan.rays])
            m = (rng.randint(-3, 3), rng.randint(-3, 3))
            shifted = f + linear_function(fan, m)
            self.assertEqual(
                canonical_class_rep(f), canonical_class_rep(shifted)
            )
            self.assertEqual(
                chi_tilde(PEElement.exp(f)), chi_tilde(PEElement.exp(shifted))
            )

    def test_products_add_exponents(self):
        fan = projective_fan(2)
        f = PLFunction(fan, (1, 0, 2))
        g = PLFunction(fan, (0, 1, -1))
        self.assertEqual(
            chi_tilde(PEElement.exp(f) * PEElement.exp(g)),
            chi_tilde(PEElement.exp(f + g)),
        )

    def test_uncertified_fan(self):
        with self.assertRaises(NotEhrhartError):
            chi_tilde(PEElement.one(torsion_fan()))

    def test_empty_element_on_an_uncertified_fan(self):
        with self.assertRaises(NotEhrhartError):
            chi_tilde(PEElement(torsion_fan()))


class MaxMinRelationTests(SimpleTestCase):
    def test_examples(self):
        ones = constant_function(pentagon_fan(), 1)
        self.assertTrue(verify_maxmin_relation(ones, 2 * ones))
        fan = projective_fan(1)
        self.assertTrue(
            verify_maxmin_relation(
                PLFunction(fan, (1, 0)), PLFunction(fan, (0, 1))
            )
        )

    def test_random_pairs(self):
        rng = random.Random(64)
        for fan in (pentagon_fan(), projective_fan(2)):
            for _ in range(100):
                f, g = comparable_pair(fan, rng)
                with self.subTest(fan=fan, f=f.values, g=g.values):
                    self.assertTrue(verify_maxmin_relation(f, g))
                    self.assertTrue(verify_maxmin_relation(g, f))

    def test_incomparable(self):
        fan = pentagon_fan()
        with self.assertRaises(MixedSignError):
            verify_maxmin_relation(
                constant_function(fan, 1), PLFunction(fan, (2, 0, 2, 0, 0))
            )
