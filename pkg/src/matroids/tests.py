import random
from unittest import mock

from django.test import SimpleTestCase

from core.exceptions import (
    FanMismatchError,
    InvalidMatroidError,
    LoopsPresentError,
    MalformedInputError,
    NotAFlatError,
)
from ehrhart.services import (
    EhrhartCertificate,
    default_engine,
    ehrhart_polynomial,
    eval_chi,
    is_ehrhart,
)
from fans.fan import is_balanced, product_fan, projective_fan
from matroids.bergman import (
    bergman_fan,
    chi_matroid,
    star_product_isomorphism,
)
from matroids.matroid import FlatChain, Matroid, matroid_from_json
from plfunctions.functions import PLFunction, courant, zero_function

TRIANGLE = [(0, 1), (1, 2), (0, 2)]
CYCLE = [(0, 1), (1, 2), (2, 3), (0, 3)]
K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


def singletons(*elements):
    return tuple(frozenset({e}) for e in elements)


class MatroidTests(SimpleTestCase):
    def test_uniform_flats(self):
        matroid = Matroid.uniform(2, 3)
        self.assertEqual(matroid.proper_flats, singletons(0, 1, 2))
        self.assertEqual(matroid.rank(), 2)
        self.assertEqual(matroid.closure({0, 1}), frozenset({0, 1, 2}))
        self.assertTrue(matroid.is_flat({1}))
        self.assertFalse(matroid.is_flat({0, 1}))

    def test_graphic_triangle(self):
        triangle = Matroid.graphic(3, TRIANGLE)
        self.assertEqual(triangle.proper_flats, singletons(0, 1, 2))
        self.assertEqual(triangle, Matroid.uniform(2, 3))

    def test_graphic_cycle(self):
        self.assertEqual(Matroid.graphic(4, CYCLE), Matroid.uniform(3, 4))

    def test_graphic_k4(self):
        matroid = Matroid.graphic(4, K4)
        self.assertEqual(matroid.rank(), 3)
        self.assertEqual(len(matroid.proper_flats), 6 + 4 + 3)

    def test_bases(self):
        matroid = Matroid.from_bases(3, [[0, 1], [0, 2], [1, 2]])
        self.assertEqual(matroid, Matroid.uniform(2, 3))

    def test_loops(self):
        matroid = Matroid.from_bases(2, [[0]])
        self.assertEqual(matroid.loops(), frozenset({1}))
        self.assertFalse(matroid.is_loopless())
        self.assertTrue(Matroid.uniform(2, 4).is_loopless())

    def test_invalid_bases(self):
        with self.assertRaises(InvalidMatroidError):
            Matroid.from_bases(3, [])
        with self.assertRaises(InvalidMatroidError):
            Matroid.from_bases(3, [[0, 1], [2]])
        with self.assertRaises(InvalidMatroidError) as ctx:
            Matroid.from_bases(4, [[0, 1], [2, 3]])
        self.assertEqual(ctx.exception.code, "INVALID_MATROID")
        with self.assertRaises(InvalidMatroidError):
            Matroid.uniform(4, 3)

    def test_restriction_and_contraction(self):
        matroid = Matroid.uniform(2, 3)
        self.assertEqual(matroid.restriction({0}), Matroid.uniform(1, 1))
        self.assertEqual(matroid.contraction({0}), Matroid.uniform(1, 2))
        with self.assertRaises(NotAFlatError):
            matroid.restriction({0, 1, 2})
        with self.assertRaises(NotAFlatError):
            Matroid.uniform(3, 4).contraction({0, 1, 2})

    def test_minors_of_flats_are_loopless(self):
        matroid = Matroid.graphic(4, K4)
        for flat in matroid.proper_flats:
            with self.subTest(flat=sorted(flat)):
                self.assertTrue(matroid.restriction(flat).is_loopless())
                self.assertTrue(matroid.contraction(flat).is_loopless())

    def test_flats_form_a_lattice(self):
        rng = random.Random(51)
        matroid = Matroid.graphic(4, K4)
        flats = matroid.flats
        for _ in range(30):
            first, second = rng.choice(flats), rng.choice(flats)
            self.assertTrue(matroid.is_flat(matroid.closure(first | second)))
            self.assertTrue(matroid.is_flat(first & second))

    def test_maximal_chains(self):
        chains = Matroid.uniform(3, 4).maximal_chains()
        self.assertEqual(len(chains), 12)
        self.assertTrue(all(len(chain.flats) == 2 for chain in chains))
        with self.assertRaises(NotAFlatError):
            FlatChain((frozenset({0, 1}), frozenset({0})))

    def test_json(self):
        self.assertEqual(
            matroid_from_json({"type": "uniform", "rank": 2, "n": 3}),
            Matroid.uniform(2, 3),
        )
        self.assertEqual(
            matroid_from_json(
                {"type": "graphic", "vertices": 3, "edges": TRIANGLE}
            ),
            matroid_from_json(
                {
                    "type": "bases",
                    "ground_size": 3,
                    "bases": [[0, 1], [1, 2], [0, 2]],
                }
            ),
        )
        with self.assertRaises(MalformedInputError):
            matroid_from_json({"type": "vector"})
        with self.assertRaises(MalformedInputError):
            matroid_from_json({"type": "uniform", "rank": 2})


class BergmanFanTests(SimpleTestCase):
    def test_u23(self):
        bergman = bergman_fan(Matroid.uniform(2, 3))
        self.assertEqual(bergman.fan.rays, ((1, 0), (0, 1), (-1, -1)))
        self.assertEqual(bergman.fan.dim, 1)
        self.assertEqual(bergman.ray_of({2}), 2)

    def test_rank_one(self):
        fan = bergman_fan(Matroid.uniform(1, 4)).fan
        self.assertEqual(fan.rays, ())
        self.assertEqual(fan.dim, 0)
        self.assertEqual(fan.ambient_dim, 3)

    def test_u34(self):
        fan = bergman_fan(Matroid.uniform(3, 4)).fan
        self.assertEqual(len(fan.rays), 10)
        self.assertEqual(len(fan.maximal_cones), 12)
        self.assertEqual(fan.dim, 2)

    def test_loops(self):
        with self.assertRaises(LoopsPresentError):
            bergman_fan(Matroid.from_bases(2, [[0]]))

    def test_balanced_and_ehrhart(self):
        for matroid in (
            Matroid.uniform(2, 3),
            Matroid.uniform(2, 4),
            Matroid.uniform(3, 4),
            Matroid.uniform(2, 5),
            Matroid.graphic(4, CYCLE),
            Matroid.graphic(4, K4),
        ):
            fan = bergman_fan(matroid).fan
            with self.subTest(matroid=matroid):
                self.assertTrue(is_balanced(fan))
                self.assertIsInstance(is_ehrhart(fan), EhrhartCertificate)
                self.assertEqual(
                    ehrhart_polynomial(fan).degree, matroid.rank() - 1
                )


class StarProductTests(SimpleTestCase):
    def test_every_flat_of_u34(self):
        rng = random.Random(52)
        matroid = Matroid.uniform(3, 4)
        for flat in matroid.proper_flats:
            identification = star_product_isomorphism(matroid, flat)
            star = identification.star.fan
            with self.subTest(flat=sorted(flat)):
                self.assertEqual(
                    sorted(identification.isomorphism.ray_map),
                    list(range(len(star.rays))),
                )
                g = PLFunction(star, [rng.randint(-2, 2) for _ in star.rays])
                first, second = identification.split(g)
                self.assertEqual(
                    eval_chi(g), eval_chi(first) * eval_chi(second)
                )

    def test_split_checks_the_fan(self):
        matroid = Matroid.uniform(3, 4)
        identification = star_product_isomorphism(matroid, frozenset({0}))
        with self.assertRaises(FanMismatchError):
            identification.split(zero_function(bergman_fan(matroid).fan))


class ChiMatroidTests(SimpleTestCase):
    def test_u23(self):
        matroid = Matroid.uniform(2, 3)
        fan = bergman_fan(matroid).fan
        self.assertEqual(chi_matroid(matroid, zero_function(fan)), 1)
        self.assertEqual(chi_matroid(matroid, courant(fan, 0)), 2)

    def test_fast_path_agrees_with_the_engine(self):
        rng = random.Random(53)
        matroids = (
            Matroid.uniform(2, 3),
            Matroid.uniform(2, 4),
            Matroid.uniform(3, 4),
            Matroid.graphic(4, CYCLE),
            Matroid.graphic(4, K4),
        )
        for matroid in matroids:
            fan = bergman_fan(matroid).fan
            for _ in range(30):
                f = PLFunction(fan, [rng.randint(-2, 2) for _ in fan.rays])
                with self.subTest(matroid=matroid, f=f.values):
                    self.assertEqual(
                        chi_matroid(matroid, f),
                        chi_matroid(matroid, f, fast_path=False),
                    )

    def test_wrong_fan(self):
        matroid = Matroid.uniform(2, 3)
        other = bergman_fan(Matroid.uniform(3, 4)).fan
        with self.assertRaises(FanMismatchError):
            chi_matroid(matroid, zero_function(other))

    def test_fast_path_values_are_cached(self):
        matroid = Matroid.uniform(2, 4)
        fan = bergman_fan(matroid).fan
        f = PLFunction(fan, [1, 2, 0, 1])
        expected = chi_matroid(matroid, f)
        with mock.patch.object(default_engine(), "walk") as walk:
            self.assertEqual(chi_matroid(matroid, f), expected)
        walk.assert_not_called()

    def test_products_with_projective_fans(self):
        rng = random.Random(54)
        bergman = bergman_fan(Matroid.uniform(2, 3)).fan
        factors = (bergman, projective_fan(1), projective_fan(2))
        for _ in range(50):
            first, second = rng.choice(factors), rng.choice(factors)
            product = product_fan(first, second)
            f = [rng.randint(-2, 2) for _ in first.rays]
            g = [rng.randint(-2, 2) for _ in second.rays]
            with self.subTest(first=first, second=second, f=f, g=g):
                self.assertEqual(
                    eval_chi(PLFunction(product, f + g)),
                    eval_chi(PLFunction(first, f))
                    * eval_chi(PLFunction(second, g)),
                )
