import random
from fractions import Fraction

from django.test import SimpleTestCase

from core.exceptions import (
    DependentVectorsError,
    NotUnimodularError,
    ZeroVectorError,
)
from lattice import rational
from lattice.linalg import (
    IntMatrix,
    complete_to_unimodular_basis,
    hermite_normal_form,
    is_unimodular_set,
    primitive_vector,
    quotient_projection,
    smith_diagonal,
)


class HermiteNormalFormTests(SimpleTestCase):
    def test_identity(self):
        identity = IntMatrix.identity(2)
        self.assertEqual(hermite_normal_form(identity), (identity, identity))

    def test_reduces_to_diagonal(self):
        h, u = hermite_normal_form(IntMatrix.from_rows([[1, 0], [1, 2]]))
        self.assertEqual(h.rows, ((1, 0), (0, 2)))

    def test_unimodular_rows_reduce_to_identity(self):
        h, _ = hermite_normal_form(IntMatrix.from_rows([[2, 1], [1, 1]]))
        self.assertEqual(h, IntMatrix.identity(2))

    def test_transform_is_unimodular_on_random_input(self):
        rng = random.Random(11)
        for _ in range(40):
            nrows, ncols = rng.randint(1, 4), rng.randint(1, 4)
            mat = IntMatrix.from_rows(
                [
                    [rng.randint(-6, 6) for _ in range(ncols)]
                    for _ in range(nrows)
                ]
            )
            h, u = hermite_normal_form(mat)
            with self.subTest(mat=mat.rows):
                self.assertEqual(u @ mat, h)
                self.assertIn(u.determinant(), (1, -1))
                for row in h.rows:
                    if any(row):
                        lead = next(x for x in row if x)
                        self.assertGreater(lead, 0)

    def test_output_is_deterministic(self):
        mat = IntMatrix.from_rows([[4, 6, 2], [2, 2, 8], [6, 0, 3]])
        self.assertEqual(hermite_normal_form(mat), hermite_normal_form(mat))


class UnimodularityTests(SimpleTestCase):
    def test_standard_basis(self):
        self.assertTrue(is_unimodular_set([(1, 0), (0, 1)]))

    def test_index_two_pair(self):
        self.assertFalse(is_unimodular_set([(1, 0), (1, 2)]))

    def test_primitive_single_vector(self):
        self.assertTrue(is_unimodular_set([(1, 1)]))
        self.assertFalse(is_unimodular_set([(2, 2)]))

    def test_dependent_input_is_an_error(self):
        with self.assertRaises(DependentVectorsError):
            is_unimodular_set([(1, 2), (2, 4)])

    def test_smith_diagonal(self):
        mat = IntMatrix.from_rows([[1, 0], [1, 2]])
        self.assertEqual(smith_diagonal(mat), (1, 2))


class BasisCompletionTests(SimpleTestCase):
    def test_standard_basis(self):
        basis, dual = complete_to_unimodular_basis([(1, 0), (0, 1)])
        self.assertEqual(basis, IntMatrix.identity(2))
        self.assertEqual(dual, IntMatrix.identity(2))

    def test_single_diagonal_vector(self):
        basis, dual = complete_to_unimodular_basis([(1, 1)])
        self.assertEqual(basis.column(0), (1, 1))
        self.assertEqual(basis.column(1), (0, 1))
        self.assertEqual(dual.rows, ((1, 0), (-1, 1)))

    def test_dual_rows_are_dual_functionals(self):
        rng = random.Random(5)
        for _ in range(30):
            n = rng.randint(2, 4)
            # columns of a random unimodular matrix
            mat = IntMatrix.identity(n)
            for _ in range(6):
                i, j = rng.sample(range(n), 2)
                q = rng.randint(-2, 2)
                rows = [list(r) for r in mat.rows]
                rows[i] = [a + q * b for a, b in zip(rows[i], rows[j])]
                mat = IntMatrix.from_rows(rows)
            k = rng.randint(0, n)
            vectors = [mat.column(c) for c in range(k)]
            basis, dual = complete_to_unimodular_basis(vectors, n)
            with self.subTest(vectors=vectors):
                self.assertEqual(dual @ basis, IntMatrix.identity(n))
                for c, v in enumerate(vectors):
                    self.assertEqual(basis.column(c), v)

    def test_rejects_non_unimodular_with_smith_diagonal(self):
        with self.assertRaises(NotUnimodularError) as ctx:
            complete_to_unimodular_basis([(1, 0), (1, 2)])
        self.assertEqual(ctx.exception.witness["smith_diagonal"], [1, 2])


class QuotientProjectionTests(SimpleTestCase):
    def test_diagonal_ray(self):
        projection = quotient_projection([(1, 1)])
        self.assertEqual(projection.rows, ((-1, 1),))
        self.assertEqual(projection.apply((1, 1)), (0,))

    def test_full_basis_projects_to_zero_lattice(self):
        projection = quotient_projection([(1, 0), (0, 1)])
        self.assertEqual(projection.nrows, 0)
        self.assertEqual(projection.ncols, 2)

    def test_empty_cone_is_identity(self):
        self.assertEqual(quotient_projection([], 3), IntMatrix.identity(3))

    def test_kills_rays_and_is_surjective(self):
        rays = [(1, 1, 0), (0, 1, 1)]
        projection = quotient_projection(rays)
        for ray in rays:
            self.assertEqual(projection.apply(ray), (0,))
        self.assertEqual(smith_diagonal(projection), (1,))


class PrimitiveVectorTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(primitive_vector((2, 2)), (1, 1))
        self.assertEqual(primitive_vector((3, -6)), (1, -2))
        self.assertEqual(primitive_vector((0, 5)), (0, 1))

    def test_zero_vector(self):
        with self.assertRaises(ZeroVectorError):
            primitive_vector((0, 0))


class RationalTests(SimpleTestCase):
    def test_rank_and_solve(self):
        self.assertEqual(rational.rank([[1, 2], [2, 4]]), 1)
        self.assertEqual(rational.rank([]), 0)
        self.assertEqual(
            rational.solve([[1, 1], [1, -1]], [3, 1]),
            (Fraction(2), Fraction(1)),
        )
        self.assertIsNone(rational.solve([[1, 1], [1, 1]], [0, 1]))

    def test_free_parameters_are_zero(self):
        self.assertEqual(
            rational.solve([[1, 1]], [Fraction(1, 2)]),
            (Fraction(1, 2), Fraction(0)),
        )

    def test_lp_feasible(self):
        # x + y = 1, x - y = 0 with x, y >= 0
        point = rational.lp_feasible([[1, 1], [1, -1]], [1, 0])
        self.assertEqual(point, (Fraction(1, 2), Fraction(1, 2)))
        # x + y = -1 has no nonnegative solution
        self.assertIsNone(rational.lp_feasible([[1, 1]], [-1]))

    def test_lp_points_are_feasible(self):
        rng = random.Random(12)
        for _ in range(30):
            m, n = rng.randint(1, 3), rng.randint(1, 4)
            rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(m)]
            witness = [rng.randint(0, 3) for _ in range(n)]
            rhs = [sum(a * x for a, x in zip(row, witness)) for row in rows]
            point = rational.lp_feasible(rows, rhs)
            with self.subTest(rows=rows, rhs=rhs):
                self.assertIsNotNone(point)
                self.assertTrue(all(x >= 0 for x in point))
                for row, b in zip(rows, rhs):
                    self.assertEqual(
                        sum(a * x for a, x in zip(row, point)), b
                    )

    def test_inverse_and_determinant(self):
        inv = rational.inverse([[2, 1], [1, 1]])
        self.assertEqual(inv, [[1, -1], [-1, 2]])
        self.assertEqual(
            rational.determinant([[1, 2], [3, 4]]), Fraction(-2)
        )

    def test_singular_matrix_is_not_unimodular(self):
        with self.assertRaises(NotUnimodularError) as ctx:
            IntMatrix.from_rows([[1, 2], [2, 4]]).inverse()
        self.assertEqual(ctx.exception.witness["determinant"], 0)
