"""
Exact rational linear algebra on top of sympy.

Used wherever the integer kernel needs a rational answer: ranks, single
solutions of linear systems, inverses, and feasibility of
``A x = b, x >= 0`` (cone intersections, cone membership, boundedness).
Answers come back as ``fractions.Fraction`` so they mix freely with the
integer tuples used everywhere else.
"""

import logging
from fractions import Fraction
from typing import Sequence

from sympy import Matrix, Rational
from sympy.solvers.simplex import InfeasibleLPError, linprog

logger = logging.getLogger(__name__)

Rows = Sequence[Sequence[int | Fraction]]


def _rational(x: int | Fraction) -> Rational:
    return Rational(x.numerator, x.denominator)


def _fraction(x) -> Fraction:
    x = Rational(x)
    return Fraction(int(x.p), int(x.q))


def _matrix(rows: Rows) -> Matrix:
    return Matrix([[_rational(x) for x in row] for row in rows])


def rank(rows: Rows) -> int:
    if not rows:
        return 0
    return _matrix(rows).rank()


def solve(
    rows: Rows, rhs: Sequence[int | Fraction]
) -> tuple[Fraction, ...] | None:
    """
    One rational solution of ``rows · x = rhs`` or ``None``.

    Free parameters are set to zero, so the answer is deterministic.
    """
    if not rows:
        return None if any(rhs) else ()
    column = Matrix([_rational(b) for b in rhs])
    try:
        solution, params = _matrix(rows).gauss_jordan_solve(column)
    except ValueError:
        return None
    solution = solution.subs({param: 0 for param in params})
    return tuple(_fraction(x) for x in solution)


def inverse(rows: Rows) -> list[list[Fraction]]:
    """Raises ``NonInvertibleMatrixError`` on a singular matrix."""
    inv = _matrix(rows).inv()
    return [[_fraction(x) for x in inv.row(i)] for i in range(inv.rows)]


def determinant(rows: Rows) -> Fraction:
    if not rows:
        return Fraction(1)
    return _fraction(_matrix(rows).det())


def lp_feasible(
    rows: Rows, rhs: Sequence[int | Fraction]
) -> tuple[Fraction, ...] | None:
    """
    Find ``x >= 0`` with ``rows · x = rhs``, or ``None``.

    Solved as a linear program with a zero objective; sympy's simplex
    works in exact arithmetic.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    if m == 0 or n == 0:
        return None if any(rhs) else (Fraction(0),) * n
    # each equation as a pair of opposite inequalities
    upper = [[_rational(x) for x in row] for row in rows]
    lower = [[-x for x in row] for row in upper]
    bound = [_rational(b) for b in rhs]
    try:
        _, point = linprog(
            [0] * n, upper + lower, bound + [-b for b in bound]
        )
    except InfeasibleLPError:
        return None
    return tuple(_fraction(x) for x in point)
