"""
Integer linear algebra on the lattice N = Z^n and its dual M.

Elements of N and M share one representation, tuples of Python integers;
``pairing`` evaluates a functional on a vector. Hermite normal forms are
computed here with a fixed pivot rule so downstream memo keys are
reproducible. Smith normal forms come from sympy.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.exceptions import NonInvertibleMatrixError
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from core.exceptions import (
    DependentVectorsError,
    NotUnimodularError,
    ZeroVectorError,
)
from lattice import rational

logger = logging.getLogger(__name__)

LatticeVector = tuple[int, ...]


def pairing(m: Sequence[int], u: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(m, u))


@dataclass(frozen=True)
class IntMatrix:
    """
    Immutable integer matrix stored by rows.

    ``ncols`` is kept explicitly so matrices without rows (the projection
    onto the zero lattice) still know their width.
    """

    rows: tuple[tuple[int, ...], ...]
    ncols: int

    @classmethod
    def from_rows(
        cls, rows: Iterable[Sequence[int]], ncols: int | None = None
    ) -> "IntMatrix":
        rows = tuple(tuple(int(x) for x in row) for row in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        if any(len(row) != ncols for row in rows):
            raise ValueError("rows of unequal length")
        return cls(rows, ncols)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.from_rows(
            [[int(i == j) for j in range(n)] for i in range(n)], n
        )

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def column(self, j: int) -> LatticeVector:
        return tuple(row[j] for row in self.rows)

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows(
            [self.column(j) for j in range(self.ncols)], self.nrows
        )

    def apply(self, vector: Sequence[int]) -> LatticeVector:
        """The product ``self · vector``."""
        return tuple(pairing(row, vector) for row in self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        cols = [other.column(j) for j in range(other.ncols)]
        return IntMatrix.from_rows(
            [[pairing(row, col) for col in cols] for row in self.rows],
            other.ncols,
        )

    def determinant(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return int(rational.determinant(self.rows))

    def inverse(self) -> "IntMatrix":
        """Exact inverse; the matrix must be unimodular."""
        try:
            inv = rational.inverse(self.rows)
        except NonInvertibleMatrixError:
            inv = None
        if inv is None or any(
            x.denominator != 1 for row in inv for x in row
        ):
            raise NotUnimodularError(
                "matrix has no integral inverse",
                witness={"determinant": self.determinant()},
            )
        return IntMatrix.from_rows(
            [[int(x) for x in row] for row in inv], self.nrows
        )

    def to_list(self) -> list[list[int]]:
        return [list(row) for row in self.rows]


def hermite_normal_form(mat: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """
    Row Hermite normal form with its unimodular transform.

    Returns ``(H, U)`` with ``U · mat = H``. Columns are processed left to
    right; the pivot is the entry of smallest absolute value (lowest row on
    ties), pivots are positive and entries above a pivot lie in
    ``[0, pivot)``. Zero rows end up at the bottom.
    """
    h = [list(row) for row in mat.rows]
    m = len(h)
    u = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap(a, b):
        h[a], h[b] = h[b], h[a]
        u[a], u[b] = u[b], u[a]

    def subtract(target, source, q):
        h[target] = [x - q * y for x, y in zip(h[target], h[source])]
        u[target] = [x - q * y for x, y in zip(u[target], u[source])]

    top = 0
    for col in range(mat.ncols):
        if top == m:
            break
        found = False
        while True:
            candidates = [i for i in range(top, m) if h[i][col] != 0]
            if not candidates:
                break
            found = True
            best = min(candidates, key=lambda i: (abs(h[i][col]), i))
            swap(best, top)
            if h[top][col] < 0:
                h[top] = [-x for x in h[top]]
                u[top] = [-x for x in u[top]]
            pivot = h[top][col]
            for i in range(top + 1, m):
                q = h[i][col] // pivot
                if q:
                    subtract(i, top, q)
            if all(h[i][col] == 0 for i in range(top + 1, m)):
                break
        if not found:
            continue
        pivot = h[top][col]
        for i in range(top):
            q = h[i][col] // pivot
            if q:
                subtract(i, top, q)
        top += 1

    return (
        IntMatrix.from_rows(h, mat.ncols),
        IntMatrix.from_rows(u, m),
    )


def smith_diagonal(mat: IntMatrix) -> tuple[int, ...]:
    """Absolute values of the Smith normal form diagonal."""
    size = min(mat.nrows, mat.ncols)
    if size == 0:
        return ()
    snf = smith_normal_form(Matrix(mat.to_list()), domain=ZZ)
    return tuple(abs(int(snf[i, i])) for i in range(size))


def primitive_vector(vector: Sequence[int]) -> LatticeVector:
    divisor = reduce(gcd, vector, 0)
    if divisor == 0:
        raise ZeroVectorError(witness=list(vector))
    return tuple(x // divisor for x in vector)


def _check_independent(vectors: list[LatticeVector]) -> None:
    for v in vectors:
        if not any(v):
            raise ZeroVectorError(witness=list(v))
    if vectors and rational.rank(vectors) < len(vectors):
        raise DependentVectorsError(
            witness=[list(v) for v in vectors]
        )


def _column_hnf(
    vectors: tuple[LatticeVector, ...], ambient_dim: int
) -> tuple[IntMatrix, IntMatrix]:
    columns = IntMatrix.from_rows(
        [[v[i] for v in vectors] for i in range(ambient_dim)],
        len(vectors),
    )
    return hermite_normal_form(columns)


def _is_identity_block(h: IntMatrix, k: int) -> bool:
    return all(
        h.rows[i][j] == int(i == j) for i in range(k) for j in range(k)
    )


def is_unimodular_set(vectors: Iterable[Sequence[int]]) -> bool:
    """
    True iff the vectors extend to a basis of the lattice.

    Raises ``DependentVectorsError`` for rationally dependent input, which
    callers must not confuse with a negative answer.
    """
    vectors = [tuple(v) for v in vectors]
    _check_independent(vectors)
    if not vectors:
        return True
    h, _ = _column_hnf(tuple(vectors), len(vectors[0]))
    return _is_identity_block(h, len(vectors))


@lru_cache(maxsize=8192)
def _completion(
    vectors: tuple[LatticeVector, ...], ambient_dim: int
) -> tuple[IntMatrix, IntMatrix]:
    if not vectors:
        identity = IntMatrix.identity(ambient_dim)
        return identity, identity
    _check_independent(list(vectors))
    h, u = _column_hnf(vectors, ambient_dim)
    k = len(vectors)
    if not _is_identity_block(h, k):
        block = IntMatrix.from_rows([row[:k] for row in h.rows[:k]], k)
        raise NotUnimodularError(
            witness={
                "vectors": [list(v) for v in vectors],
                "smith_diagonal": list(smith_diagonal(block)),
            }
        )
    return u.inverse(), u


def complete_to_unimodular_basis(
    vectors: Iterable[Sequence[int]], ambient_dim: int | None = None
) -> tuple[IntMatrix, IntMatrix]:
    """
    Extend a unimodular set to a basis of Z^n.

    Returns ``(B, Bdual)``: the first k columns of ``B`` are the inputs and
    ``Bdual · B = I``, so row i of ``Bdual`` is the functional dual to
    column i of ``B``. Both are deterministic in the input.
    """
    vectors = tuple(tuple(int(x) for x in v) for v in vectors)
    if ambient_dim is None:
        if not vectors:
            raise ValueError("ambient_dim is required for an empty set")
        ambient_dim = len(vectors[0])
    return _completion(vectors, ambient_dim)


def quotient_projection(
    cone_rays: Iterable[Sequence[int]], ambient_dim: int | None = None
) -> IntMatrix:
    """
    Projection Z^n → Z^(n-k) whose kernel is the span of ``cone_rays``.

    The rows are the last n-k rows of ``Bdual``.
    """
    cone_rays = tuple(tuple(v) for v in cone_rays)
    basis, dual = complete_to_unimodular_basis(cone_rays, ambient_dim)
    return IntMatrix.from_rows(dual.rows[len(cone_rays):], dual.ncols)
