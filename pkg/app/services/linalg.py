"""
Exact linear algebra over the rationals.

Elimination is fraction-free (Bareiss): each row is first cleared of
denominators, after which every intermediate entry is an integer minor of the
original system and the division by the previous pivot is exact.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from app.exceptions import DimensionError, TableError
from app.models.polynomial import LambdaPoly
from app.models.rational import as_rational


@dataclass(frozen=True)
class LinearSolution:
    solution: tuple[Fraction, ...]
    kernel_rank: int

    @property
    def is_unique(self) -> bool:
        return self.kernel_rank == 0


@dataclass(frozen=True)
class Inconsistent:
    """No solution exists; ``rank`` is the rank of the coefficient matrix."""

    rank: int


def _integer_rows(A: Sequence[Sequence], b: Sequence, ncols: int) -> list[list[int]]:
    rows = []
    for row, rhs in zip(A, b):
        values = [as_rational(v) for v in row] + [as_rational(rhs)]
        scale = lcm(*(v.denominator for v in values))
        rows.append([int(v * scale) for v in values])
    return rows


def _echelon(rows: list[list[int]], ncols: int) -> list[int]:
    """Bareiss elimination in place; returns the pivot columns."""
    m = len(rows)
    previous = 1
    r = 0
    pivots = []
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot_row = rows[r]
        pivot = pivot_row[c]
        for i in range(r + 1, m):
            row = rows[i]
            factor = row[c]
            for j in range(c + 1, ncols + 1):
                row[j] = (pivot * row[j] - factor * pivot_row[j]) // previous
            row[c] = 0
        # Rows above the pivot keep their scale; only rows below are updated.
        previous = pivot
        pivots.append(c)
        r += 1
    return pivots


def solve_linear_exact(A: Sequence[Sequence], b: Sequence, ncols: int | None = None) -> LinearSolution | Inconsistent:
    """
    Solve A x = b exactly.

    Returns one solution (free variables set to 0) together with the dimension
    of the kernel of A, or ``Inconsistent`` when the system has no solution.
    ``ncols`` is only needed when A has no rows.
    """
    if len(A) != len(b):
        raise DimensionError(f"matrix has {len(A)} rows but right-hand side has {len(b)} entries")
    if ncols is None:
        if not A:
            raise DimensionError("cannot infer the number of unknowns of an empty system")
        ncols = len(A[0])
    for index, row in enumerate(A):
        if len(row) != ncols:
            raise DimensionError(f"row {index} has {len(row)} entries, expected {ncols}")

    rows = _integer_rows(A, b, ncols)
    pivots = _echelon(rows, ncols)
    rank = len(pivots)
    for row in rows[rank:]:
        if row[ncols] != 0:
            return Inconsistent(rank=rank)

    x = [Fraction(0)] * ncols
    for t in range(rank - 1, -1, -1):
        c = pivots[t]
        row = rows[t]
        total = Fraction(row[ncols])
        for j in range(c + 1, ncols):
            if row[j]:
                total -= row[j] * x[j]
        x[c] = total / row[c]
    return LinearSolution(solution=tuple(x), kernel_rank=ncols - rank)


def matrix_rank(A: Sequence[Sequence]) -> int:
    if not A:
        return 0
    ncols = len(A[0])
    rows = _integer_rows(A, [0] * len(A), ncols)
    return len(_echelon(rows, ncols))


def interpolate_lambda(samples: Sequence[tuple], max_degree: int) -> LambdaPoly:
    """
    Interpolate (lambda, value) samples by a polynomial of degree <= max_degree.

    The first max_degree + 1 samples determine the polynomial by Newton's
    divided differences; every further sample must lie on it.
    """
    points = [(as_rational(x), as_rational(y)) for x, y in samples]
    nodes = [x for x, _ in points]
    if len(set(nodes)) != len(nodes):
        raise TableError("interpolation nodes must be pairwise distinct")
    needed = max_degree + 1
    if len(points) < needed:
        raise TableError(f"need at least {needed} samples for degree {max_degree}, got {len(points)}")

    base = points[:needed]
    xs = [x for x, _ in base]
    table = [y for _, y in base]
    newton = [table[0]]
    for level in range(1, needed):
        table = [
            (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
            for i in range(len(table) - 1)
        ]
        newton.append(table[0])

    result = LambdaPoly()
    basis = LambdaPoly.constant(1)
    for i, coeff in enumerate(newton):
        result = result + basis * coeff
        basis = basis * LambdaPoly.linear(1, -xs[i])

    for x, y in points[needed:]:
        if result.evaluate(x) != y:
            raise TableError(
                f"sample at lambda={x} disagrees with the degree-{max_degree} interpolant"
            )
    return result
