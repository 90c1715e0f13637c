from typing import List

from app.exceptions import TableError
from app.models.polynomial import LambdaPoly
from app.models.symbol import DLOCoefficientTable
from app.schemas.base import BaseSchema, Dimension, Order, RationalText, rational, rational_text


# c[k][r] is the coefficient list of c_r^(k), lowest power first.
CoefficientGrid = List[List[List[RationalText]]]


def _grid(table: dict, n: int) -> list:
    return [
        [[rational_text(v) for v in table[(k, r)].coeffs] for r in range(k + 1)]
        for k in range(n + 1)
    ]


def _entries(grid: CoefficientGrid, n: int, name: str) -> dict:
    if len(grid) != n + 1 or any(len(row) != k + 1 for k, row in enumerate(grid)):
        raise TableError(f"'{name}' must be a triangle of {n + 1} rows")
    return {
        (k, r): LambdaPoly([rational(v) for v in coeffs])
        for k, row in enumerate(grid)
        for r, coeffs in enumerate(row)
    }


class TableSchema(BaseSchema):
    """Cache file layout of a coefficient table."""

    dim: Dimension
    n: Order
    c: CoefficientGrid
    ctilde: CoefficientGrid

    def to_model(self) -> DLOCoefficientTable:
        return DLOCoefficientTable(
            dim=self.dim,
            max_order=self.n,
            c=_entries(self.c, self.n, "c"),
            ctilde=_entries(self.ctilde, self.n, "ctilde"),
        )

    @classmethod
    def from_model(cls, table: DLOCoefficientTable) -> "TableSchema":
        return cls(
            dim=table.dim,
            n=table.max_order,
            c=_grid(table.c, table.max_order),
            ctilde=_grid(table.ctilde, table.max_order),
        )
