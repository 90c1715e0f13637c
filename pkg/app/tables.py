import logging
import threading
from pathlib import Path

from pydantic import ValidationError

from app.config import settings
from app.exceptions import OrderError, TableError
from app.models.symbol import MAX_ORDER, DLOCoefficientTable
from app.schemas.table import TableSchema
from app.services.dlo_solver import compare_with_reference, solve_dlo_table


logger = logging.getLogger(__name__)


class TableRegistry:
    """
    Coefficient tables keyed by (d, n).

    A table is built once, then shared read-only. A table of higher order
    serves requests for lower orders by truncation.
    """

    def __init__(self, cache_dir: Path | str | None = None):
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self._tables: dict[tuple[int, int], DLOCoefficientTable] = {}
        self._lock = threading.Lock()

    def cache_path(self, d: int, n: int) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"dlo_d{d}_n{n}.json"

    def get(self, d: int, n: int) -> DLOCoefficientTable:
        if n > MAX_ORDER:
            raise OrderError(f"order {n} exceeds the supported maximum {MAX_ORDER}")
        with self._lock:
            table = self._from_memory(d, n)
            if table is not None:
                return table
            table = self._load(d, n)
            if table is None:
                table = solve_dlo_table(d, n)
                compare_with_reference(table)
                self._store(table)
            self._tables[(d, n)] = table
            return table

    def verify(self, d: int, n: int) -> DLOCoefficientTable:
        """Regenerate the table and compare it with the cached one."""
        cached = self.get(d, n)
        fresh = solve_dlo_table(d, n)
        if TableSchema.from_model(fresh) != TableSchema.from_model(cached):
            raise TableError(f"cached table for d={d}, n={n} differs from a fresh solve")
        logger.info("Verified table d=%d n=%d", d, n)
        return fresh

    def clear(self):
        with self._lock:
            self._tables.clear()

    def _from_memory(self, d: int, n: int) -> DLOCoefficientTable | None:
        if (d, n) in self._tables:
            return self._tables[(d, n)]
        larger = sorted(m for dim, m in self._tables if dim == d and m > n)
        if larger:
            table = self._tables[(d, larger[0])].truncated(n)
            self._tables[(d, n)] = table
            return table
        return None

    def _load(self, d: int, n: int) -> DLOCoefficientTable | None:
        path = self.cache_path(d, n)
        if path is None or not path.exists():
            logger.debug("Table cache miss d=%d n=%d", d, n)
            return None
        try:
            schema = TableSchema.model_validate_json(path.read_text(encoding="utf-8"))
        except (OSError, ValidationError) as exc:
            raise TableError(f"unreadable table cache {path}: {exc}") from None
        if (schema.dim, schema.n) != (d, n):
            raise TableError(f"table cache {path} holds d={schema.dim}, n={schema.n}")
        logger.debug("Table cache hit %s", path)
        return schema.to_model()

    def _store(self, table: DLOCoefficientTable):
        path = self.cache_path(table.dim, table.max_order)
        if path is None:
            return
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(TableSchema.from_model(table).model_dump_json(), encoding="utf-8")
        except OSError as exc:
            logger.warning("Could not write table cache %s: %s", path, exc)
            return
        logger.info("Wrote table cache %s", path)


_registry: TableRegistry | None = None


def get_table_registry() -> TableRegistry:
    """Get the process-wide table registry."""
    global _registry
    if _registry is None:
        _registry = TableRegistry(settings.TABLE_CACHE)
    return _registry


def close_table_registry():
    """Drop the process-wide table registry."""
    global _registry
    if _registry is not None:
        _registry.clear()
        _registry = None
