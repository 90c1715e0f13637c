#!/usr/bin/env python3
"""
Coefficient table precomputation for densops.

Solves the coefficient tables of the projectively equivariant symbol map and
stores them in the table cache, so later commands only read them.

Usage:
    python scripts/build_tables.py --sample                 # d <= MAX_TABLE_DIM, n <= DEFAULT_MAX_ORDER
    python scripts/build_tables.py --config tables.yaml     # Tables listed in a YAML file
    python scripts/build_tables.py --table 2 4 --verify     # One table, re-solved and compared

Examples:
    DENSOPS_TABLE_CACHE=.tables python scripts/build_tables.py --sample
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from app.config import settings
from app.exceptions import DensopsError
from app.log import configure_logging
from app.tables import TableRegistry


# ============================================================================
# TABLE BUILDING
# ============================================================================

def build_table(registry: TableRegistry, d: int, n: int, verify: bool = False) -> bool:
    """Build (or load) one table; returns False when it fails."""
    try:
        if verify:
            registry.verify(d, n)
        else:
            registry.get(d, n)
    except DensopsError as exc:
        print(f"  d={d} n={n}: FAILED [{exc.code}] {exc.message}")
        return False
    print(f"  d={d} n={n}: ok{' (verified)' if verify else ''}")
    return True


def build_sample(registry: TableRegistry) -> list[tuple[int, int, bool]]:
    """The default grid: every d <= MAX_TABLE_DIM at order DEFAULT_MAX_ORDER."""
    print("\n=== Building sample tables ===\n")
    return [
        (d, settings.DEFAULT_MAX_ORDER, build_table(registry, d, settings.DEFAULT_MAX_ORDER))
        for d in range(1, settings.MAX_TABLE_DIM + 1)
    ]


def build_from_yaml(config_path: str, cache: Path | None) -> list[tuple[int, int, bool]]:
    """Build the tables listed in a YAML configuration file."""
    try:
        import yaml
    except ImportError:
        print("Error: PyYAML is required for YAML config. Install with: pip install pyyaml")
        sys.exit(1)

    with open(config_path, "r", encoding="utf-8") as f:
        config = yaml.safe_load(f) or {}

    if cache is None and config.get("cache"):
        cache = Path(config["cache"])
    registry = TableRegistry(cache if cache is not None else settings.TABLE_CACHE)

    print(f"\n=== Building tables from {config_path} ===\n")
    results = []
    for entry in config.get("tables", []):
        d, n = int(entry["d"]), int(entry.get("n", settings.DEFAULT_MAX_ORDER))
        results.append((d, n, build_table(registry, d, n, bool(entry.get("verify", False)))))
    return results


def main() -> int:
    parser = argparse.ArgumentParser(
        description="Precompute densops coefficient tables",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/build_tables.py --sample
  python scripts/build_tables.py --config scripts/tables_example.yaml
  python scripts/build_tables.py --table 1 8 --cache .tables
        """
    )
    parser.add_argument(
        "--sample",
        action="store_true",
        help="Build the default grid of tables",
    )
    parser.add_argument(
        "--config",
        type=str,
        help="Path to YAML config file",
    )
    parser.add_argument(
        "--table",
        nargs=2,
        type=int,
        metavar=("D", "N"),
        help="Build one table of dimension D and maximal order N",
    )
    parser.add_argument(
        "--verify",
        action="store_true",
        help="Re-solve --table and compare it with the cache",
    )
    parser.add_argument(
        "--cache",
        type=Path,
        help="Cache directory (default: DENSOPS_TABLE_CACHE)",
    )

    args = parser.parse_args()

    # If no arguments, show help
    if not any([args.sample, args.config, args.table]):
        parser.print_help()
        print("\n\nTip: Use --sample to build the default tables")
        return 0

    configure_logging()
    registry = TableRegistry(args.cache if args.cache is not None else settings.TABLE_CACHE)
    if registry.cache_dir is None:
        print("Warning: no cache directory configured; tables are solved but not stored")

    results = []
    if args.table:
        d, n = args.table
        results.append((d, n, build_table(registry, d, n, args.verify)))
    if args.config:
        results.extend(build_from_yaml(args.config, args.cache))
    if args.sample:
        results.extend(build_sample(registry))

    failed = [(d, n) for d, n, ok in results if not ok]
    print(f"\n{len(results) - len(failed)} of {len(results)} tables built")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
