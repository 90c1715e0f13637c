"""
Command-line driver.

Usage:
    python main.py lift --method canonical2 --lambda 2 --op "x1*d1*d1"
    python main.py compose --a "d1" --b "x1"
    python main.py check equivariance --method dlo --d 1 --n 2 --trials 20
    echo '{"dim":1,"terms":[...]}' | python main.py adjoint --op -

Results go to stdout as compact JSON (or DSL / LaTeX text with --format);
logs go to stderr.
"""
import argparse
import sys
from pathlib import Path

from app.exceptions import ParseError
from app.log import configure_logging
from app.services.checks import CHECKS
from app.services.commands import Command, render_error, run
from app.services.lifting import LIFT_METHODS
from app.tables import TableRegistry, get_table_registry


GLOBAL_OPTIONS = ("verb", "log_level", "table_cache")


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser that raises ParseError instead of exiting."""

    def error(self, message):
        raise ParseError(f"{self.prog}: {message}")


def _rational_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _rows(text: str) -> list[list[str]]:
    """'1;-1,2;3,-1,1' -> [['1'], ['-1', '2'], ['3', '-1', '1']]."""
    return [_rational_list(row) for row in text.split(";")]


def _add_common(parser: argparse.ArgumentParser, formats=("json", "dsl", "latex")):
    parser.add_argument("--d", type=int, help="Dimension (inferred from the inputs when omitted)")
    parser.add_argument("--format", choices=formats, help="Output format (default: json)")


def build_parser() -> CommandParser:
    parser = CommandParser(
        prog="densops",
        description="Exact algebra of differential operators on densities",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Operators are given in the DSL (x1, d1, w, rationals, + - * ^ ( )) or as
operator JSON (text starting with '{'); '-' reads the value from stdin.

Examples:
  python main.py restrict --op "(w^2+1)*d1*d1 + d1" --lambda 1/2
  python main.py lift --method disting --lambda 1/3 --op "d1*d1*d2" --potential "x1^2 + x2"
  python main.py table --d 2 --n 4 --verify-table
        """,
    )
    parser.add_argument("--log-level", help="Log level for stderr (default: from DENSOPS_LOG_LEVEL)")
    parser.add_argument("--table-cache", type=Path, help="Directory of cached coefficient tables")
    verbs = parser.add_subparsers(dest="verb", parser_class=CommandParser)
    verbs.required = True

    compose = verbs.add_parser("compose", help="Normal-ordered product a o b")
    compose.add_argument("--a", required=True, help="Left operator")
    compose.add_argument("--b", required=True, help="Right operator")
    _add_common(compose)

    adjoint = verbs.add_parser("adjoint", help="Canonical adjoint")
    adjoint.add_argument("--op", required=True)
    _add_common(adjoint)

    restrict = verbs.add_parser("restrict", help="Substitute w = lambda")
    restrict.add_argument("--op", required=True)
    restrict.add_argument("--lambda", dest="lam", required=True)
    _add_common(restrict)

    apply = verbs.add_parser("apply", help="Apply an operator to a density")
    apply.add_argument("--op", required=True)
    apply.add_argument("--density", required=True, help="Parts poly@weight, e.g. 'x1^2@1/2 + 1@0'")
    _add_common(apply, formats=("json", "dsl"))

    lift = verbs.add_parser("lift", help="Lift an operator on F_lambda to a pencil")
    lift.add_argument("--method", required=True, choices=LIFT_METHODS)
    lift.add_argument("--op", required=True)
    lift.add_argument("--lambda", dest="lam", required=True)
    lift.add_argument("--p", help="First coordinate of [p:q]")
    lift.add_argument("--q", help="Second coordinate of [p:q]")
    lift.add_argument("--c", help="Affine parameter of the first-order line")
    lift.add_argument("--mu", help="Target weight of the isomorphism")
    lift.add_argument("--b", help="Line parameter of the volume-preserving family")
    lift.add_argument("--n", type=int, help="Order of the lifting (default: order of the operator)")
    lift.add_argument("--cvals", type=_rational_list, help="c_1,...,c_n")
    lift.add_argument("--dvals", type=_rational_list, help="d_1,...,d_n")
    lift.add_argument("--rows", type=_rows, help="Triangular matrix rows, e.g. '1;-1,2;3,-1,1'")
    lift.add_argument("--matrix-file", type=Path, help='JSON file {"rows": [[...], ...]}')
    lift.add_argument("--gamma", action="append", help="Gamma_i of the volume form, once per axis")
    lift.add_argument("--potential", help="phi with rho = exp(-phi)")
    lift.add_argument("--gamma-file", type=Path, help="Volume JSON file")
    _add_common(lift)

    decompose = verbs.add_parser("decompose", help="Projectively graded pieces delta_n..delta_0")
    decompose.add_argument("--op", required=True)
    decompose.add_argument("--lambda", dest="lam", required=True)
    decompose.add_argument("--n", type=int)
    _add_common(decompose)

    symbol = verbs.add_parser("symbol", help="Projectively equivariant full symbol")
    symbol.add_argument("--op", required=True)
    symbol.add_argument("--lambda", dest="lam", required=True)
    symbol.add_argument("--n", type=int)
    _add_common(symbol, formats=("json", "dsl"))

    quantize = verbs.add_parser("quantize", help="Projectively equivariant quantization")
    quantize.add_argument("--symbol", required=True, help="Symbol in x<i>, xi<i> or symbol JSON")
    quantize.add_argument("--mu", required=True)
    quantize.add_argument("--n", type=int)
    _add_common(quantize)

    check = verbs.add_parser("check", help="Randomized property check")
    check.add_argument("property", choices=tuple(CHECKS))
    check.add_argument("--method", choices=LIFT_METHODS)
    check.add_argument("--d", type=int)
    check.add_argument("--n", type=int)
    check.add_argument("--trials", type=int)
    check.add_argument("--seed", type=int)

    schwarzian = verbs.add_parser("schwarzian", help="Projectively invariant scalar of a second-order operator")
    schwarzian.add_argument("--op", required=True)
    schwarzian.add_argument("--lambda", dest="lam", required=True)
    _add_common(schwarzian, formats=("json", "dsl"))

    table = verbs.add_parser("table", help="Coefficient table of the symbol map")
    table.add_argument("--d", type=int)
    table.add_argument("--n", type=int)
    table.add_argument("--verify-table", dest="verify", action="store_true", default=None)

    return parser


def main(argv: list[str] | None = None, stdin: bytes | None = None) -> int:
    """Run the command line and print its result; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
    except ParseError as exc:
        sys.stdout.write(render_error(exc) + "\n")
        return 2

    configure_logging(args.log_level)
    registry = TableRegistry(args.table_cache) if args.table_cache else get_table_registry()
    options = {key: value for key, value in vars(args).items() if key not in GLOBAL_OPTIONS}
    if stdin is None:
        stdin = sys.stdin.buffer.read() if "-" in options.values() else b""

    code, text = run(Command(args.verb, options), stdin, registry)
    sys.stdout.write(text + "\n")
    return code
