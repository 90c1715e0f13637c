"""
Exact rational scalars.

Every numeric constant in the package is a ``fractions.Fraction``; floats are
refused at the boundary so that no rounding can enter an identity check.
"""
import re
from fractions import Fraction
from numbers import Rational as _RationalABC

from app.exceptions import ParseError


Rational = Fraction

MAX_TEXT_LENGTH = 2000

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def as_rational(value) -> Fraction:
    """
    Coerce ``value`` to an exact rational.

    Accepts Fractions, integers and strings of the form ``p`` or ``p/q``.
    Floats, decimals and booleans are rejected.
    """
    if isinstance(value, bool):
        raise ParseError(f"expected a rational, got boolean {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        if len(value) > MAX_TEXT_LENGTH:
            raise ParseError(f"rational literal longer than {MAX_TEXT_LENGTH} characters")
        match = _RATIONAL_RE.match(value)
        if match is None:
            raise ParseError(f"malformed rational {value!r}; expected 'p' or 'p/q'")
        num = int(match.group(1))
        den = int(match.group(2)) if match.group(2) is not None else 1
        if den == 0:
            raise ParseError(f"zero denominator in {value!r}")
        return Fraction(num, den)
    raise ParseError(f"expected an exact rational, got {type(value).__name__} {value!r}")


def format_rational(value: Fraction) -> str:
    """Render as ``p`` or ``p/q`` (reduced, positive denominator)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"

