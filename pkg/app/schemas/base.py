from fractions import Fraction
from typing import Annotated

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field

from app.models.rational import as_rational, format_rational
from app.models.symbol import MAX_ORDER


def _canonical_rational(value) -> str:
    return format_rational(as_rational(value))


# "p" or "p/q"; integers are accepted on input, floats are not.
RationalText = Annotated[str, BeforeValidator(_canonical_rational)]
Dimension = Annotated[int, Field(ge=1, le=64)]
Order = Annotated[int, Field(ge=0, le=MAX_ORDER)]


class BaseSchema(BaseModel):
    """Base schema with common configuration."""

    model_config = ConfigDict(from_attributes=True, extra="forbid")


def rational(text: str) -> Fraction:
    return as_rational(text)


def rational_text(value) -> str:
    return format_rational(as_rational(value))
