"""
Exact rational and grid point text codecs
"""

from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Annotated, Any

from pydantic import PlainSerializer, PlainValidator

GridPoint = tuple[int, ...]


def to_fraction(value: Any) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to a Fraction. Floats are refused."""
    if isinstance(value, bool):
        raise ValueError(f"Not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not a rational: {value!r}") from e
    raise ValueError(f"Not an exact rational (type {type(value).__name__}): {value!r}")


def format_rational(value: Fraction) -> str:
    """Render as "p/q", or as an integer string when q = 1"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value: Fraction, digits: int) -> str:
    """Approximate decimal rendering, prefixed with "~" to mark it as non-exact"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    with localcontext() as ctx:
        ctx.prec = max(digits, 1)
        approx = Decimal(value.numerator) / Decimal(value.denominator)
    return f"~{approx}"


def render_rational(value: Fraction, digits: int | None = None) -> str:
    """Exact text by default, approximate decimal when `digits` is given"""
    return format_rational(value) if digits is None else format_decimal(value, digits)


def format_point(point: GridPoint) -> str:
    """Grid points serialize as comma-joined decimal coordinates"""
    return ",".join(str(c) for c in point)


def parse_point(text: str) -> GridPoint:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError as e:
        raise ValueError(f"Malformed grid point: {text!r}") from e


Rational = Annotated[
    Fraction,
    PlainValidator(to_fraction),
    PlainSerializer(format_rational, return_type=str),
]
