"""Exact rationals and their "p/q" wire format.

All payoffs and probabilities in this package are `fractions.Fraction`
values; floats are rejected so that best-reply ties stay exact.
"""

from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Parse a rational from the wire format.

    Accepts "p/q" and integer strings, plain ints, and Fraction
    instances.  Floats are rejected.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    raise ValueError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Render a rational as "p/q", or "p" when the denominator is one."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
