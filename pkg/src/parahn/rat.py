"""Exact rationals: stdlib Fraction plus the fixed "a/b" wire format."""

from fractions import Fraction

from .errors import ParseError


def rat_str(x) -> str:
    f = Fraction(x)
    return f"{f.numerator}/{f.denominator}"


def rat_parse(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise ParseError(f"expected rational string, got {s!r}")
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {s!r}: {exc}") from exc


def ceil_frac(x) -> int:
    f = Fraction(x)
    return -((-f.numerator) // f.denominator)


def floor_frac(x) -> int:
    f = Fraction(x)
    return f.numerator // f.denominator
