"""Exact rational thresholds.

All erasure-fraction comparisons in this package are integer comparisons
derived from ``fractions.Fraction`` values, never floating point, so that
threshold checks are bit-exact and reproducible.
"""

from __future__ import annotations

from fractions import Fraction


def parse_fraction(text: str) -> Fraction:
    """Parse ``"p/q"`` or a plain integer/decimal string into a Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(text)


def fraction_str(value: Fraction) -> str:
    """Render a Fraction as ``p/q`` (or ``p`` when integral)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def count_at_least(count: int, total: int, frac: Fraction) -> bool:
    """True iff count/total >= frac, computed over integers."""
    return count * frac.denominator >= frac.numerator * total


def count_less_than(count: int, total: int, frac: Fraction) -> bool:
    """True iff count/total < frac, computed over integers."""
    return count * frac.denominator < frac.numerator * total


def ceil_mul(frac: Fraction, scale: int) -> int:
    """ceil(frac * scale) as an exact integer."""
    num = frac.numerator * scale
    den = frac.denominator
    return -((-num) // den)


def floor_mul(frac: Fraction, scale: int) -> int:
    """floor(frac * scale) as an exact integer."""
    return (frac.numerator * scale) // frac.denominator
