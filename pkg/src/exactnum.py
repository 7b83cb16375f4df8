"""
Exact rational scalars and the series constants built from them.

Rat is fractions.Fraction: normalised to lowest terms with a positive
denominator on every construction, so equality is plain ``==`` everywhere.
"""
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from numbers import Rational

try:
    from .errors import RationalFormatError
except ImportError:
    from errors import RationalFormatError

Rat = Fraction


def to_rat(value):
    """
    Coerce an int, Fraction or "p/q" string to Rat.

    Floats are rejected: they would smuggle rounding into exact results.
    """
    if isinstance(value, bool):
        raise RationalFormatError(f"Boolean {value!r} is not a rational number")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rat(value)
    raise RationalFormatError(
        f"Unsupported rational value {value!r} ({type(value).__name__}); use an int or a 'p/q' string"
    )


def parse_rat(text):
    """Parse 'p/q', 'p' or '-p/q' (surrounding whitespace allowed)."""
    if not isinstance(text, str):
        raise RationalFormatError(f"Expected a 'p/q' string, got {text!r}")
    stripped = text.strip()
    if not stripped or any(ch in stripped for ch in '.eE'):
        raise RationalFormatError(f"Invalid rational literal: {text!r}")
    try:
        return Fraction(stripped)
    except (ValueError, ZeroDivisionError) as exc:
        raise RationalFormatError(f"Invalid rational literal: {text!r}") from exc


def format_rat(value):
    """Canonical 'p/q' rendering ('p' when q = 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_decimal(value, digits):
    """
    Decimal approximation with exactly `digits` places, rounded half-even.

    The rounding is done on the exact rational, so the printed digits agree
    with the exact value to the last place.
    """
    if digits < 0:
        raise RationalFormatError(f"Number of digits must be non-negative, got {digits}")
    scaled = round(Fraction(value) * 10 ** digits)  # Fraction.__round__ is half-even
    sign = '-' if scaled < 0 else ''
    scaled = abs(scaled)
    if digits == 0:
        return f"{sign}{scaled}"
    whole, frac = divmod(scaled, 10 ** digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


@lru_cache(maxsize=None)
def bernoulli(n):
    """
    Bernoulli number B_n with B_1 = -1/2.

    Uses sum_{k=0}^{n} C(n+1, k) B_k = 0. Only even indices are consumed
    downstream, so the B_1 convention does not leak into any result.
    """
    if n < 0:
        raise ValueError(f"Bernoulli index must be non-negative, got {n}")
    if n == 0:
        return Fraction(1)
    total = sum(comb(n + 1, k) * bernoulli(k) for k in range(n))
    return -total / (n + 1)


@lru_cache(maxsize=None)
def coth_series_coeff(n):
    """Coefficient of x^(2n) in x / tanh(x): 2^(2n) B_(2n) / (2n)!."""
    if n < 0:
        raise ValueError(f"Series index must be non-negative, got {n}")
    return Fraction(2 ** (2 * n)) * bernoulli(2 * n) / factorial(2 * n)
