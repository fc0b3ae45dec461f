"""
Exact rational arithmetic helpers.

Every scalar in the engine is a ``fractions.Fraction``. Floats never enter a
computation; ``math.inf`` is the only non-rational value and marks an
unbounded window or bar end.
"""
import math
import logging
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from enum import Enum
from fractions import Fraction
from typing import Tuple, Union

from ..config import ROOT_BISECTION_BITS
from ..error_handlers import InvalidArgument

logger = logging.getLogger(__name__)

Rational = Fraction
Extended = Union[Fraction, float]

INFINITY = math.inf


class Ordering(Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and strings to a Fraction; floats are rejected."""
    if isinstance(value, bool):
        raise InvalidArgument(f"Not a rational scalar: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise InvalidArgument(f"Not a rational scalar: {value!r}", {'type': type(value).__name__})


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", an integer or a decimal string.

    Raises:
        InvalidArgument: for empty text, exponents, nan/inf or malformed input
    """
    if not isinstance(text, str):
        raise InvalidArgument(f"Expected a string scalar, got {type(text).__name__}")
    cleaned = text.strip()
    if not cleaned or any(c in cleaned.lower() for c in ('e', 'n', 'i', '_')):
        raise InvalidArgument(f"Malformed rational: {text!r}")
    try:
        return Fraction(cleaned)
    except (ValueError, ZeroDivisionError):
        raise InvalidArgument(f"Malformed rational: {text!r}")


def parse_extended(text: str) -> Extended:
    """Like parse_rational but also accepts "inf"."""
    if isinstance(text, str) and text.strip().lower() in ('inf', '+inf'):
        return INFINITY
    return parse_rational(text)


def render_rational(q: Extended) -> str:
    """Lossless rendering: "p/q", bare integers, "inf" for +infinity."""
    if isinstance(q, float):
        if q == INFINITY:
            return 'inf'
        raise InvalidArgument(f"Refusing to render float {q!r}")
    return str(Fraction(q))


def to_decimal(q: Extended, places: int) -> str:
    """Fixed-precision decimal display, rounded half-even."""
    if isinstance(q, float):
        return render_rational(q)
    q = Fraction(q)
    with localcontext() as ctx:
        ctx.prec = max(28, places + len(str(abs(q.numerator // q.denominator))) + 2)
        value = Decimal(q.numerator) / Decimal(q.denominator)
        return str(value.quantize(Decimal(1).scaleb(-places), rounding=ROUND_HALF_EVEN))


def floor_strict(q: Fraction) -> Tuple[int, bool]:
    """Return (floor(q), q is an integer)."""
    q = Fraction(q)
    return q.numerator // q.denominator, q.denominator == 1


def ceil_int(q: Fraction) -> int:
    q = Fraction(q)
    return -((-q.numerator) // q.denominator)


def cmp_power(x: Fraction, y: Fraction, m: int) -> Ordering:
    """Order x against y^(1/m) exactly by comparing x^m with y.

    Negative x is always LESS.

    Raises:
        InvalidArgument: if y <= 0 or m < 1
    """
    if m < 1:
        raise InvalidArgument(f"cmp_power exponent must be positive, got {m}")
    if y <= 0:
        raise InvalidArgument(f"cmp_power needs y > 0, got {y}")
    if x < 0:
        return Ordering.LESS
    lhs = Fraction(x) ** m
    if lhs < y:
        return Ordering.LESS
    if lhs > y:
        return Ordering.GREATER
    return Ordering.EQUAL


def root_bounds(y: Fraction, m: int, bits: int = ROOT_BISECTION_BITS) -> Tuple[Fraction, Fraction]:
    """Rational bracket lo <= y^(1/m) <= hi with hi - lo <= 2^-bits * hi.

    Exact (lo == hi) when the root is found rational during bisection.
    """
    y = Fraction(y)
    if y <= 0:
        raise InvalidArgument(f"root_bounds needs y > 0, got {y}")
    if m == 1:
        return y, y
    lo, hi = Fraction(0), max(Fraction(1), y)
    tolerance = Fraction(1, 2 ** bits)
    while hi - lo > tolerance * hi:
        mid = (lo + hi) / 2
        order = cmp_power(mid, y, m)
        if order is Ordering.EQUAL:
            return mid, mid
        if order is Ordering.LESS:
            lo = mid
        else:
            hi = mid
    return lo, hi


def exp_bounds(q: Fraction, tolerance: Fraction) -> Tuple[Fraction, Fraction]:
    """Rational enclosure lo <= e^q <= hi with hi - lo <= tolerance * hi."""
    q = Fraction(q)
    if tolerance <= 0:
        raise InvalidArgument("exp_bounds tolerance must be positive")
    if q < 0:
        lo, hi = exp_bounds(-q, tolerance)
        return 1 / hi, 1 / lo
    total = Fraction(1)
    term = Fraction(1)
    k = 0
    while True:
        k += 1
        term = term * q / k
        total += term
        # tail after term k is below term * r / (1 - r), r = q / (k + 1)
        ratio = q / (k + 1)
        if ratio < 1:
            tail = term * ratio / (1 - ratio)
            if tail <= tolerance * total:
                return total, total + tail
