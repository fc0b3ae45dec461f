"""
Certified beta windows from simultaneous Diophantine approximation.

A witness is a tuple (p_1..p_n) together with an open interval of beta on
which every margin p_j a_j / a_{n+1} - beta is positive and small. For n = 1
the windows are explicit; for n >= 2 the search scans p_n upward and rounds
the remaining p_j to the nearest integer.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple

from .. import config
from ..error_handlers import DegenerateInput, InvalidArgument, OutsideWindow, SearchExhausted
from .domains import EllipsoidSpec
from .numeric import Ordering, ceil_int, cmp_power, floor_strict, parse_rational, render_rational, root_bounds

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DirichletWitness:
    p: Tuple[int, ...]
    window: Tuple[Fraction, Fraction]
    quality: Fraction

    @property
    def lo(self) -> Fraction:
        return self.window[0]

    @property
    def hi(self) -> Fraction:
        return self.window[1]

    def contains(self, beta: Fraction) -> bool:
        return self.lo < beta < self.hi

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_dict(self) -> Dict[str, Any]:
        return {
            'p': list(self.p),
            'window': [render_rational(self.lo), render_rational(self.hi)],
            'quality': render_rational(self.quality),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'DirichletWitness':
        try:
            p = tuple(int(v) for v in data['p'])
            lo, hi = (parse_rational(v) for v in data['window'])
            quality = parse_rational(data['quality'])
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgument(f"Malformed witness: {e}")
        if not lo < hi:
            raise InvalidArgument("Witness window must be nonempty", {'window': data['window']})
        return cls(p, (lo, hi), quality)


@dataclass(frozen=True)
class BetaCertificate:
    beta: Fraction
    witness: DirichletWitness
    margins: Tuple[Fraction, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'beta': render_rational(self.beta),
            'witness': self.witness.to_dict(),
            'margins': [render_rational(m) for m in self.margins],
        }


def _split(base: EllipsoidSpec):
    caps = base.capacities
    n = len(caps) - 1
    if n < 1:
        raise InvalidArgument("Need an ellipsoid with at least two capacities", {'m': len(caps)})
    return caps[:-1], caps[-1], n


def _nearest_integer(q: Fraction) -> int:
    """Nearest integer, ties broken downward."""
    floor, _ = floor_strict(q)
    return floor if q - floor <= Fraction(1, 2) else floor + 1


def dirichlet_tuple(base: EllipsoidSpec, p_n_min: int, ceiling: Optional[int] = None) -> DirichletWitness:
    """Find a witness tuple with p_n >= p_n_min.

    Args:
        base: ellipsoid E(a_1..a_{n+1}), n >= 1
        p_n_min: smallest admissible p_n (for n = 1, the smallest window right end)
        ceiling: last p_n tried for n >= 2 (defaults to config.DIRICHLET_PN_CEILING)

    Returns:
        DirichletWitness whose window lies inside the certified set of betas

    Raises:
        SearchExhausted: no tuple passes the approximation test below the ceiling
    """
    if p_n_min < 1:
        raise InvalidArgument(f"p_n_min must be positive, got {p_n_min}")
    lower, a_top, n = _split(base)

    if n == 1:
        x = lower[0] / a_top
        r = max(1, ceil_int(p_n_min / x))
        hi = r * x
        width = 1 / hi ** 2
        return DirichletWitness((r,), (hi - width, hi), width)

    ceiling = config.DIRICHLET_PN_CEILING if ceiling is None else ceiling
    a_n = lower[-1]
    A = max(a / a_top for a in lower)
    for p_n in range(p_n_min, ceiling + 1):
        p = []
        for a_j in lower[:-1]:
            target = p_n * a_n / a_j
            p_j = _nearest_integer(target)
            if p_j < 1:
                break
            distance = abs(target - p_j)
            if distance and cmp_power(distance, Fraction(1, p_n), n - 1) is Ordering.GREATER:
                break
            p.append(p_j)
        else:
            p.append(p_n)
            right = min(p_j * a_j / a_top for p_j, a_j in zip(p, lower))
            root_lo, _ = root_bounds(Fraction(1, p_n), n - 1)
            left = right - A * root_lo
            quality = max(p_j * a_j / a_top for p_j, a_j in zip(p, lower)) - left
            logger.debug(f"Dirichlet tuple {p} accepted at p_n={p_n}")
            return DirichletWitness(tuple(p), (left, right), quality)

    raise SearchExhausted(f"No Dirichlet tuple with {p_n_min} <= p_n <= {ceiling}",
                          {'p_n_min': p_n_min, 'ceiling': ceiling})


def certify_beta(base: EllipsoidSpec, beta: Fraction, witness: DirichletWitness) -> BetaCertificate:
    """Check beta against a witness window and the non-integrality conditions.

    Raises:
        OutsideWindow: beta is not strictly inside the window
        DegenerateInput: some beta a_{n+1} / a_j is an integer
    """
    lower, a_top, n = _split(base)
    if len(witness.p) != n:
        raise InvalidArgument("Witness length does not match the base", {'p': list(witness.p), 'n': n})
    if not witness.contains(beta):
        raise OutsideWindow(f"beta={beta} is outside the open window ({witness.lo}, {witness.hi})",
                            {'beta': render_rational(beta),
                             'window': [render_rational(witness.lo), render_rational(witness.hi)]})

    margins = tuple(p_j * a_j / a_top - beta for p_j, a_j in zip(witness.p, lower))
    for index, margin in enumerate(margins, start=1):
        if margin <= 0:
            raise OutsideWindow(f"Margin for j={index} is not positive",
                                {'j': index, 'margin': render_rational(margin)})
    for index, a_j in enumerate(lower, start=1):
        _, is_integer = floor_strict(beta * a_top / a_j)
        if is_integer:
            raise DegenerateInput(f"beta * a_{n + 1} / a_{index} is an integer",
                                  {'j': index, 'value': render_rational(beta * a_top / a_j)})
    return BetaCertificate(beta, witness, margins)
