"""
Certified barcodes and the implantation obstruction.

A certified barcode in degree k records, below its window end, exactly the
bars of the filtered complex in that degree: a bar born at every orbit period
of index k, guaranteed to persist up to its certified end. Rank queries and
the implantation calculus only ever look inside the window.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterable, List, Optional, Tuple

from ..error_handlers import HypothesisViolated, InternalError, InvalidArgument, QueryAtBirth
from .domains import SinkholeSpec, TruncatedEllipsoidSpec
from .numeric import INFINITY, Extended, parse_extended, render_rational, root_bounds
from .reeb import (ReebOrbit, center_axis_orbits, k_beta, sinkhole_centers,
                   trunc_nontrivial_period_infimum)
from .. import config

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Bar:
    birth: Fraction
    cert_end: Extended


@dataclass(frozen=True)
class CertifiedBarcode:
    degree: int
    window_end: Extended
    bars: Tuple[Bar, ...] = ()

    def __post_init__(self):
        if not self.window_end > 0:
            raise InvalidArgument("Barcode window must be positive", {'window_end': str(self.window_end)})
        for bar in self.bars:
            if not 0 < bar.birth < bar.cert_end <= self.window_end:
                raise InvalidArgument("Bars need 0 < birth < cert_end <= window_end",
                                      {'birth': render_rational(bar.birth),
                                       'cert_end': render_rational(bar.cert_end)})
        object.__setattr__(self, 'bars', tuple(sorted(self.bars, key=lambda b: (b.birth, b.cert_end))))

    def births(self) -> List[Fraction]:
        return [bar.birth for bar in self.bars]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'degree': self.degree,
            'window_end': render_rational(self.window_end),
            'bars': [[render_rational(b.birth), render_rational(b.cert_end)] for b in self.bars],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'CertifiedBarcode':
        try:
            bars = tuple(Bar(parse_extended(birth), parse_extended(end)) for birth, end in data['bars'])
            return cls(int(data['degree']), parse_extended(data['window_end']), bars)
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgument(f"Malformed barcode: {e}")


@dataclass(frozen=True)
class ImplantationBound:
    value: Extended
    attained: bool
    degree_used: Optional[int] = None
    witness_s: Optional[Fraction] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': render_rational(self.value),
            'attained': self.attained,
            'degree_used': self.degree_used,
            'witness_s': None if self.witness_s is None else render_rational(self.witness_s),
        }


def barcode_from_orbits(orbits: Iterable[ReebOrbit], degree: int, window_end: Extended) -> CertifiedBarcode:
    """Certified barcode in one degree from a complete orbit list below window_end.

    The list must contain every exact-period orbit below the window; corner
    families only need their bounds.

    Raises:
        HypothesisViolated: an adjacent-degree orbit or a corner family inside
            the window, a degenerate orbit, or non-constant parity in a family
    """
    bars = []
    parities = {}
    for orbit in orbits:
        if orbit.is_bound:
            if orbit.period_lower_bound < window_end:
                raise HypothesisViolated("Corner family may have period inside the window",
                                         {'orbit': orbit.to_dict(), 'window_end': render_rational(window_end)})
            continue
        if orbit.cz is None or not orbit.nondegenerate:
            if orbit.period < window_end:
                raise HypothesisViolated("Orbit inside the window has no certified index",
                                         {'orbit': orbit.to_dict()})
            continue
        key = (orbit.family, orbit.index)
        parity = orbit.cz % 2
        if parities.setdefault(key, parity) != parity:
            raise HypothesisViolated("Index parity changes within an orbit family; bad orbits may occur",
                                     {'orbit': orbit.to_dict()})
        if orbit.period >= window_end:
            continue
        if orbit.cz in (degree - 1, degree + 1):
            raise HypothesisViolated(f"Orbit of adjacent degree {orbit.cz} inside the window",
                                     {'orbit': orbit.to_dict(), 'degree': degree})
        if orbit.cz == degree:
            bars.append(Bar(orbit.period, window_end))
    return CertifiedBarcode(degree, window_end, tuple(bars))


def scale_barcode(bc: CertifiedBarcode, a: Fraction) -> CertifiedBarcode:
    """Barcode of the domain shrunk by a: every endpoint divided by a."""
    if a < 1:
        raise InvalidArgument(f"Scale factor must be at least 1, got {a}")
    bars = tuple(Bar(bar.birth / a, bar.cert_end / a) for bar in bc.bars)
    return CertifiedBarcode(bc.degree, bc.window_end / a, bars)


def rank(bc: CertifiedBarcode, s: Fraction, t: Fraction) -> int:
    """Certified lower bound on the rank of the structure map from level s to level t.

    Raises:
        InvalidArgument: unless 0 < s <= t <= window_end
        QueryAtBirth: s or t is exactly a bar birth
    """
    if not 0 < s <= t <= bc.window_end:
        raise InvalidArgument("rank needs 0 < s <= t <= window_end",
                              {'s': render_rational(s), 't': render_rational(t),
                               'window_end': render_rational(bc.window_end)})
    for bar in bc.bars:
        if bar.birth == s or bar.birth == t:
            raise QueryAtBirth("Query level coincides with a bar birth",
                               {'level': render_rational(bar.birth)})
    return sum(1 for bar in bc.bars if bar.birth < s and t <= bar.cert_end)


def dim(bc: CertifiedBarcode, s: Fraction) -> int:
    return rank(bc, s, s)


def _by_degree(barcodes: Iterable[CertifiedBarcode], role: str) -> Dict[int, CertifiedBarcode]:
    if isinstance(barcodes, CertifiedBarcode):
        barcodes = [barcodes]
    result = {}
    for bc in barcodes:
        if bc.degree in result:
            raise InvalidArgument(f"Two {role} barcodes in degree {bc.degree}")
        result[bc.degree] = bc
    return result


def _candidate(P, E, G):
    value = min(E / P, (G / P) ** 2)
    return value


def implantation_lower_bound(source, target) -> ImplantationBound:
    """Supremum of b for which the source cannot be b^(1/2)-implanted into the target.

    An obstruction at (s, b) is rank_source(s, b s) > dim_target(b^(1/2) s). For
    d + 1 source bars born at or before P with certified ends at least E, and
    the (d+1)-th target birth G, every b < min(E / P, (G / P)^2) is obstructed
    with s just above P; the supremum over these configurations is never
    attained. The winning configuration is re-verified with exact rank and
    dim queries at a rational b below the supremum.

    Args:
        source: barcodes of the domain being implanted
        target: barcodes of the receiving domain, one per source degree

    Returns:
        ImplantationBound; value 1 (attained) when nothing is obstructed
    """
    sources = _by_degree(source, 'source')
    targets = _by_degree(target, 'target')

    best = None
    for degree in sorted(sources):
        if degree not in targets:
            raise InvalidArgument(f"No target barcode in degree {degree}", {'degree': degree})
        src, tgt = sources[degree], targets[degree]
        target_births = tgt.births()
        for P in sorted(set(src.births())):
            ends = sorted((bar.cert_end for bar in src.bars if bar.birth <= P), reverse=True)
            for d, end in enumerate(ends):
                E = min(src.window_end, end)
                G = min(target_births[d] if d < len(target_births) else INFINITY, tgt.window_end)
                value = _candidate(P, E, G)
                if value > 1 and (best is None or value > best[0]):
                    best = (value, degree, P, E, G)

    if best is None:
        return ImplantationBound(Fraction(1), True)

    value, degree, P, E, G = best
    s = _verify_obstruction(sources[degree], targets[degree], value, P, E, G)
    logger.debug(f"Implantation bound {value} in degree {degree} (verified at s={s})")
    return ImplantationBound(value, False, degree, s)


def _rational_sqrt_below(value: Fraction) -> Fraction:
    """Rational a with 1 < a and a^2 < value, for value > 1."""
    bits = config.ROOT_BISECTION_BITS
    while True:
        a, _ = root_bounds(value, 2, bits)
        if a * a == value:
            a = a * (1 - Fraction(1, 2 ** bits))
        if a > 1:
            return a
        bits *= 2


def _verify_obstruction(src, tgt, value, P, E, G) -> Fraction:
    if value == INFINITY:
        a = Fraction(2)
    else:
        a = _rational_sqrt_below((1 + value) / 2)
    b = a * a
    upper = min(E / b, G / a)
    s = 2 * P if upper == INFINITY else (P + upper) / 2
    for _ in range(2 * (len(src.bars) + len(tgt.bars)) + 2):
        try:
            obstructed = rank(src, s, b * s) > dim(tgt, a * s)
        except QueryAtBirth:
            s = (P + s) / 2
            continue
        if not obstructed:
            break
        return s
    raise InternalError("Implantation obstruction failed its exact re-verification",
                        {'value': render_rational(value), 'degree': src.degree})


# Family barcodes

def sinkhole_barcode(spec: SinkholeSpec) -> CertifiedBarcode:
    """Degree 2 - 3n barcode on the unit window: one bar per depth."""
    window = config.SINKHOLE_WINDOW
    degree = 2 - 3 * spec.n
    return barcode_from_orbits(sinkhole_centers(spec, window), degree, window)


def ellipsoid_empty_barcode(dimension: int, degree: int) -> CertifiedBarcode:
    """Empty barcode valid for every filtration level: all orbits of a
    complex-dimension m ellipsoid have index at least m + 1."""
    if degree + 1 >= dimension + 1:
        raise HypothesisViolated(f"Degree {degree} is not certified empty for ellipsoids of dimension {dimension}",
                                 {'degree': degree, 'dimension': dimension})
    return CertifiedBarcode(degree, INFINITY, ())


def truncated_window(spec: TruncatedEllipsoidSpec, degree: int, cap: Optional[Fraction] = None) -> Fraction:
    """Largest window on which the centre axis orbits alone certify the barcode.

    Bounded by P*, by the boundary lifts (min a_j), by an optional cap, and by
    the first centre axis orbit of adjacent degree.
    """
    window = min(trunc_nontrivial_period_infimum(spec), min(spec.lower_capacities))
    if cap is not None:
        window = min(window, cap)
    for orbit in center_axis_orbits(spec, window):
        if orbit.cz in (degree - 1, degree + 1):
            return orbit.period
    return window


def truncated_barcode(spec: TruncatedEllipsoidSpec, degree: Optional[int] = None,
                      window_end: Optional[Fraction] = None) -> CertifiedBarcode:
    """Barcode of a truncated ellipsoid from its centre axis orbits.

    The degree defaults to k_beta and the window to truncated_window.

    Raises:
        HypothesisViolated: the requested window reaches corner families or boundary lifts
    """
    if degree is None:
        degree = k_beta(spec)
    limit = min(trunc_nontrivial_period_infimum(spec), min(spec.lower_capacities))
    if window_end is None:
        window_end = truncated_window(spec, degree)
    elif window_end > limit:
        raise HypothesisViolated("Window reaches corner families or boundary lifts",
                                 {'window_end': render_rational(window_end), 'limit': render_rational(limit)})
    return barcode_from_orbits(center_axis_orbits(spec, window_end), degree, window_end)
