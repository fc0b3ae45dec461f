"""
Closed Reeb orbits with exact periods and Conley-Zehnder indices.

All families are handled through the radial tube picture: a domain over a
base ellipsoid whose fibre disc has capacity h(u), with h concave and piecewise
linear. Orbits then come in three kinds:

* boundary lifts of base orbits, with CZ raised by 1 + 2 floor(T / tau(1));
* the centre axis over the origin of the base, with CZ from the first slope;
* corner families at each breakpoint, for which only a period lower bound
  survives the limit of vanishing smoothing.

Ellipsoids are tubes over smaller ellipsoids, which gives an independent
recursive route to their closed-form spectrum.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from ..error_handlers import (BetaNotCertified, DegenerateInput, DegenerateOrbit, HypothesisViolated,
                              InternalError, InvalidParameter, OutsideWindow)
from ..services.cache import cached
from .diophantine import DirichletWitness, certify_beta
from .domains import (HALF, EllipsoidSpec, RadialProfile, SinkholeSpec, TruncatedEllipsoidSpec,
                      trunc_profile)
from .numeric import INFINITY, Ordering, ceil_int, cmp_power, floor_strict, render_rational, root_bounds

logger = logging.getLogger(__name__)


class OrbitFamily(Enum):
    AXIS = 'axis'
    BOUNDARY_LIFT = 'boundary_lift'
    CENTER_AXIS = 'center_axis'
    SINKHOLE_CENTER = 'sinkhole_center'
    CORNER_FAMILY = 'corner_family'

    @property
    def order(self) -> int:
        return _FAMILY_ORDER.index(self)


_FAMILY_ORDER = [OrbitFamily.AXIS, OrbitFamily.BOUNDARY_LIFT, OrbitFamily.CENTER_AXIS,
                 OrbitFamily.SINKHOLE_CENTER, OrbitFamily.CORNER_FAMILY]


@dataclass(frozen=True)
class ReebOrbit:
    """One closed orbit, or a corner family carrying only a period bound.

    index is (k,) for axis orbits and boundary lifts, (m,) for sinkhole
    centres, (j, k) for corner families and () for the centre axis; all
    1-based except the corner winding k.
    """
    family: OrbitFamily
    index: Tuple[int, ...]
    multiplicity: int
    period: Optional[Fraction] = None
    period_lower_bound: Optional[Fraction] = None
    cz: Optional[int] = None
    nondegenerate: bool = True

    @property
    def is_bound(self) -> bool:
        return self.period is None

    @property
    def filtration(self) -> Fraction:
        return self.period_lower_bound if self.is_bound else self.period

    def sort_key(self):
        return (self.filtration, self.family.order, self.index, self.multiplicity)

    def label(self) -> str:
        return ';'.join(str(i) for i in self.index)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'family': self.family.value,
            'index': list(self.index),
            'N': self.multiplicity,
            'period': None if self.period is None else render_rational(self.period),
            'period_lower_bound': (None if self.period_lower_bound is None
                                   else render_rational(self.period_lower_bound)),
            'cz': self.cz,
            'nondegenerate': self.nondegenerate,
        }

    def csv_row(self) -> Dict[str, Any]:
        return {
            'family': self.family.value,
            'm_or_k': self.label(),
            'N': self.multiplicity,
            'period_or_bound': render_rational(self.filtration),
            'bound_flag': 'true' if self.is_bound else 'false',
            'cz': '' if self.cz is None else self.cz,
            'nondegenerate': 'true' if self.nondegenerate else 'false',
        }


ORBIT_CSV_FIELDS = ['family', 'm_or_k', 'N', 'period_or_bound', 'bound_flag', 'cz', 'nondegenerate']


def sort_orbits(orbits) -> List[ReebOrbit]:
    return sorted(orbits, key=ReebOrbit.sort_key)


def _capacities(base: Union[EllipsoidSpec, Sequence[Fraction]]) -> Tuple[Fraction, ...]:
    if isinstance(base, EllipsoidSpec):
        return base.capacities
    return tuple(base)


# Conley-Zehnder index formulas

def cz_center_axis(slope_at_zero: Fraction, base: Union[EllipsoidSpec, Sequence[Fraction]], N: int) -> int:
    """CZ of the N-fold orbit over the origin of the base.

    n + 2N + 2 sum_j floor(-N slope / a_j), n = number of base capacities.

    Raises:
        DegenerateOrbit: some N slope / a_j is an integer
    """
    capacities = _capacities(base)
    total = len(capacities) + 2 * N
    for j, a_j in enumerate(capacities, start=1):
        floor, is_integer = floor_strict(-N * slope_at_zero / a_j)
        if is_integer:
            raise DegenerateOrbit(f"Centre axis orbit N={N} is degenerate in factor j={j}",
                                  {'N': N, 'j': j, 'slope': render_rational(slope_at_zero)})
        total += 2 * floor
    return total


def cz_boundary_lift(cz_base: int, period_base: Fraction, tau_at_boundary: Fraction) -> int:
    """CZ(c) + 1 + 2 floor(T / tau) for the lift of a base orbit c of period T."""
    floor, is_integer = floor_strict(period_base / tau_at_boundary)
    if is_integer:
        raise DegenerateOrbit("Boundary lift is degenerate: period / tau is an integer",
                              {'period': render_rational(period_base), 'tau': render_rational(tau_at_boundary)})
    return cz_base + 1 + 2 * floor


# Ellipsoids

@cached('reeb')
def _ellipsoid_orbits(spec: EllipsoidSpec, period_cap: Fraction) -> Tuple[ReebOrbit, ...]:
    caps = spec.capacities
    m = len(caps)
    orbits = []
    for k, a_k in enumerate(caps, start=1):
        N = 1
        while N * a_k <= period_cap:
            total = m - 1
            for j, a_j in enumerate(caps, start=1):
                floor, is_integer = floor_strict(N * a_k / a_j)
                if is_integer and j != k:
                    raise DegenerateInput(f"Degenerate ellipsoid orbit at k={k}, N={N}, j={j}",
                                          {'k': k, 'N': N, 'j': j})
                total += 2 * floor
            orbits.append(ReebOrbit(OrbitFamily.AXIS, (k,), N, period=N * a_k, cz=total))
            N += 1
    return tuple(sort_orbits(orbits))


def ellipsoid_spectrum(spec: EllipsoidSpec, period_cap: Fraction) -> List[ReebOrbit]:
    """All orbits gamma(k, N) of the ellipsoid with N a_k <= period_cap.

    Raises:
        InvalidParameter: period_cap <= 0
        DegenerateInput: some N a_k / a_j (j != k) is an integer
    """
    if period_cap <= 0:
        raise InvalidParameter("period_cap must be positive", {'field': 'cap'})
    return list(_ellipsoid_orbits(spec, Fraction(period_cap)))


def ellipsoid_spectrum_by_tubes(spec: EllipsoidSpec, period_cap: Fraction) -> List[ReebOrbit]:
    """Rebuild the ellipsoid spectrum by treating E(a_1..a_m) as a tube over E(a_1..a_{m-1})
    with profile a_m (1 - u); the zero-dimensional base contributes CZ = 2N."""
    if period_cap <= 0:
        raise InvalidParameter("period_cap must be positive", {'field': 'cap'})

    def tower(caps):
        if not caps:
            return []
        lower, a_m = caps[:-1], caps[-1]
        orbits = [
            ReebOrbit(OrbitFamily.AXIS, orbit.index, orbit.multiplicity, period=orbit.period,
                      cz=cz_boundary_lift(orbit.cz, orbit.period, a_m))
            for orbit in tower(lower)
        ]
        N = 1
        while N * a_m <= period_cap:
            orbits.append(ReebOrbit(OrbitFamily.AXIS, (len(caps),), N, period=N * a_m,
                                    cz=cz_center_axis(-a_m, lower, N)))
            N += 1
        return orbits

    return sort_orbits(tower(spec.capacities))


# Radial tubes

def _check_segment_resonance(base_caps, profile: RadialProfile, period_cap: Fraction):
    """Segments past the first carry circle families whenever N s / a_j is an integer."""
    for index, (slope, tau) in enumerate(profile.segments[1:], start=2):
        N = 1
        while N * tau <= period_cap:
            for j, a_j in enumerate(base_caps, start=1):
                _, is_integer = floor_strict(N * slope / a_j)
                if is_integer:
                    raise DegenerateOrbit(f"Resonant orbit family on segment {index} at N={N}, j={j}",
                                          {'segment': index, 'N': N, 'j': j,
                                           'period': render_rational(N * tau)})
            N += 1


def corner_families(base: EllipsoidSpec, profile: RadialProfile, N_cap: int) -> List[ReebOrbit]:
    """One entry per admissible (j, k, N) at every breakpoint, carrying
    N h(u) - u k a_j as its period lower bound."""
    orbits = []
    for index, u in enumerate(profile.breakpoints):
        s_hi, c_hi = profile.segments[index]
        s_lo = profile.segments[index + 1][0]
        h_u = s_hi * u + c_hi
        for j, a_j in enumerate(base.capacities, start=1):
            for N in range(1, N_cap + 1):
                k_min = floor_strict(N * s_lo / a_j)[0] + 1
                k_max = ceil_int(N * s_hi / a_j) - 1
                for k in range(k_min, k_max + 1):
                    orbits.append(ReebOrbit(OrbitFamily.CORNER_FAMILY, (j, k), N,
                                            period_lower_bound=N * h_u - u * k * a_j,
                                            cz=None, nondegenerate=False))
    return orbits


def tube_orbits(base: EllipsoidSpec, profile: RadialProfile, period_cap: Fraction,
                N_cap: int) -> List[ReebOrbit]:
    """Orbit classification of the radial tube over base with the given profile.

    Args:
        base: base ellipsoid
        profile: concave piecewise-linear fibre profile
        period_cap: exact-period orbits above this are omitted
        N_cap: largest multiplicity enumerated for corner families

    Returns:
        Orbits sorted by (period or bound, family, index, N)
    """
    if period_cap <= 0:
        raise InvalidParameter("period_cap must be positive", {'field': 'cap'})
    if N_cap < 1:
        raise InvalidParameter("N_cap must be positive", {'field': 'ncap'})

    tau_boundary = profile.tau_at_boundary
    orbits = []
    for orbit in ellipsoid_spectrum(base, period_cap):
        try:
            cz = cz_boundary_lift(orbit.cz, orbit.period, tau_boundary)
        except DegenerateOrbit as e:
            e.details.update({'family': OrbitFamily.BOUNDARY_LIFT.value, 'k': orbit.index[0],
                              'N': orbit.multiplicity})
            raise
        orbits.append(ReebOrbit(OrbitFamily.BOUNDARY_LIFT, orbit.index, orbit.multiplicity,
                                period=orbit.period, cz=cz))

    tau_center = profile.segments[0][1]
    N = 1
    while N * tau_center <= period_cap:
        orbits.append(ReebOrbit(OrbitFamily.CENTER_AXIS, (), N, period=N * tau_center,
                                cz=cz_center_axis(profile.slope_at_zero, base, N)))
        N += 1

    _check_segment_resonance(base.capacities, profile, period_cap)
    orbits.extend(corner_families(base, profile, N_cap))
    logger.debug(f"Tube over {len(base.capacities)} factors: {len(orbits)} orbit entries")
    return sort_orbits(orbits)


@dataclass(frozen=True)
class CornerInfimum:
    """Minimum corner-family period bound and where it is attained."""
    value: Fraction
    j: int
    k: int
    N: int
    n_cut: int


def corner_period_infimum(base: EllipsoidSpec, profile: RadialProfile) -> CornerInfimum:
    """Exact minimum of N h(u_i) - u_i k a_j over every admissible (i, j, k, N).

    Every bound at breakpoint i exceeds N tau_i, so the scan over N stops once
    N tau_i reaches the best value; for fixed (N, j) the largest admissible k
    is the only candidate since the bound decreases in k.
    """
    best = None
    for index, u in enumerate(profile.breakpoints):
        s_hi, c_hi = profile.segments[index]
        s_lo = profile.segments[index + 1][0]
        h_u = s_hi * u + c_hi
        N = 1
        while best is None or N * c_hi < best.value:
            for j, a_j in enumerate(base.capacities, start=1):
                k = ceil_int(N * s_hi / a_j) - 1
                if k * a_j <= N * s_lo:
                    continue
                bound = N * h_u - u * k * a_j
                if best is None or bound < best.value:
                    best = CornerInfimum(bound, j, k, N, 0)
            N += 1
        best = CornerInfimum(best.value, best.j, best.k, best.N, max(best.n_cut, N))
    if best is None:
        return CornerInfimum(INFINITY, 0, 0, 0, 0)
    return best


@cached('reeb')
def trunc_corner_infimum(spec: TruncatedEllipsoidSpec) -> CornerInfimum:
    result = corner_period_infimum(EllipsoidSpec(spec.lower_capacities), trunc_profile(spec))
    logger.debug(f"P* = {result.value} at N={result.N}, j={result.j}, k={result.k}; scanned to {result.n_cut}")
    return result


def trunc_orbits(spec: TruncatedEllipsoidSpec, period_cap: Fraction, N_cap: int) -> List[ReebOrbit]:
    """Boundary lifts, centre axis orbits and corner families of a truncated ellipsoid."""
    return tube_orbits(EllipsoidSpec(spec.lower_capacities), trunc_profile(spec), period_cap, N_cap)


def trunc_nontrivial_period_infimum(spec: TruncatedEllipsoidSpec) -> Fraction:
    """P*: the exact infimum of the corner-family period bounds."""
    return trunc_corner_infimum(spec).value


def center_axis_orbits(spec: TruncatedEllipsoidSpec, below) -> List[ReebOrbit]:
    """Centre axis orbits of period strictly below the given value."""
    period = spec.a_top * spec.epsilon
    slope = spec.beta * spec.a_top
    orbits = []
    N = 1
    while N * period < below:
        orbits.append(ReebOrbit(OrbitFamily.CENTER_AXIS, (), N, period=N * period,
                                cz=cz_center_axis(slope, spec.lower_capacities, N)))
        N += 1
    return orbits


def k_beta(spec: TruncatedEllipsoidSpec) -> int:
    """The grading of the first centre axis orbit, after checking it is at most 1
    and that the centre axis indices strictly decrease in N.

    Raises:
        HypothesisViolated: either check fails
    """
    slope = spec.beta * spec.a_top
    grading = cz_center_axis(slope, spec.lower_capacities, 1)
    if grading > 1:
        raise HypothesisViolated(f"k_beta = {grading} exceeds 1", {'check': 'k_beta<=1', 'k_beta': grading})
    if not any(slope / a_j > 2 for a_j in spec.lower_capacities):
        raise HypothesisViolated("No factor with beta a_{n+1} / a_j > 2; indices need not decrease",
                                 {'check': 'strict_decrease'})
    return grading


# Closed-form period bound

@dataclass(frozen=True)
class ClosedFormBound:
    """Every corner-family period exceeds C * beta**exponent * eps."""
    C: Fraction
    exponent: Fraction
    c: Fraction
    cases: Tuple[Tuple[Fraction, Fraction], ...]

    def dominated_by(self, spec: TruncatedEllipsoidSpec, value: Fraction) -> bool:
        """True when value >= C beta^exponent eps, decided exactly."""
        x = value / (self.C * spec.epsilon)
        if self.exponent.denominator == 1:
            return x >= spec.beta ** int(self.exponent)
        return cmp_power(x, spec.beta, self.exponent.denominator) is not Ordering.LESS

    def rational_lower(self, spec: TruncatedEllipsoidSpec) -> Fraction:
        """A rational lower bound on C beta^exponent (the value M_beta)."""
        if self.exponent.denominator == 1:
            return self.C * spec.beta ** int(self.exponent)
        root_lo, _ = root_bounds(spec.beta, self.exponent.denominator)
        return self.C * root_lo

    def to_dict(self) -> Dict[str, Any]:
        return {
            'C': render_rational(self.C),
            'exponent': render_rational(self.exponent),
            'c': render_rational(self.c),
            'cases': [[render_rational(k), render_rational(e)] for k, e in self.cases],
        }


def corner_period_closed_form(spec: TruncatedEllipsoidSpec,
                              witness: Optional[DirichletWitness] = None) -> ClosedFormBound:
    """Constants (C, exponent) of the closed-form corner period bound.

    Raises:
        BetaNotCertified: no witness, or beta outside its window
        HypothesisViolated: beta <= 2 or eps beta^2 >= 1
    """
    if witness is None:
        raise BetaNotCertified("A Dirichlet witness is required for the closed-form bound")
    try:
        certify_beta(spec.base, spec.beta, witness)
    except OutsideWindow as e:
        raise BetaNotCertified(f"beta is not certified: {e.message}", e.details)
    if spec.beta <= 2:
        raise HypothesisViolated("The closed-form bound needs beta > 2", {'check': 'beta>2'})
    if not spec.theorem_strength:
        raise HypothesisViolated("The closed-form bound needs eps < beta^-2", {'check': 'theorem_strength'})

    n = spec.n
    lower, a_top = spec.lower_capacities, spec.a_top
    if n == 1:
        c = Fraction(1)
        exponent = Fraction(1)
        large_n_exponent = Fraction(2)
    else:
        A = max(a / a_top for a in lower)
        _, root_hi = root_bounds(lower[-1] / a_top, n - 1)
        c = 3 * A * root_hi
        exponent = Fraction(1, n - 1)
        large_n_exponent = exponent
    C = min(min(a_j / 4, a_j / (6 * c)) for a_j in lower)
    cases = ((min(lower) / 4, Fraction(1)), (min(lower) / (6 * c), large_n_exponent))
    return ClosedFormBound(C, exponent, c, cases)


# Sinkholes

def sinkhole_centers(spec: SinkholeSpec, below: Fraction, inclusive: bool = False) -> List[ReebOrbit]:
    """SinkholeCenter(m, N) orbits with N eps_m below (or at, if inclusive) the bound."""
    unit_base = tuple(Fraction(1) for _ in range(spec.n))
    orbits = []
    for m, eps in enumerate(spec.depths, start=1):
        N = 1
        while N * eps < below or (inclusive and N * eps == below):
            try:
                cz = cz_center_axis(2 - eps, unit_base, N)
            except DegenerateOrbit as e:
                e.details.update({'family': OrbitFamily.SINKHOLE_CENTER.value, 'm': m})
                raise
            if (cz - spec.n) % 2:
                raise InternalError("Sinkhole orbit index has the wrong parity",
                                    {'m': m, 'N': N, 'cz': cz, 'n': spec.n})
            orbits.append(ReebOrbit(OrbitFamily.SINKHOLE_CENTER, (m,), N, period=N * eps, cz=cz))
            N += 1
    return sort_orbits(orbits)


def sinkhole_spectrum(spec: SinkholeSpec, threshold_b: Fraction) -> List[ReebOrbit]:
    """All orbits of period at most b, for 1/2 < b < 1 and eps_D < 1/2.

    Raises:
        InvalidParameter: b outside (1/2, 1) or eps_D = 1/2
        DegenerateOrbit: some N (2 - eps_m) is an integer
    """
    if not HALF < threshold_b < 1:
        raise InvalidParameter(f"Threshold b must lie in (1/2, 1), got {threshold_b}", {'field': 'threshold'})
    if not spec.strict_regime:
        raise InvalidParameter("Orbit classification needs eps_D < 1/2", {'field': f'sinkhole.eps[{spec.D - 1}]'})
    return sinkhole_centers(spec, threshold_b, inclusive=True)
