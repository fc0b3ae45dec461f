"""
Reproduction reports built from the certificate engine.

Each report exposes ``to_dict()`` for JSON artifacts and ``rows()`` with a
matching ``*_FIELDS`` list for CSV tables. Sweeps fan out over the shared
job queue and assemble their rows in input order.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .. import config
from ..error_handlers import InvalidParameter, QueryAtBirth
from ..services.job_queue import job_queue
from .bounds import (BoundCertificate, Quantity, Verdict, compose, consistency_check,
                     double_knot_spec, doubleknot_checks, easyineq, lower_double_knot, lower_sinkhole_pair,
                     lower_trunc_vs_all_ellipsoids, reverse, upper_sinkhole_pair, upper_trunc_vs_ellipsoid)
from .diophantine import dirichlet_tuple
from .domains import EllipsoidSpec, SinkholeSpec, TruncatedEllipsoidSpec, default_sinkhole_base, domain_id
from .numeric import exp_bounds, parse_extended, parse_rational, render_rational
from .persistence import dim, sinkhole_barcode

logger = logging.getLogger(__name__)

CERTIFICATE_CSV_FIELDS = ['quantity', 'direction', 'from', 'to', 'value', 'attained', 'rule']


def certificate_row(cert: BoundCertificate) -> Dict[str, Any]:
    return {
        'quantity': cert.quantity.value,
        'direction': cert.direction.value,
        'from': cert.from_domain,
        'to': cert.to_domain,
        'value': render_rational(cert.value),
        'attained': 'true' if cert.attained else 'false',
        'rule': cert.provenance.rule,
    }


# Double-knot report

@dataclass
class V34Report:
    n: int
    eps: Fraction
    degrees: Dict[str, int]
    checks: List[Tuple[str, bool]]
    lowers: List[BoundCertificate]
    lower_engine: Fraction
    uppers: List[BoundCertificate]
    upper_dc: BoundCertificate
    verdicts: List[Verdict]

    @property
    def lower(self) -> Fraction:
        return min(cert.value for cert in self.lowers)

    @property
    def strict(self) -> bool:
        return any(v.kind == 'strict' for v in self.verdicts) and \
            not any(v.kind == 'violation' for v in self.verdicts)

    @property
    def certificates(self) -> List[BoundCertificate]:
        return self.lowers + self.uppers + [self.upper_dc]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'eps': render_rational(self.eps),
            'degrees': self.degrees,
            'checks': [{'check': name, 'passed': passed} for name, passed in self.checks],
            'lower': render_rational(self.lower),
            'lower_engine': render_rational(self.lower_engine),
            'upper_dc': render_rational(self.upper_dc.value),
            'strict': self.strict,
            'verdicts': [v.to_dict() for v in self.verdicts],
            'certificates': [cert.to_dict() for cert in self.certificates],
        }

    def rows(self) -> List[Dict[str, Any]]:
        return [certificate_row(cert) for cert in self.certificates]


def v34_report(n: int, eps: Fraction) -> V34Report:
    """Lower delta_f bounds in both orders between the beta = 3 and beta = 4
    double-knot domains, and the composed d_c upper bound through their common
    base ellipsoid.

    Raises:
        DoubleKnotHypothesisFailed: listing every failed exact check
    """
    checks = doubleknot_checks(n, eps)
    low, high = config.V34_BETAS
    v_low, v_high = double_knot_spec(n, eps, low), double_knot_spec(n, eps, high)
    base_id = domain_id(v_low.base)

    lowers = [lower_double_knot(n, eps, high, low), lower_double_knot(n, eps, low, high)]
    lower_engine = min(parse_extended(cert.notes['pipeline']['value']) for cert in lowers)

    c1 = upper_trunc_vs_ellipsoid(low, domain_id(v_low), base_id)
    c2 = upper_trunc_vs_ellipsoid(high, domain_id(v_high), base_id)
    dc1 = _implied(c1, Quantity.D_C, c1.pair)
    dc2 = reverse(_implied(c2, Quantity.D_C, c2.pair))
    upper_dc = compose(dc1, dc2)

    verdicts = consistency_check(lowers + [upper_dc])
    logger.info(f"v34 at n={n}, eps={eps}: lower {lowers[0].value}, d_c upper {upper_dc.value}")
    return V34Report(
        n=n,
        eps=eps,
        degrees={render_rational(low): 2 - 5 * n, render_rational(high): 2 - 7 * n},
        checks=checks,
        lowers=lowers,
        lower_engine=lower_engine,
        uppers=[c1, c2],
        upper_dc=upper_dc,
        verdicts=verdicts,
    )


def _implied(cert: BoundCertificate, quantity: Quantity, pair: Tuple[str, str]) -> BoundCertificate:
    for derived in easyineq(cert):
        if derived.quantity is quantity and derived.pair == pair:
            return derived
    raise InvalidParameter(f"{cert.quantity.value} certificate implies no {quantity.value} bound on this pair")


# Quasi-isometric embedding check

QUASIEMBED_CSV_FIELDS = ['m', 'x', 'y', 'eps', 'zeta', 'eps_err', 'zeta_err']


@dataclass
class QuasiembedReport:
    x: Tuple[Fraction, ...]
    y: Tuple[Fraction, ...]
    eps: Tuple[Fraction, ...]
    zeta: Tuple[Fraction, ...]
    errors: Tuple[Tuple[Fraction, Fraction], ...]
    distance: Fraction
    slack: Fraction
    lower: BoundCertificate
    upper: BoundCertificate
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x': [render_rational(v) for v in self.x],
            'y': [render_rational(v) for v in self.y],
            'eps': [render_rational(v) for v in self.eps],
            'zeta': [render_rational(v) for v in self.zeta],
            'distance': render_rational(self.distance),
            'slack': render_rational(self.slack),
            'lower': render_rational(self.lower.value),
            'upper': render_rational(self.upper.value),
            'checks': self.checks,
            'holds': self.holds,
            'certificates': [self.lower.to_dict(), self.upper.to_dict()],
        }

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {'m': m, 'x': render_rational(x), 'y': render_rational(y), 'eps': render_rational(e),
             'zeta': render_rational(z), 'eps_err': render_rational(ex), 'zeta_err': render_rational(ez)}
            for m, (x, y, e, z, (ex, ez)) in enumerate(zip(self.x, self.y, self.eps, self.zeta, self.errors),
                                                      start=1)
        ]


def default_surrogate(x: Fraction, tolerance: Optional[Fraction] = None) -> Tuple[Fraction, Fraction]:
    """Rational value and certified absolute error for 1/2 e^-x."""
    lo, hi = exp_bounds(x, tolerance or config.SURROGATE_ACCURACY)
    return Fraction(1, 2) / hi, (1 / lo - 1 / hi) / 2


def parse_surrogate_table(table: Dict[str, Any]) -> Dict[Fraction, Tuple[Fraction, Fraction]]:
    """Decode {"x": ["value", "err"]} and check each entry against exp_bounds.

    Raises:
        InvalidParameter: malformed entry, or an entry whose error bar does not
            certifiably contain 1/2 e^-x
    """
    if not isinstance(table, dict):
        raise InvalidParameter("Surrogate table must be an object", {'field': 'surrogate'})
    decoded = {}
    for key, entry in table.items():
        path = f'surrogate.{key}'
        if not isinstance(entry, list) or len(entry) != 2:
            raise InvalidParameter("Surrogate entries are [value, error] pairs", {'field': path})
        x, value, err = parse_rational(key), parse_rational(entry[0]), parse_rational(entry[1])
        if err < 0 or value - err <= 0:
            raise InvalidParameter("Surrogate error must be nonnegative and below the value", {'field': path})
        lo, hi = exp_bounds(x, config.SURROGATE_ACCURACY)
        if not (value - err <= Fraction(1, 2) / hi and Fraction(1, 2) / lo <= value + err):
            raise InvalidParameter(f"Surrogate for x={key} is not certified within its error",
                                   {'field': path, 'value': entry[0], 'error': entry[1]})
        decoded[x] = (value, err)
    return decoded


def _validate_simplex_point(point: Sequence[Fraction], name: str) -> Tuple[Fraction, ...]:
    point = tuple(point)
    if not point:
        raise InvalidParameter("Point needs at least one coordinate", {'field': name})
    for index, value in enumerate(point):
        if value < 0:
            raise InvalidParameter("Coordinates must be nonnegative", {'field': f'{name}[{index}]'})
        if index and value > point[index - 1]:
            raise InvalidParameter("Coordinates must be descending", {'field': f'{name}[{index}]'})
    return point


def _depths(point, table):
    """Surrogate depths with their errors, sorted ascending as a sinkhole expects."""
    pairs = [table[x] if x in table else default_surrogate(x) for x in point]
    pairs.sort(key=lambda pair: pair[0])
    return [value for value, _ in pairs], [err for _, err in pairs]


def quasiembed_verify(x: Sequence[Fraction], y: Sequence[Fraction], surrogate: Optional[Dict[str, Any]] = None,
                      n: int = 1) -> QuasiembedReport:
    """Check ||x - y|| <= log d_f <= 2 ||x - y|| (sup norm) on two points of
    the descending simplex, through depths 1/2 e^-x_m.

    Every depth is a rational surrogate with a certified absolute error; the
    log-sandwich is verified with the induced log slack 4 max sigma, sigma =
    err / (value - err), widened by 2 tol to absorb the exp_bounds bracket.
    The upper half is an equality for exact depths, so the slack is never zero.
    """
    x = _validate_simplex_point(x, 'x')
    y = _validate_simplex_point(y, 'y')
    if len(x) != len(y):
        raise InvalidParameter("Points must have the same dimension", {'field': 'y', 'x': len(x), 'y': len(y)})
    table = parse_surrogate_table(surrogate) if surrogate else {}

    eps, eps_err = _depths(x, table)
    zeta, zeta_err = _depths(y, table)
    forward = lower_sinkhole_pair(eps, zeta, n)
    backward = lower_sinkhole_pair(zeta, eps, n)
    best = forward if forward.value >= backward.value else backward
    lower = [c for c in easyineq(best) if c.quantity is Quantity.D_F and c.pair == best.pair][0]
    upper = upper_sinkhole_pair(eps, zeta)

    distance = max(abs(a - b) for a, b in zip(x, y))
    sigma = max(err / (value - err) for value, err in zip(eps + zeta, eps_err + zeta_err))
    tolerance = config.SURROGATE_ACCURACY
    slack = 4 * sigma + 2 * tolerance

    checks = {'lower<=upper': lower.value <= upper.value}
    if distance - slack <= 0:
        checks['lower_sandwich'] = lower.value >= 1
    else:
        checks['lower_sandwich'] = lower.value >= exp_bounds(distance - slack, tolerance)[1]
    checks['upper_sandwich'] = upper.value <= exp_bounds(2 * distance + slack, tolerance)[0]
    if not all(checks.values()):
        logger.warning(f"quasiembed sandwich failed at x={x}, y={y}: {checks}")

    return QuasiembedReport(x, y, tuple(eps), tuple(zeta), tuple(zip(eps_err, zeta_err)), distance, slack,
                            lower, upper, checks)


# Ellipsoid-distance divergence

ELLDIST_CSV_FIELDS = ['r', 'beta', 'eps', 'lower', 'upper']


@dataclass
class ElldistReport:
    capacities: Tuple[Fraction, ...]
    points: List[Dict[str, Any]]

    @property
    def lowers(self) -> List[Fraction]:
        return [point['lower'].value for point in self.points]

    @property
    def uppers(self) -> List[Fraction]:
        return [point['upper'].value for point in self.points]

    @property
    def increasing(self) -> bool:
        return all(a < b for a, b in zip(self.lowers, self.lowers[1:]))

    @property
    def upper_decreasing(self) -> bool:
        return all(a > b for a, b in zip(self.uppers, self.uppers[1:]))

    def rows(self) -> List[Dict[str, Any]]:
        return [{
            'r': point['r'],
            'beta': render_rational(point['beta']),
            'eps': render_rational(point['eps']),
            'lower': render_rational(point['lower'].value),
            'upper': render_rational(point['upper'].value),
        } for point in self.points]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'a': [render_rational(a) for a in self.capacities],
            'rows': self.rows(),
            'lower_increasing': self.increasing,
            'upper_decreasing': self.upper_decreasing,
            'certificates': [cert.to_dict() for point in self.points for cert in (point['lower'], point['upper'])],
        }


def _elldist_point(base: EllipsoidSpec, eps_factor: Fraction, r: int) -> Dict[str, Any]:
    witness = dirichlet_tuple(base, r)
    beta = witness.midpoint()
    eps = eps_factor / beta ** 2
    spec = TruncatedEllipsoidSpec(base, eps, beta)
    lower = lower_trunc_vs_all_ellipsoids(spec, witness)
    upper = upper_trunc_vs_ellipsoid(beta, domain_id(spec), domain_id(base))
    return {'r': r, 'beta': beta, 'eps': eps, 'witness': witness, 'lower': lower, 'upper': upper}


def elldist_report(r_values: Sequence[int] = config.ELLDIST_R_VALUES,
                   capacities: Sequence[Fraction] = (Fraction(1), Fraction(1)),
                   eps_factor: Fraction = config.ELLDIST_EPS_FACTOR,
                   num_workers: int = 1) -> ElldistReport:
    """Lower delta_f bounds against all ellipsoids along a sequence of certified
    beta windows, next to the matching upper bounds towards the base ellipsoid.

    Args:
        r_values: smallest p_n of each window, one report row per value
        capacities: base ellipsoid (a_1..a_{n+1})
        eps_factor: eps = eps_factor / beta^2, below 1 for theorem strength
        num_workers: sweep width; rows do not depend on it
    """
    base = EllipsoidSpec(tuple(capacities))
    if not 0 < eps_factor < 1:
        raise InvalidParameter("eps_factor must lie in (0, 1)", {'field': 'eps_factor'})
    points = job_queue.map(partial(_elldist_point, base, eps_factor), list(r_values), num_workers, name='elldist')
    report = ElldistReport(base.capacities, points)
    if not report.increasing:
        logger.warning(f"elldist lower bounds are not increasing: {report.lowers}")
    return report


# Sinkhole grid

SINKHOLE_GRID_FIELDS = ['eps', 'zeta', 'lower', 'upper', 'ordered', 'dims_match']

DEFAULT_SINKHOLE_GRID = (
    (Fraction(1, 10), Fraction(1, 5)),
    (Fraction(1, 7), Fraction(1, 3)),
    (Fraction(1, 5), Fraction(1, 2)),
    (Fraction(1, 4), Fraction(1, 4)),
    (Fraction(1, 3), Fraction(1, 2)),
)


def _sample_levels(count: int = 10) -> List[Fraction]:
    return [Fraction(k, count + 1) for k in range(1, count + 1)]


def _dims_match(depths: Sequence[Fraction], n: int) -> bool:
    """dim in degree 2 - 3n at level s is the number of depths below s."""
    barcode = sinkhole_barcode(SinkholeSpec(n, tuple(depths), default_sinkhole_base(n, len(depths))))
    for s in _sample_levels():
        try:
            if dim(barcode, s) != sum(1 for e in depths if e < s):
                return False
        except QueryAtBirth:
            continue
    return True


def _sinkhole_pair_row(n: int, pair) -> Dict[str, Any]:
    eps, zeta = pair
    lower = lower_sinkhole_pair(eps, zeta, n)
    upper = upper_sinkhole_pair(eps, zeta)
    return {
        'eps': eps,
        'zeta': zeta,
        'lower': lower,
        'upper': upper,
        'ordered': lower.value <= upper.value,
        'dims_match': _dims_match(eps, n) and _dims_match(zeta, n),
    }


@dataclass
class SinkholeGridReport:
    n: int
    points: List[Dict[str, Any]]

    @property
    def consistent(self) -> bool:
        return all(point['ordered'] and point['dims_match'] for point in self.points)

    def rows(self) -> List[Dict[str, Any]]:
        return [{
            'eps': ';'.join(render_rational(e) for e in point['eps']),
            'zeta': ';'.join(render_rational(z) for z in point['zeta']),
            'lower': render_rational(point['lower'].value),
            'upper': render_rational(point['upper'].value),
            'ordered': 'true' if point['ordered'] else 'false',
            'dims_match': 'true' if point['dims_match'] else 'false',
        } for point in self.points]

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'rows': self.rows(), 'consistent': self.consistent}


def sinkhole_grid_report(grid: Sequence[Sequence[Fraction]] = DEFAULT_SINKHOLE_GRID, n: int = 1,
                         num_workers: int = 1) -> SinkholeGridReport:
    """Lower and upper sinkhole bounds on every ordered pair of the grid."""
    grid = [tuple(depths) for depths in grid]
    pairs = [(eps, zeta) for eps in grid for zeta in grid]
    points = job_queue.map(partial(_sinkhole_pair_row, n), pairs, num_workers, name='sinkhole-grid')
    return SinkholeGridReport(n, points)
