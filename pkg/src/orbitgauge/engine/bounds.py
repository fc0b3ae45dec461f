"""
Distance-bound certificates.

A certificate states an upper or lower bound on one of the three
Banach-Mazur type distances between an ordered pair of domains:

* ``d_c``      coarse distance (symmetric)
* ``delta_f``  fine one-sided distance (ordered)
* ``d_f``      fine distance (symmetric)

with d_c <= delta_f (either order) <= d_f. Every certificate carries the
rule that produced it and the exact inputs, so ``replay`` can rebuild it.
"""
import hashlib
import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..error_handlers import (ChainMismatch, DoubleKnotHypothesisFailed, HypothesisViolated, InternalError,
                              InvalidArgument)
from .diophantine import DirichletWitness, certify_beta
from .domains import (EllipsoidSpec, SinkholeSpec, TruncatedEllipsoidSpec, default_sinkhole_base, domain_id,
                      parse_domain, validate_depths)
from .numeric import Extended, parse_extended, parse_rational, render_rational
from .persistence import (ellipsoid_empty_barcode, implantation_lower_bound, sinkhole_barcode,
                          truncated_barcode)
from .reeb import center_axis_orbits, corner_period_closed_form, k_beta, trunc_nontrivial_period_infimum
from .. import config

logger = logging.getLogger(__name__)

ALL_ELLIPSOIDS = 'ellipsoid:*'


class Quantity(Enum):
    D_C = 'd_c'
    DELTA_F = 'delta_f'
    D_F = 'd_f'

    @property
    def symmetric(self) -> bool:
        return self is not Quantity.DELTA_F

    @property
    def level(self) -> int:
        return [Quantity.D_C, Quantity.DELTA_F, Quantity.D_F].index(self)


class Direction(Enum):
    UPPER = 'upper'
    LOWER = 'lower'


@dataclass(frozen=True)
class Provenance:
    rule: str
    inputs: Dict[str, Any]
    digest: str

    def to_dict(self) -> Dict[str, Any]:
        return {'rule': self.rule, 'inputs': self.inputs, 'digest': self.digest}


@dataclass(frozen=True)
class BoundCertificate:
    quantity: Quantity
    direction: Direction
    from_domain: str
    to_domain: str
    value: Extended
    attained: bool
    provenance: Provenance
    notes: Dict[str, Any] = field(default_factory=dict, compare=False)
    # Seal read back from a file; None for certificates built in this process
    stored_seal: Optional[str] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.value < 1:
            raise InvalidArgument(f"Certificate value must be at least 1, got {self.value}")

    @property
    def pair(self) -> Tuple[str, str]:
        return (self.from_domain, self.to_domain)

    @property
    def seal(self) -> str:
        """sha256 over the claim and the provenance digest."""
        claim = {'quantity': self.quantity.value, 'direction': self.direction.value, 'from': self.from_domain,
                 'to': self.to_domain, 'value': render_rational(self.value), 'attained': self.attained,
                 'digest': self.provenance.digest}
        return hashlib.sha256(canonical_json(claim).encode('utf-8')).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        data = {
            'quantity': self.quantity.value,
            'direction': self.direction.value,
            'from': self.from_domain,
            'to': self.to_domain,
            'value': render_rational(self.value),
            'attained': self.attained,
            'provenance': self.provenance.to_dict(),
            'seal': self.seal,
        }
        if self.notes:
            data['notes'] = self.notes
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'BoundCertificate':
        try:
            provenance = Provenance(data['provenance']['rule'], data['provenance']['inputs'],
                                    data['provenance']['digest'])
            return cls(Quantity(data['quantity']), Direction(data['direction']), data['from'], data['to'],
                       parse_extended(data['value']), bool(data['attained']), provenance,
                       data.get('notes', {}), data.get('seal', ''))
        except (KeyError, TypeError, ValueError) as e:
            raise InvalidArgument(f"Malformed certificate: {e}")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(',', ':'))


def _provenance(rule: str, inputs: Dict[str, Any]) -> Provenance:
    digest = hashlib.sha256(f"{rule}:{canonical_json(inputs)}".encode('utf-8')).hexdigest()
    return Provenance(rule, inputs, digest)


# Rule registry used by replay
RULES: Dict[str, Callable[[Dict[str, Any]], BoundCertificate]] = {}


def rule(name: str):
    """Register the replay function of a certificate rule."""
    def decorator(func):
        RULES[name] = func
        return func
    return decorator


def _rationals(values) -> Tuple[Fraction, ...]:
    return tuple(parse_rational(v) if isinstance(v, str) else Fraction(v) for v in values)


def depth_id(depths: Sequence[Fraction]) -> str:
    return canonical_json({'sinkhole': {'eps': [render_rational(e) for e in depths]}})


# Upper bounds

def upper_trunc_vs_ellipsoid(beta: Fraction, from_domain: Optional[str] = None,
                             to_domain: Optional[str] = None) -> BoundCertificate:
    """delta_f(truncated, base ellipsoid) <= ((1 + beta) / beta)^2, for any eps."""
    if beta < 1:
        raise InvalidArgument(f"beta must be at least 1, got {beta}")
    from_domain = from_domain or f"truncated:beta={render_rational(beta)}"
    to_domain = to_domain or 'ellipsoid:base'
    inputs = {'beta': render_rational(beta), 'from': from_domain, 'to': to_domain}
    return BoundCertificate(Quantity.DELTA_F, Direction.UPPER, from_domain, to_domain,
                            ((1 + beta) / beta) ** 2, False, _provenance('coarsecvg', inputs))


@rule('coarsecvg')
def _replay_coarsecvg(inputs):
    return upper_trunc_vs_ellipsoid(parse_rational(inputs['beta']), inputs['from'], inputs['to'])


def _check_pair(eps, zeta):
    eps = validate_depths(tuple(eps), 'eps')
    zeta = validate_depths(tuple(zeta), 'zeta')
    if len(eps) != len(zeta):
        raise InvalidArgument("Depth vectors must have equal length", {'eps': len(eps), 'zeta': len(zeta)})
    return eps, zeta


def upper_sinkhole_pair(eps: Sequence[Fraction], zeta: Sequence[Fraction]) -> BoundCertificate:
    """d_f <= (max_m max{eps_m / zeta_m, zeta_m / eps_m})^2."""
    eps, zeta = _check_pair(eps, zeta)
    ratio = max(max(e / z, z / e) for e, z in zip(eps, zeta))
    inputs = {'eps': [render_rational(e) for e in eps], 'zeta': [render_rational(z) for z in zeta]}
    return BoundCertificate(Quantity.D_F, Direction.UPPER, depth_id(eps), depth_id(zeta),
                            ratio ** 2, True, _provenance('uppersink', inputs))


@rule('uppersink')
def _replay_uppersink(inputs):
    return upper_sinkhole_pair(_rationals(inputs['eps']), _rationals(inputs['zeta']))


def manual_inclusion(quantity: Quantity, from_domain: str, to_domain: str, value: Fraction,
                     note: str = '') -> BoundCertificate:
    """Upper bound declared from an explicit inclusion supplied by the user."""
    inputs = {'quantity': quantity.value, 'from': from_domain, 'to': to_domain,
              'value': render_rational(value), 'note': note}
    return BoundCertificate(quantity, Direction.UPPER, from_domain, to_domain, value, True,
                            _provenance('manual-inclusion', inputs))


@rule('manual-inclusion')
def _replay_manual(inputs):
    return manual_inclusion(Quantity(inputs['quantity']), inputs['from'], inputs['to'],
                            parse_rational(inputs['value']), inputs.get('note', ''))


# Lower bounds

def lower_sinkhole_pair(eps: Sequence[Fraction], zeta: Sequence[Fraction], n: int = 1) -> BoundCertificate:
    """delta_f(W_zeta, W_eps) >= max_m min{1 / eps_m, (zeta_m / eps_m)^2}.

    The value is recomputed through the barcode pipeline (degree 2 - 3n, unit
    window) and the two must agree exactly.
    """
    eps, zeta = _check_pair(eps, zeta)
    closed = max(Fraction(1), max(min(1 / e, (z / e) ** 2) for e, z in zip(eps, zeta)))

    source = sinkhole_barcode(SinkholeSpec(n, eps, default_sinkhole_base(n, len(eps))))
    target = sinkhole_barcode(SinkholeSpec(n, zeta, default_sinkhole_base(n, len(zeta))))
    engine = implantation_lower_bound(source, target)
    if engine.value != closed:
        raise InternalError("Sinkhole lower bound disagrees with the barcode pipeline",
                            {'closed_form': render_rational(closed), 'pipeline': render_rational(engine.value)})

    inputs = {'eps': [render_rational(e) for e in eps], 'zeta': [render_rational(z) for z in zeta], 'n': n}
    return BoundCertificate(Quantity.DELTA_F, Direction.LOWER, depth_id(zeta), depth_id(eps),
                            closed, engine.attained, _provenance('quasicor', inputs),
                            {'pipeline': engine.to_dict()})


@rule('quasicor')
def _replay_quasicor(inputs):
    return lower_sinkhole_pair(_rationals(inputs['eps']), _rationals(inputs['zeta']), int(inputs.get('n', 1)))


def lower_trunc_vs_all_ellipsoids(spec: TruncatedEllipsoidSpec, witness: DirichletWitness) -> BoundCertificate:
    """delta_f(V, truncated) for every ellipsoid V of the same dimension.

    The truncated barcode in degree k_beta is implanted into the ellipsoid
    barcode, which is empty in that degree at every level.

    Raises:
        OutsideWindow, DegenerateInput: beta is not certified by the witness
        HypothesisViolated: eps beta^2 >= 1, or the k_beta checks fail
    """
    certify_beta(spec.base, spec.beta, witness)
    if not spec.theorem_strength:
        raise HypothesisViolated("Need eps < beta^-2", {'check': 'theorem_strength'})
    degree = k_beta(spec)

    source = truncated_barcode(spec, degree)
    target = ellipsoid_empty_barcode(spec.base.m, degree)
    engine = implantation_lower_bound(source, target)

    p_star = trunc_nontrivial_period_infimum(spec)
    notes = {
        'degree': degree,
        'window_end': render_rational(source.window_end),
        'p_star': render_rational(p_star),
        'closed_form': None,
    }
    try:
        closed = corner_period_closed_form(spec, witness)
    except HypothesisViolated as e:
        # beta <= 2: the pipeline value stands without the closed-form cross-check
        logger.info(f"Closed-form bound skipped: {e.message}")
    else:
        closed_value = closed.rational_lower(spec) / spec.a_top
        notes.update({
            'closed_form': closed.to_dict(),
            'closed_form_value': render_rational(closed_value),
            'p_star_dominates_closed_form': closed.dominated_by(spec, p_star),
            'value_dominates_closed_form': engine.value >= closed_value,
        })
    inputs = {'domain': domain_id(spec), 'witness': witness.to_dict()}
    return BoundCertificate(Quantity.DELTA_F, Direction.LOWER, ALL_ELLIPSOIDS, domain_id(spec),
                            engine.value, engine.attained, _provenance('dellu-pipeline', inputs), notes)


@rule('dellu-pipeline')
def _replay_dellu(inputs):
    return lower_trunc_vs_all_ellipsoids(parse_domain(inputs['domain']), DirichletWitness.from_dict(inputs['witness']))


# Double-knot family

def double_knot_spec(n: int, eps: Fraction, beta: Fraction) -> TruncatedEllipsoidSpec:
    """The rescaled family a = (1, ..., 1, 1 - eps)."""
    base = EllipsoidSpec(tuple(Fraction(1) for _ in range(n)) + (1 - eps,))
    return TruncatedEllipsoidSpec(base, eps, beta)


def doubleknot_checks(n: int, eps: Fraction) -> List[Tuple[str, bool]]:
    """Run the exact checks behind the double-knot bounds.

    Raises:
        DoubleKnotHypothesisFailed: listing every failed check
    """
    if n < 1:
        raise InvalidArgument(f"n must be positive, got {n}")
    window = config.V34_WINDOW
    checks = [('eps>0', eps > 0), ('eps<1/6', eps < config.V34_EPS_LIMIT), ('eps<1/14', eps < window)]
    if not all(passed for _, passed in checks):
        raise DoubleKnotHypothesisFailed("Double-knot hypotheses fail",
                                         {'failed': [name for name, passed in checks if not passed]})

    low, high = config.V34_BETAS
    degrees = {low: 2 - 5 * n, high: 2 - 7 * n}
    for beta, degree in degrees.items():
        spec = double_knot_spec(n, eps, beta)
        other = degrees[high if beta == low else low]
        orbits = center_axis_orbits(spec, window)
        tag = f"beta={render_rational(beta)}"
        checks.append((f'{tag}:cz(N=1)=={degree}', bool(orbits) and orbits[0].cz == degree))
        checks.append((f'{tag}:never {other}', all(o.cz != other for o in orbits)))
        checks.append((f'{tag}:no adjacent degrees',
                       all(o.cz not in (d - 1, d + 1) for o in orbits for d in (degree, other))))
        checks.append((f'{tag}:P*>{render_rational(window)}', trunc_nontrivial_period_infimum(spec) > window))
        checks.append((f'{tag}:min a_j>{render_rational(window)}', min(spec.lower_capacities) > window))

    failed = [name for name, passed in checks if not passed]
    if failed:
        raise DoubleKnotHypothesisFailed("Double-knot hypotheses fail", {'failed': failed})
    return checks


def lower_double_knot(n: int, eps: Fraction, source_beta: Fraction, target_beta: Fraction) -> BoundCertificate:
    """delta_f(V_target, V_source) >= 1 / (14 eps) on the rescaled double-knot family.

    The pipeline value 1 / (14 eps (1 - eps)) is recorded in the notes and must
    be at least the certified value.
    """
    doubleknot_checks(n, eps)
    window = config.V34_WINDOW
    source_spec = double_knot_spec(n, eps, source_beta)
    target_spec = double_knot_spec(n, eps, target_beta)
    degree = k_beta(source_spec)

    source = truncated_barcode(source_spec, degree, window)
    target = truncated_barcode(target_spec, degree, window)
    engine = implantation_lower_bound(source, target)

    value = window / eps
    if engine.value < value:
        raise InternalError("Double-knot pipeline value is below the certified value",
                            {'pipeline': render_rational(engine.value), 'certified': render_rational(value)})
    inputs = {'n': n, 'eps': render_rational(eps), 'source_beta': render_rational(source_beta),
              'target_beta': render_rational(target_beta)}
    notes = {'degree': degree, 'pipeline': engine.to_dict()}
    return BoundCertificate(Quantity.DELTA_F, Direction.LOWER, domain_id(target_spec), domain_id(source_spec),
                            value, False, _provenance('v34', inputs), notes)


@rule('v34')
def _replay_v34(inputs):
    return lower_double_knot(int(inputs['n']), parse_rational(inputs['eps']),
                             parse_rational(inputs['source_beta']), parse_rational(inputs['target_beta']))


# Implications between quantities

def _derived(cert: BoundCertificate, quantity: Quantity, pair: Tuple[str, str]) -> BoundCertificate:
    inputs = {'certificate': cert.to_dict(), 'quantity': quantity.value, 'from': pair[0], 'to': pair[1]}
    return BoundCertificate(quantity, cert.direction, pair[0], pair[1], cert.value, cert.attained,
                            _provenance('easyineq', inputs))


def easyineq(cert: BoundCertificate) -> List[BoundCertificate]:
    """Every certificate implied by d_c <= delta_f (either order) <= d_f.

    Upper bounds pass down to smaller quantities, lower bounds up to larger
    ones, in both orders; symmetric quantities also yield their reversal.
    """
    forward, backward = cert.pair, (cert.to_domain, cert.from_domain)
    implied = []
    for quantity in Quantity:
        if quantity is cert.quantity:
            if quantity.symmetric and forward != backward:
                implied.append(_derived(cert, quantity, backward))
            continue
        lower_level = quantity.level < cert.quantity.level
        if lower_level != (cert.direction is Direction.UPPER):
            continue
        implied.append(_derived(cert, quantity, forward))
        if forward != backward:
            implied.append(_derived(cert, quantity, backward))
    return implied


def reverse(cert: BoundCertificate) -> BoundCertificate:
    """The same bound on the reversed pair, for the symmetric quantities."""
    if not cert.quantity.symmetric:
        raise InvalidArgument("delta_f is not symmetric and cannot be reversed")
    return _derived(cert, cert.quantity, (cert.to_domain, cert.from_domain))


@rule('easyineq')
def _replay_easyineq(inputs):
    parent = BoundCertificate.from_dict(inputs['certificate'])
    if not replay(parent):
        raise InvalidArgument("Parent certificate does not replay")
    return _derived(parent, Quantity(inputs['quantity']), (inputs['from'], inputs['to']))


def compose(c1: BoundCertificate, c2: BoundCertificate) -> BoundCertificate:
    """Multiplicative triangle inequality for two chained upper bounds.

    Raises:
        ChainMismatch: not both upper, different quantities, or c1.to != c2.from
    """
    if c1.direction is not Direction.UPPER or c2.direction is not Direction.UPPER:
        raise ChainMismatch("Only upper bounds compose", {'directions': [c1.direction.value, c2.direction.value]})
    if c1.quantity is not c2.quantity:
        raise ChainMismatch("Cannot chain different quantities",
                            {'quantities': [c1.quantity.value, c2.quantity.value]})
    if c1.to_domain != c2.from_domain:
        raise ChainMismatch("Chain is broken: first target differs from second source",
                            {'first_to': c1.to_domain, 'second_from': c2.from_domain})
    inputs = {'first': c1.to_dict(), 'second': c2.to_dict()}
    return BoundCertificate(c1.quantity, Direction.UPPER, c1.from_domain, c2.to_domain, c1.value * c2.value,
                            c1.attained and c2.attained, _provenance('triangle', inputs))


@rule('triangle')
def _replay_triangle(inputs):
    first = BoundCertificate.from_dict(inputs['first'])
    second = BoundCertificate.from_dict(inputs['second'])
    if not (replay(first) and replay(second)):
        raise InvalidArgument("A composed certificate does not replay")
    return compose(first, second)


def replay(cert: BoundCertificate) -> bool:
    """Rebuild a certificate from its provenance and compare."""
    provenance = cert.provenance
    if provenance.rule not in RULES:
        logger.warning(f"Unknown certificate rule {provenance.rule!r}")
        return False
    if _provenance(provenance.rule, provenance.inputs).digest != provenance.digest:
        logger.warning(f"Digest mismatch for {provenance.rule} certificate")
        return False
    rebuilt = RULES[provenance.rule](provenance.inputs)
    return (rebuilt.quantity, rebuilt.direction, rebuilt.pair, rebuilt.value, rebuilt.attained) == \
        (cert.quantity, cert.direction, cert.pair, cert.value, cert.attained)


def _stored_problem(cert: BoundCertificate) -> Optional[str]:
    provenance = cert.provenance
    inputs = provenance.inputs
    if provenance.rule not in RULES:
        return f"unknown rule {provenance.rule!r}"
    if _provenance(provenance.rule, inputs).digest != provenance.digest:
        return "digest does not match the inputs"
    if cert.stored_seal is not None and cert.stored_seal != cert.seal:
        return "seal is missing or does not match the claim"

    fixed = {'from': cert.from_domain, 'to': cert.to_domain, 'quantity': cert.quantity.value}
    for key, expected in fixed.items():
        if key in inputs and inputs[key] != expected:
            return f"inputs fix {key}={inputs[key]!r}, certificate has {expected!r}"
    if provenance.rule == 'manual-inclusion' and parse_rational(inputs['value']) != cert.value:
        return "declared value differs from the certificate value"
    if provenance.rule == 'dellu-pipeline' and inputs['domain'] != cert.to_domain:
        return "bounded domain differs from the certificate target"

    if provenance.rule == 'easyineq':
        parent = BoundCertificate.from_dict(inputs['certificate'])
        if (parent.direction, parent.value, parent.attained) != (cert.direction, cert.value, cert.attained):
            return "derived bound differs from its parent"
        return _stored_problem(parent)
    if provenance.rule == 'triangle':
        first = BoundCertificate.from_dict(inputs['first'])
        second = BoundCertificate.from_dict(inputs['second'])
        if first.to_domain != second.from_domain or {first.quantity, second.quantity} != {cert.quantity} \
                or {first.direction, second.direction} != {Direction.UPPER}:
            return "composed parts do not chain"
        if (first.from_domain, second.to_domain) != cert.pair or first.value * second.value != cert.value \
                or (first.attained and second.attained) != cert.attained:
            return "composed claim differs from its parts"
        return _stored_problem(first) or _stored_problem(second)
    return None


def verify(cert: BoundCertificate) -> bool:
    """Check a stored certificate without recomputing it.

    The provenance digest must match the inputs, a seal read from a file must
    match the claim, and whatever the inputs fix (pair, quantity, declared
    value, parent or composed parts) must agree with the certificate.
    """
    try:
        problem = _stored_problem(cert)
    except (InvalidArgument, KeyError, TypeError, ValueError) as e:
        problem = f"malformed inputs: {e}"
    if problem:
        logger.warning(f"{cert.provenance.rule} certificate fails verification: {problem}")
        return False
    return True


# Consistency

@dataclass(frozen=True)
class Verdict:
    kind: str
    quantity: str
    pair: Tuple[str, str]
    lower: Extended
    upper: Extended
    message: str

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'quantity': self.quantity, 'from': self.pair[0], 'to': self.pair[1],
                'lower': render_rational(self.lower), 'upper': render_rational(self.upper),
                'message': self.message}


def consistency_check(certs: Iterable[BoundCertificate]) -> List[Verdict]:
    """Cross-check a certificate set.

    Emits a "violation" whenever an implied lower bound exceeds an implied
    upper bound on the same quantity and ordered pair, and a "strict" verdict
    when a d_c upper bound lies below delta_f lower bounds in both orders.
    """
    closure = []
    for cert in certs:
        closure.append(cert)
        closure.extend(easyineq(cert))

    uppers, lowers = {}, {}
    for cert in closure:
        key = (cert.quantity, cert.pair)
        table = uppers if cert.direction is Direction.UPPER else lowers
        if cert.direction is Direction.UPPER:
            if key not in table or cert.value < table[key]:
                table[key] = cert.value
        elif key not in table or cert.value > table[key]:
            table[key] = cert.value

    verdicts = []
    for key in sorted(set(uppers) & set(lowers), key=lambda k: (k[0].level, k[1])):
        quantity, pair = key
        if lowers[key] > uppers[key]:
            verdicts.append(Verdict('violation', quantity.value, pair, lowers[key], uppers[key],
                                    f"{quantity.value} lower bound exceeds upper bound"))

    for (quantity, pair), upper in sorted(uppers.items(), key=lambda item: (item[0][0].level, item[0][1])):
        if quantity is not Quantity.D_C or pair[0] >= pair[1]:
            continue
        forward = lowers.get((Quantity.DELTA_F, pair))
        backward = lowers.get((Quantity.DELTA_F, (pair[1], pair[0])))
        if forward is not None and backward is not None and min(forward, backward) > upper:
            verdicts.append(Verdict('strict', quantity.value, pair, min(forward, backward), upper,
                                    "d_c is strictly below delta_f in both orders"))
    if not any(v.kind == 'violation' for v in verdicts):
        logger.info(f"Consistency check passed on {len(closure)} certificates (with implications)")
    return verdicts
