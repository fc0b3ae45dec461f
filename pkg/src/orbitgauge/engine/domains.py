"""
Domain descriptors for the supported families and their JSON schema.

Families: ellipsoids E(a_1..a_m), truncated ellipsoids cut by the profile
min{a(eps + beta u), a(1 - u)}, sinkhole domains with D radial depressions,
and generic radial tubes over an ellipsoid base with a concave piecewise
linear profile.
"""
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Tuple, Union

from ..error_handlers import InvalidArgument, InvalidParameter
from .numeric import parse_rational, render_rational

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _invalid(field, message, **details):
    details['field'] = field
    return InvalidParameter(message, details)


@dataclass(frozen=True)
class EllipsoidSpec:
    capacities: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.capacities:
            raise _invalid('a', "Ellipsoid needs at least one capacity")
        for index, value in enumerate(self.capacities):
            if value <= 0:
                raise _invalid(f'a[{index}]', f"Capacity must be positive, got {value}")

    @property
    def m(self) -> int:
        return len(self.capacities)


@dataclass(frozen=True)
class RadialProfile:
    """Concave piecewise-linear h on [0,1] with h(1) = 0.

    Segment i is u -> slope_i * u + intercept_i on [u_{i-1}, u_i]; the intercept
    is the tangent intercept tau = h - u h' on that segment.
    """
    segments: Tuple[Tuple[Fraction, Fraction], ...]
    breakpoints: Tuple[Fraction, ...]

    def __post_init__(self):
        if not self.segments:
            raise _invalid('segments', "Profile needs at least one segment")
        if len(self.breakpoints) != len(self.segments) - 1:
            raise _invalid('breakpoints', "Need exactly one breakpoint between consecutive segments",
                           segments=len(self.segments), breakpoints=len(self.breakpoints))
        previous = Fraction(0)
        for index, u in enumerate(self.breakpoints):
            if not previous < u < 1:
                raise _invalid(f'breakpoints[{index}]', "Breakpoints must ascend strictly inside (0,1)")
            previous = u
        for index, (slope, intercept) in enumerate(self.segments):
            if intercept <= 0:
                raise _invalid(f'segments[{index}]', "Tangent intercept must be positive",
                               intercept=render_rational(intercept))
            if index and slope >= self.segments[index - 1][0]:
                raise _invalid(f'segments[{index}]', "Slopes must strictly decrease (concavity)")
        for index, u in enumerate(self.breakpoints):
            (s0, c0), (s1, c1) = self.segments[index], self.segments[index + 1]
            if s0 * u + c0 != s1 * u + c1:
                raise _invalid(f'breakpoints[{index}]', "Profile is discontinuous at breakpoint",
                               u=render_rational(u))
        slope, intercept = self.segments[-1]
        if slope + intercept != 0:
            raise _invalid('segments', "Profile must vanish at u = 1",
                           value=render_rational(slope + intercept))

    def segment_index(self, u: Fraction) -> int:
        for index, breakpoint in enumerate(self.breakpoints):
            if u < breakpoint:
                return index
        return len(self.segments) - 1

    def value(self, u: Fraction) -> Fraction:
        slope, intercept = self.segments[self.segment_index(u)]
        return slope * u + intercept

    def tau(self, u: Fraction) -> Fraction:
        """Tangent intercept h(u) - u h'(u); right-derivative at breakpoints."""
        return self.segments[self.segment_index(u)][1]

    @property
    def slope_at_zero(self) -> Fraction:
        return self.segments[0][0]

    @property
    def tau_at_boundary(self) -> Fraction:
        return self.segments[-1][1]


@dataclass(frozen=True)
class TruncatedEllipsoidSpec:
    base: EllipsoidSpec
    epsilon: Fraction
    beta: Fraction

    def __post_init__(self):
        if self.base.m < 2:
            raise _invalid('a', "Truncated ellipsoid needs n + 1 >= 2 capacities")
        if not 0 < self.epsilon < 1:
            raise _invalid('eps', f"eps must lie in (0,1), got {self.epsilon}")
        if not self.beta > 1:
            raise _invalid('beta', f"beta must exceed 1, got {self.beta}")

    @property
    def n(self) -> int:
        return self.base.m - 1

    @property
    def a_top(self) -> Fraction:
        """The capacity a_{n+1} of the truncated factor."""
        return self.base.capacities[-1]

    @property
    def lower_capacities(self) -> Tuple[Fraction, ...]:
        return self.base.capacities[:-1]

    @property
    def theorem_strength(self) -> bool:
        return self.epsilon * self.beta ** 2 < 1


@dataclass(frozen=True)
class SinkholeSpec:
    n: int
    depths: Tuple[Fraction, ...]
    base: EllipsoidSpec

    def __post_init__(self):
        if self.n < 1:
            raise _invalid('n', f"n must be a positive integer, got {self.n}")
        validate_depths(self.depths)
        if self.base.m != self.n:
            raise _invalid('a', "Base ellipsoid must have n capacities", n=self.n, m=self.base.m)
        for index, value in enumerate(self.base.capacities):
            if value <= 1:
                raise _invalid(f'a[{index}]', f"Base capacities must exceed 1, got {value}")

    @property
    def D(self) -> int:
        return len(self.depths)

    @property
    def strict_regime(self) -> bool:
        """Orbit classification holds only for eps_D < 1/2."""
        return self.depths[-1] < HALF


@dataclass(frozen=True)
class RadialTubeSpec:
    base: EllipsoidSpec
    profile: RadialProfile


DomainSpec = Union[EllipsoidSpec, TruncatedEllipsoidSpec, SinkholeSpec, RadialTubeSpec]


def validate_depths(depths, field='eps'):
    """Check 0 < eps_1 <= ... <= eps_D <= 1/2."""
    if not depths:
        raise _invalid(field, "At least one sinkhole depth is required")
    previous = Fraction(0)
    for index, value in enumerate(depths):
        if not 0 < value <= HALF:
            raise _invalid(f'{field}[{index}]', f"Depth must lie in (0, 1/2], got {value}")
        if value < previous:
            raise _invalid(f'{field}[{index}]', "Depths must be ascending")
        previous = value
    return tuple(depths)


def default_sinkhole_base(n: int, D: int) -> EllipsoidSpec:
    return EllipsoidSpec(tuple(Fraction(D + 1) for _ in range(n)))


# Parsing

def _scalar(value, field):
    if isinstance(value, bool) or isinstance(value, float):
        raise _invalid(field, "Scalars must be strings in p/q or decimal form")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise _invalid(field, "Scalars must be strings in p/q or decimal form")
    try:
        return parse_rational(value)
    except InvalidArgument as e:
        raise _invalid(field, e.message)


def _scalar_list(values, field):
    if not isinstance(values, list):
        raise _invalid(field, "Expected a list of scalars")
    return tuple(_scalar(v, f'{field}[{i}]') for i, v in enumerate(values))


def _require(body, key, tag):
    if not isinstance(body, dict) or key not in body:
        raise _invalid(f'{tag}.{key}', f"Missing field {key!r}")
    return body[key]


def _prefixed(tag, builder):
    try:
        return builder()
    except InvalidParameter as e:
        details = dict(e.details or {})
        field = details.get('field', '')
        if not field.startswith(f'{tag}.'):
            details['field'] = f'{tag}.{field}' if field else tag
        raise InvalidParameter(e.message, details)


def parse_domain(descriptor: Union[str, Dict[str, Any]]) -> DomainSpec:
    """Parse and validate a domain descriptor.

    Args:
        descriptor: JSON text or an already decoded object with exactly one of
            the keys "ellipsoid", "truncated", "sinkhole", "radial_tube"

    Returns:
        The validated spec

    Raises:
        InvalidArgument: malformed JSON or unknown tag
        InvalidParameter: a family invariant fails; details name the field path
    """
    if isinstance(descriptor, str):
        try:
            descriptor = json.loads(descriptor)
        except json.JSONDecodeError as e:
            raise InvalidArgument(f"Domain descriptor is not valid JSON: {e.msg}")
    if not isinstance(descriptor, dict) or len(descriptor) != 1:
        raise InvalidArgument("Domain descriptor must be an object with exactly one family key")

    tag, body = next(iter(descriptor.items()))
    if tag == 'ellipsoid':
        return _prefixed(tag, lambda: EllipsoidSpec(_scalar_list(body, 'a')))
    if tag == 'truncated':
        return _prefixed(tag, lambda: TruncatedEllipsoidSpec(
            EllipsoidSpec(_scalar_list(_require(body, 'a', tag), 'a')),
            _scalar(_require(body, 'eps', tag), 'eps'),
            _scalar(_require(body, 'beta', tag), 'beta'),
        ))
    if tag == 'sinkhole':
        return _prefixed(tag, lambda: _parse_sinkhole(body))
    if tag == 'radial_tube':
        return _prefixed(tag, lambda: _parse_radial_tube(body))
    raise InvalidArgument(f"Unknown domain family {tag!r}",
                          {'field': tag, 'allowed': ['ellipsoid', 'truncated', 'sinkhole', 'radial_tube']})


def _parse_sinkhole(body):
    n = _require(body, 'n', 'sinkhole')
    if isinstance(n, bool) or not isinstance(n, int):
        raise _invalid('n', "n must be an integer")
    depths = _scalar_list(_require(body, 'eps', 'sinkhole'), 'eps')
    if 'a' in body:
        base = EllipsoidSpec(_scalar_list(body['a'], 'a'))
    else:
        base = default_sinkhole_base(n, len(depths))
    return SinkholeSpec(n, depths, base)


def _parse_radial_tube(body):
    base = EllipsoidSpec(_scalar_list(_require(body, 'a', 'radial_tube'), 'a'))
    raw_segments = _require(body, 'segments', 'radial_tube')
    if not isinstance(raw_segments, list):
        raise _invalid('segments', "Expected a list of [slope, intercept] pairs")
    segments = []
    for index, pair in enumerate(raw_segments):
        if not isinstance(pair, list) or len(pair) != 2:
            raise _invalid(f'segments[{index}]', "Expected a [slope, intercept] pair")
        segments.append((_scalar(pair[0], f'segments[{index}][0]'),
                         _scalar(pair[1], f'segments[{index}][1]')))
    breakpoints = _scalar_list(body.get('breakpoints', []), 'breakpoints')
    return RadialTubeSpec(base, RadialProfile(tuple(segments), breakpoints))


# Rendering

def _render_list(values):
    return [render_rational(v) for v in values]


def render_domain(spec: DomainSpec) -> Dict[str, Any]:
    """Canonical descriptor; parse_domain(render_domain(s)) == s."""
    if isinstance(spec, EllipsoidSpec):
        return {'ellipsoid': _render_list(spec.capacities)}
    if isinstance(spec, TruncatedEllipsoidSpec):
        return {'truncated': {
            'a': _render_list(spec.base.capacities),
            'eps': render_rational(spec.epsilon),
            'beta': render_rational(spec.beta),
        }}
    if isinstance(spec, SinkholeSpec):
        return {'sinkhole': {
            'n': spec.n,
            'eps': _render_list(spec.depths),
            'a': _render_list(spec.base.capacities),
        }}
    if isinstance(spec, RadialTubeSpec):
        return {'radial_tube': {
            'a': _render_list(spec.base.capacities),
            'segments': [_render_list(pair) for pair in spec.profile.segments],
            'breakpoints': _render_list(spec.profile.breakpoints),
        }}
    raise InvalidArgument(f"Not a domain spec: {type(spec).__name__}")


def domain_id(spec: DomainSpec) -> str:
    """Compact canonical identifier used on certificates."""
    return json.dumps(render_domain(spec), sort_keys=True, separators=(',', ':'))


def trunc_profile(spec: TruncatedEllipsoidSpec) -> RadialProfile:
    """Two-segment profile min{a(eps + beta u), a(1 - u)} with a = a_{n+1}."""
    a = spec.a_top
    breakpoint = (1 - spec.epsilon) / (1 + spec.beta)
    return RadialProfile(
        segments=((spec.beta * a, spec.epsilon * a), (-a, a)),
        breakpoints=(breakpoint,),
    )


def scale_domain(spec: DomainSpec, s: Fraction) -> DomainSpec:
    """Liouville rescaling by s > 0: capacities and profile values scale by s."""
    if s <= 0:
        raise InvalidArgument(f"Scale factor must be positive, got {s}")
    if isinstance(spec, EllipsoidSpec):
        return EllipsoidSpec(tuple(s * a for a in spec.capacities))
    if isinstance(spec, TruncatedEllipsoidSpec):
        return TruncatedEllipsoidSpec(scale_domain(spec.base, s), spec.epsilon, spec.beta)
    if isinstance(spec, RadialTubeSpec):
        profile = RadialProfile(
            tuple((s * slope, s * intercept) for slope, intercept in spec.profile.segments),
            spec.profile.breakpoints,
        )
        return RadialTubeSpec(scale_domain(spec.base, s), profile)
    raise InvalidArgument("Sinkhole domains are normalised to the unit ball and do not rescale")
