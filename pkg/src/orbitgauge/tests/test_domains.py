import json
from fractions import Fraction

import pytest

from ..engine.domains import (EllipsoidSpec, RadialProfile, RadialTubeSpec, SinkholeSpec, TruncatedEllipsoidSpec,
                              default_sinkhole_base, domain_id, parse_domain, render_domain, scale_domain,
                              trunc_profile)
from ..error_handlers import InvalidArgument, InvalidParameter


def _field(excinfo):
    return excinfo.value.details['field']


@pytest.mark.unit
def test_parse_ellipsoid():
    """Scalars may be strings or integers."""
    spec = parse_domain('{"ellipsoid": ["1", "99/70", 2]}')
    assert spec == EllipsoidSpec((Fraction(1), Fraction(99, 70), Fraction(2)))


@pytest.mark.unit
def test_parse_truncated():
    """A truncated descriptor carries a, eps and beta."""
    spec = parse_domain({'truncated': {'a': ['1', '1'], 'eps': '1/100', 'beta': '299/100'}})
    assert isinstance(spec, TruncatedEllipsoidSpec)
    assert spec.n == 1
    assert spec.a_top == 1
    assert spec.theorem_strength


@pytest.mark.unit
def test_parse_sinkhole_default_base():
    """Without "a" the base capacities are D + 1."""
    spec = parse_domain({'sinkhole': {'n': 1, 'eps': ['1/10', '1/3']}})
    assert spec.base == default_sinkhole_base(1, 2)
    assert spec.base.capacities == (Fraction(3),)
    assert spec.strict_regime


@pytest.mark.unit
def test_parse_radial_tube():
    """Radial tubes give segments as [slope, intercept] pairs."""
    spec = parse_domain({'radial_tube': {'a': ['1'], 'segments': [['3', '1/10'], ['-1', '1']],
                                         'breakpoints': ['9/40']}})
    assert isinstance(spec, RadialTubeSpec)
    assert spec.profile.value(Fraction(1)) == 0
    assert spec.profile.tau(Fraction(1, 10)) == Fraction(1, 10)
    assert spec.profile.tau_at_boundary == 1


@pytest.mark.unit
@pytest.mark.parametrize('descriptor, field', [
    ({'ellipsoid': ['1', '-1']}, 'ellipsoid.a[1]'),
    ({'truncated': {'a': ['1', '1'], 'eps': '3/2', 'beta': '3'}}, 'truncated.eps'),
    ({'truncated': {'a': ['1', '1'], 'eps': '1/10', 'beta': '1'}}, 'truncated.beta'),
    ({'truncated': {'a': ['1'], 'eps': '1/10', 'beta': '3'}}, 'truncated.a'),
    ({'truncated': {'a': ['1', '1'], 'beta': '3'}}, 'truncated.eps'),
    ({'sinkhole': {'n': 1, 'eps': ['1/3', '1/10']}}, 'sinkhole.eps[1]'),
    ({'sinkhole': {'n': 1, 'eps': ['3/5']}}, 'sinkhole.eps[0]'),
    ({'sinkhole': {'n': 1, 'eps': ['1/3'], 'a': ['1']}}, 'sinkhole.a[0]'),
    ({'ellipsoid': [0.5]}, 'ellipsoid.a[0]'),
])
def test_invariant_failures_name_the_field(descriptor, field):
    """Each family invariant failure is an InvalidParameter with a field path."""
    with pytest.raises(InvalidParameter) as excinfo:
        parse_domain(descriptor)
    assert _field(excinfo) == field


@pytest.mark.unit
@pytest.mark.parametrize('descriptor', ['{not json', '{"cube": [1]}', '[1, 2]', '{"ellipsoid": [1], "sinkhole": {}}'])
def test_malformed_descriptors(descriptor):
    """Bad JSON and unknown tags are InvalidArgument."""
    with pytest.raises(InvalidArgument):
        parse_domain(descriptor)


@pytest.mark.unit
def test_profile_must_be_concave():
    """Slopes must strictly decrease across breakpoints."""
    with pytest.raises(InvalidParameter):
        RadialProfile(((Fraction(-1), Fraction(1)), (Fraction(3), Fraction(-2))), (Fraction(3, 4),))


@pytest.mark.unit
def test_render_round_trip():
    """render_domain is the canonical descriptor parse_domain accepts."""
    specs = [
        parse_domain({'ellipsoid': ['1', '99/70']}),
        parse_domain({'truncated': {'a': ['2', '3'], 'eps': '1/7', 'beta': '5/2'}}),
        parse_domain({'sinkhole': {'n': 2, 'eps': ['1/10', '1/2']}}),
    ]
    for spec in specs:
        assert parse_domain(render_domain(spec)) == spec
        assert parse_domain(domain_id(spec)) == spec


@pytest.mark.unit
def test_domain_id_is_compact_and_sorted():
    """Identifiers are canonical JSON."""
    spec = parse_domain({'truncated': {'beta': '3', 'eps': '1/10', 'a': ['1', '1']}})
    assert domain_id(spec) == '{"truncated":{"a":["1","1"],"beta":"3","eps":"1/10"}}'
    assert json.loads(domain_id(spec)) == render_domain(spec)


@pytest.mark.unit
def test_trunc_profile(dellu_spec):
    """min{a(eps + beta u), a(1 - u)} meets at (1 - eps) / (1 + beta)."""
    profile = trunc_profile(dellu_spec)
    u = profile.breakpoints[0]
    assert u == Fraction(99, 399)
    assert profile.value(u) == 1 - u
    assert profile.slope_at_zero == Fraction(299, 100)


@pytest.mark.unit
def test_scale_domain(dellu_spec):
    """Scaling multiplies capacities and leaves eps and beta alone."""
    scaled = scale_domain(dellu_spec, Fraction(3))
    assert scaled.base.capacities == (Fraction(3), Fraction(3))
    assert scaled.epsilon == dellu_spec.epsilon
    with pytest.raises(InvalidArgument):
        scale_domain(SinkholeSpec(1, (Fraction(1, 3),), default_sinkhole_base(1, 1)), Fraction(2))
    with pytest.raises(InvalidArgument):
        scale_domain(dellu_spec, Fraction(0))
