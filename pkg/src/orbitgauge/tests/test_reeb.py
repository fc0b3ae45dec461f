from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ..engine.diophantine import dirichlet_tuple
from ..engine.domains import EllipsoidSpec, RadialProfile, SinkholeSpec, TruncatedEllipsoidSpec, default_sinkhole_base
from ..engine.reeb import (OrbitFamily, center_axis_orbits, corner_period_closed_form, corner_period_infimum,
                           cz_boundary_lift, cz_center_axis, ellipsoid_spectrum, ellipsoid_spectrum_by_tubes, k_beta,
                           sinkhole_spectrum, trunc_corner_infimum, trunc_nontrivial_period_infimum, trunc_orbits,
                           trunc_profile, tube_orbits)
from ..error_handlers import (BetaNotCertified, DegenerateInput, DegenerateOrbit, HypothesisViolated,
                              InvalidParameter)

F = Fraction


@pytest.mark.unit
def test_ellipsoid_spectrum_example():
    """E(1, 99/70) below 2 has three orbits of index 3, 5, 7."""
    orbits = ellipsoid_spectrum(EllipsoidSpec((F(1), F(99, 70))), F(2))
    assert [o.period for o in orbits] == [F(1), F(99, 70), F(2)]
    assert [o.cz for o in orbits] == [3, 5, 7]
    assert [(o.index, o.multiplicity) for o in orbits] == [((1,), 1), ((2,), 1), ((1,), 2)]
    assert all(o.family is OrbitFamily.AXIS for o in orbits)


@pytest.mark.unit
def test_ellipsoid_spectrum_rejects_resonance():
    with pytest.raises(DegenerateInput):
        ellipsoid_spectrum(EllipsoidSpec((F(1), F(2))), F(3))
    with pytest.raises(InvalidParameter):
        ellipsoid_spectrum(EllipsoidSpec((F(1), F(2))), F(0))


# Distinct primes above every multiplicity reached below 10 max(a), so no N a_k / a_j is an integer
TOWER_PRIMES = (307, 311, 313, 317)


@st.composite
def generic_capacities(draw):
    size = draw(st.integers(min_value=2, max_value=4))
    capacities = []
    for p in TOWER_PRIMES[:size]:
        numerator = draw(st.integers(min_value=p + 1, max_value=3 * p - 1).filter(lambda n, p=p: n % p))
        capacities.append(F(numerator, p))
    return draw(st.permutations(capacities))


@pytest.mark.property
@settings(max_examples=50, deadline=None)
@given(generic_capacities())
def test_tube_tower_matches_closed_form(capacities):
    """Viewing E(a_1..a_m) as a tube over E(a_1..a_{m-1}) reproduces the closed form up to 10 max(a)."""
    spec = EllipsoidSpec(tuple(capacities))
    cap = 10 * max(capacities)
    closed = ellipsoid_spectrum(spec, cap)
    assert ellipsoid_spectrum_by_tubes(spec, cap) == closed
    assert len(closed) == sum(int(cap / a) for a in capacities)


@pytest.mark.property
@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(min_value=1, max_value=3, max_denominator=12), min_size=2, max_size=4))
def test_tube_tower_agrees_or_both_reject(capacities):
    """Resonant capacity vectors are rejected by the closed form and the tower alike."""
    spec = EllipsoidSpec(tuple(capacities))
    cap = 10 * max(capacities)
    try:
        closed = ellipsoid_spectrum(spec, cap)
    except DegenerateInput:
        with pytest.raises((DegenerateInput, DegenerateOrbit)):
            ellipsoid_spectrum_by_tubes(spec, cap)
        return
    assert ellipsoid_spectrum_by_tubes(spec, cap) == closed


@pytest.mark.unit
def test_trunc_period_infimum(dellu_spec, disk_base):
    """P* is 34/133 at beta = 299/100 and 103/400 at beta = 3."""
    assert trunc_nontrivial_period_infimum(dellu_spec) == F(34, 133)
    info = trunc_corner_infimum(dellu_spec)
    assert (info.N, info.j, info.k) == (1, 1, 2)
    spec = TruncatedEllipsoidSpec(disk_base, F(1, 100), F(3))
    assert trunc_nontrivial_period_infimum(spec) == F(103, 400)


@pytest.mark.unit
def test_corner_families_agree_with_infimum(dellu_spec):
    """The smallest enumerated corner bound is P*."""
    orbits = trunc_orbits(dellu_spec, F(1, 2), 3)
    corners = [o for o in orbits if o.family is OrbitFamily.CORNER_FAMILY]
    assert corners
    assert all(o.cz is None and not o.nondegenerate for o in corners)
    assert min(o.period_lower_bound for o in corners) == F(34, 133)
    centres = [o for o in orbits if o.family is OrbitFamily.CENTER_AXIS]
    assert len(centres) == 50
    assert not [o for o in orbits if o.family is OrbitFamily.BOUNDARY_LIFT]


@pytest.mark.unit
def test_corner_infimum_without_breakpoints():
    profile = RadialProfile(((F(-1), F(1)),), ())
    assert corner_period_infimum(EllipsoidSpec((F(1),)), profile).value == float('inf')


@pytest.mark.unit
def test_center_axis_indices(dellu_spec):
    """CZ of the N-th centre axis orbit is 1 - 4N while N < 100."""
    orbits = center_axis_orbits(dellu_spec, F(34, 133))
    assert len(orbits) == 25
    assert [o.cz for o in orbits[:3]] == [-3, -7, -11]
    assert k_beta(dellu_spec) == -3


@pytest.mark.unit
def test_k_beta_needs_steep_profile():
    spec = TruncatedEllipsoidSpec(EllipsoidSpec((F(3), F(1))), F(1, 10), F(3, 2))
    with pytest.raises(HypothesisViolated) as excinfo:
        k_beta(spec)
    assert excinfo.value.details['check'] == 'strict_decrease'


@pytest.mark.unit
def test_cz_center_axis_degenerate():
    with pytest.raises(DegenerateOrbit):
        cz_center_axis(F(2), (F(1),), 1)


@pytest.mark.unit
def test_cz_boundary_lift():
    assert cz_boundary_lift(3, F(1), F(3, 2)) == 4
    assert cz_boundary_lift(3, F(7, 2), F(1)) == 10
    with pytest.raises(DegenerateOrbit):
        cz_boundary_lift(3, F(2), F(1))


@pytest.mark.unit
def test_tube_degeneracy(dellu_spec):
    """The flat part of E(1,1) is degenerate once its orbits enter the cap."""
    with pytest.raises(DegenerateOrbit):
        trunc_orbits(dellu_spec, F(1), 1)


@pytest.mark.unit
def test_resonant_middle_segment():
    """A middle segment of integer slope carries a circle family."""
    profile = RadialProfile(((F(7, 3), F(1, 2)), (F(0), F(1)), (F(-2), F(2))), (F(3, 14), F(1, 2)))
    base = EllipsoidSpec((F(1),))
    with pytest.raises(DegenerateOrbit) as excinfo:
        tube_orbits(base, profile, F(1), 1)
    assert excinfo.value.details['segment'] == 2

    orbits = tube_orbits(base, profile, F(9, 10), 1)
    centre = [o for o in orbits if o.family is OrbitFamily.CENTER_AXIS]
    assert [(o.period, o.cz) for o in centre] == [(F(1, 2), -3)]


@pytest.mark.unit
def test_closed_form_bound(dellu_spec, dellu_witness):
    """For n = 1 the constant is 1/6 with exponent 1, and P* clears it."""
    bound = corner_period_closed_form(dellu_spec, dellu_witness)
    assert bound.C == F(1, 6)
    assert bound.exponent == 1
    assert bound.dominated_by(dellu_spec, trunc_nontrivial_period_infimum(dellu_spec))
    assert bound.rational_lower(dellu_spec) == F(299, 600)


@pytest.mark.unit
def test_closed_form_hypotheses(dellu_spec, disk_base):
    with pytest.raises(BetaNotCertified):
        corner_period_closed_form(dellu_spec)

    low = TruncatedEllipsoidSpec(disk_base, F(1, 100), F(15, 8))
    with pytest.raises(HypothesisViolated):
        corner_period_closed_form(low, dirichlet_tuple(disk_base, 2))

    thick = TruncatedEllipsoidSpec(disk_base, F(1, 5), F(299, 100))
    with pytest.raises(HypothesisViolated):
        corner_period_closed_form(thick, dirichlet_tuple(disk_base, 3))

    with pytest.raises(BetaNotCertified):
        corner_period_closed_form(dellu_spec, dirichlet_tuple(disk_base, 5))


@pytest.mark.unit
def test_trunc_profile_breakpoint_is_corner(dellu_spec):
    profile = trunc_profile(dellu_spec)
    assert profile.segments == ((F(299, 100), F(1, 100)), (F(-1), F(1)))


@pytest.mark.unit
def test_sinkhole_spectrum():
    """Below b = 9/10 the depths 1/10 and 1/3 give nine and two orbits."""
    spec = SinkholeSpec(1, (F(1, 10), F(1, 3)), default_sinkhole_base(1, 2))
    orbits = sinkhole_spectrum(spec, F(9, 10))
    by_depth = {}
    for orbit in orbits:
        assert orbit.family is OrbitFamily.SINKHOLE_CENTER
        by_depth.setdefault(orbit.index[0], []).append(orbit)
    assert [o.multiplicity for o in sorted(by_depth[1], key=lambda o: o.multiplicity)] == list(range(1, 10))
    assert [o.multiplicity for o in sorted(by_depth[2], key=lambda o: o.multiplicity)] == [1, 2]
    cz = {(o.index[0], o.multiplicity): o.cz for o in orbits}
    assert cz[(1, 1)] == -1
    assert cz[(2, 1)] == -1
    assert cz[(1, 2)] == -3
    assert cz[(2, 2)] == -3
    assert all((c - 1) % 2 == 0 for c in cz.values())


@pytest.mark.unit
def test_sinkhole_spectrum_regime():
    spec = SinkholeSpec(1, (F(1, 10),), default_sinkhole_base(1, 1))
    with pytest.raises(InvalidParameter):
        sinkhole_spectrum(spec, F(1, 2))
    with pytest.raises(InvalidParameter):
        sinkhole_spectrum(spec, F(1))
    shallow = SinkholeSpec(1, (F(1, 2),), default_sinkhole_base(1, 1))
    with pytest.raises(InvalidParameter):
        sinkhole_spectrum(shallow, F(3, 4))


@pytest.mark.unit
def test_orbit_rows(dellu_spec):
    orbit = center_axis_orbits(dellu_spec, F(1, 50))[0]
    assert orbit.to_dict()['period'] == '1/100'
    row = orbit.csv_row()
    assert row['bound_flag'] == 'false'
    assert row['m_or_k'] == ''
    assert row['cz'] == -3
