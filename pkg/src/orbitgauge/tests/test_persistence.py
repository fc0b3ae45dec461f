from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from ..engine.domains import SinkholeSpec, default_sinkhole_base
from ..engine.numeric import INFINITY, root_bounds
from ..engine.persistence import (Bar, CertifiedBarcode, barcode_from_orbits, dim, ellipsoid_empty_barcode,
                                  implantation_lower_bound, rank, scale_barcode, sinkhole_barcode,
                                  truncated_barcode, truncated_window)
from ..engine.reeb import OrbitFamily, ReebOrbit
from ..error_handlers import HypothesisViolated, InvalidArgument, QueryAtBirth

F = Fraction


@pytest.fixture
def two_bars():
    return CertifiedBarcode(0, F(10), (Bar(F(2), F(10)), Bar(F(1), F(5))))


@pytest.mark.unit
def test_bars_are_sorted(two_bars):
    assert two_bars.births() == [F(1), F(2)]
    assert CertifiedBarcode.from_dict(two_bars.to_dict()) == two_bars


@pytest.mark.unit
def test_rank_and_dim(two_bars):
    assert rank(two_bars, F(3), F(4)) == 2
    assert rank(two_bars, F(3), F(6)) == 1
    assert rank(two_bars, F(1, 2), F(4)) == 0
    assert dim(two_bars, F(3, 2)) == 1
    assert dim(two_bars, F(10)) == 1


@pytest.mark.unit
def test_rank_rejects_bad_levels(two_bars):
    with pytest.raises(QueryAtBirth):
        rank(two_bars, F(1), F(3))
    with pytest.raises(QueryAtBirth):
        rank(two_bars, F(1, 2), F(2))
    with pytest.raises(InvalidArgument):
        rank(two_bars, F(4), F(3))
    with pytest.raises(InvalidArgument):
        rank(two_bars, F(3), F(11))


@pytest.mark.unit
def test_bar_validation():
    with pytest.raises(InvalidArgument):
        CertifiedBarcode(0, F(10), (Bar(F(5), F(3)),))
    with pytest.raises(InvalidArgument):
        CertifiedBarcode(0, F(4), (Bar(F(1), F(5)),))
    with pytest.raises(InvalidArgument):
        CertifiedBarcode(0, F(0))


@pytest.mark.unit
@pytest.mark.parametrize('a', [F(1), F(3, 2), F(7)])
@pytest.mark.parametrize('s, t', [(F(3, 2), F(3)), (F(3), F(4)), (F(3), F(6)), (F(9, 2), F(10))])
def test_scaling_is_covariant(two_bars, a, s, t):
    """Shrinking by a divides every level by a."""
    assert rank(scale_barcode(two_bars, a), s / a, t / a) == rank(two_bars, s, t)


@pytest.mark.unit
def test_scale_factor_below_one(two_bars):
    with pytest.raises(InvalidArgument):
        scale_barcode(two_bars, F(1, 2))


def _obstructed(source, target, a):
    """Scan a grid of levels for rank(s, a^2 s) > dim(a s)."""
    b = a * a
    for step in range(1, 1001):
        s = F(step, 100)
        if b * s > source.window_end or a * s > target.window_end:
            break
        try:
            if rank(source, s, b * s) > dim(target, a * s):
                return True
        except QueryAtBirth:
            continue
    return False


@pytest.mark.unit
def test_implantation_matches_brute_force():
    """The supremum separates obstructed from free scale factors on a grid."""
    source = CertifiedBarcode(0, F(10), (Bar(F(1), F(10)), Bar(F(2), F(10))))
    target = CertifiedBarcode(0, INFINITY, (Bar(F(3, 2), INFINITY), Bar(F(5), INFINITY)))
    bound = implantation_lower_bound([source], [target])
    assert bound.value == 5
    assert not bound.attained
    assert bound.degree_used == 0
    assert bound.witness_s > 2
    for k in range(9, 25):
        a = F(k, 8)
        assert _obstructed(source, target, a) == (a * a < bound.value), a


@pytest.mark.unit
def test_implantation_single_bar():
    source = CertifiedBarcode(0, F(10), (Bar(F(1), F(10)),))
    target = CertifiedBarcode(0, INFINITY, (Bar(F(3), INFINITY),))
    assert implantation_lower_bound(source, target).value == 9
    empty = CertifiedBarcode(0, INFINITY)
    assert implantation_lower_bound(source, empty).value == 10


@pytest.mark.unit
def test_implantation_without_obstruction():
    source = CertifiedBarcode(0, F(10), (Bar(F(5), F(10)),))
    target = CertifiedBarcode(0, INFINITY, (Bar(F(1), INFINITY),))
    bound = implantation_lower_bound(source, target)
    assert bound.value == 1
    assert bound.attained
    assert bound.to_dict()['witness_s'] is None


@pytest.mark.unit
def test_implantation_needs_matching_degrees():
    source = CertifiedBarcode(1, F(10), (Bar(F(1), F(10)),))
    target = CertifiedBarcode(0, INFINITY)
    with pytest.raises(InvalidArgument):
        implantation_lower_bound(source, target)
    with pytest.raises(InvalidArgument):
        implantation_lower_bound([source, source], [target])


def _orbit(period, cz, index=(1,)):
    return ReebOrbit(OrbitFamily.AXIS, index, 1, period=F(period), cz=cz)


@pytest.mark.unit
def test_barcode_from_orbits():
    bc = barcode_from_orbits([_orbit(1, 3), _orbit(2, 7, (2,)), _orbit(5, 3, (3,))], 3, F(4))
    assert bc.births() == [F(1)]
    assert bc.bars[0].cert_end == 4


@pytest.mark.unit
def test_barcode_from_orbits_hypotheses():
    with pytest.raises(HypothesisViolated):
        barcode_from_orbits([_orbit(1, 3), _orbit(2, 4, (2,))], 3, F(4))
    corner = ReebOrbit(OrbitFamily.CORNER_FAMILY, (1, 2), 1, period_lower_bound=F(3), nondegenerate=False)
    with pytest.raises(HypothesisViolated):
        barcode_from_orbits([corner], 3, F(4))
    assert barcode_from_orbits([corner], 3, F(3)).bars == ()
    flipping = [ReebOrbit(OrbitFamily.AXIS, (1,), 1, period=F(1), cz=3),
                ReebOrbit(OrbitFamily.AXIS, (1,), 2, period=F(2), cz=6)]
    with pytest.raises(HypothesisViolated):
        barcode_from_orbits(flipping, 3, F(4))


@pytest.mark.unit
def test_truncated_barcode(dellu_spec):
    """One bar at eps a in degree k_beta, certified up to P*."""
    assert truncated_window(dellu_spec, -3) == F(34, 133)
    bc = truncated_barcode(dellu_spec)
    assert bc.degree == -3
    assert bc.window_end == F(34, 133)
    assert bc.births() == [F(1, 100)]
    with pytest.raises(HypothesisViolated):
        truncated_barcode(dellu_spec, -3, F(1, 2))


@pytest.mark.unit
def test_truncated_window_stops_at_adjacent_degree(dellu_spec):
    """Degree -6 sits next to the N = 2 centre orbit of index -7."""
    assert truncated_window(dellu_spec, -6) == F(2, 100)


@pytest.mark.unit
def test_sinkhole_barcode():
    spec = SinkholeSpec(1, (F(1, 10), F(1, 3)), default_sinkhole_base(1, 2))
    bc = sinkhole_barcode(spec)
    assert bc.degree == -1
    assert bc.window_end == 1
    assert bc.births() == [F(1, 10), F(1, 3)]


@pytest.mark.unit
def test_ellipsoid_empty_barcode():
    bc = ellipsoid_empty_barcode(2, -3)
    assert bc.bars == ()
    assert bc.window_end == INFINITY
    with pytest.raises(HypothesisViolated):
        ellipsoid_empty_barcode(2, 2)


@st.composite
def source_barcodes(draw):
    window = draw(st.integers(min_value=2, max_value=8))
    bars = []
    for _ in range(draw(st.integers(min_value=1, max_value=4))):
        birth = draw(st.integers(min_value=1, max_value=4 * window - 1))
        end = draw(st.integers(min_value=birth + 1, max_value=4 * window))
        bars.append(Bar(F(birth, 4), F(end, 4)))
    return CertifiedBarcode(0, F(window), tuple(bars))


@st.composite
def target_barcodes(draw):
    """Target bars may stop short of the window; only their births bound the target dimension."""
    window = draw(st.one_of(st.just(INFINITY), st.integers(min_value=2, max_value=8).map(F)))
    top = 32 if window == INFINITY else 4 * int(window) - 1
    bars = []
    for birth in draw(st.lists(st.integers(min_value=1, max_value=top), max_size=4)):
        lasts = draw(st.booleans())
        if lasts:
            end = window
        else:
            end = F(draw(st.integers(min_value=birth + 1, max_value=top + 1)), 4)
        bars.append(Bar(F(birth, 4), end))
    return CertifiedBarcode(0, window, tuple(bars))


def _obstructed_at(source, target, a):
    """Whether some level s has more source bars alive from s to a^2 s than target births up to a s.

    The predicate only changes at the events below, so the events and the midpoints
    between them cover every level.
    """
    b = a * a
    events = set(source.births())
    events.update(x / b for x in [source.window_end] + [bar.cert_end for bar in source.bars])
    events.update(x / a for x in target.births() + [target.window_end] if x != INFINITY)
    events = sorted(events)
    levels = events + [events[0] / 2, events[-1] + 1] + [(lo + hi) / 2 for lo, hi in zip(events, events[1:])]
    for s in levels:
        if b * s > source.window_end or a * s > target.window_end:
            continue
        alive = sum(1 for bar in source.bars if bar.birth < s and b * s <= bar.cert_end)
        born = sum(1 for birth in target.births() if birth <= a * s)
        if alive > born:
            return True
    return False


@pytest.mark.property
@settings(max_examples=150, deadline=None)
@given(source_barcodes(), target_barcodes())
def test_implantation_matches_scale_sweep(source, target):
    """The bound is the threshold where a sweep over scale factors stops finding obstructions."""
    bound = implantation_lower_bound(source, target)
    value = bound.value
    assert bound.attained == (value == 1)

    for k in range(9, 8 * 7):
        a = F(k, 8)
        assert _obstructed_at(source, target, a) == (a * a < value), a

    lo, hi = root_bounds(value, 2, 48)
    assert not _obstructed_at(source, target, hi * (1 + F(1, 2 ** 40)))
    if value > 1:
        assert _obstructed_at(source, target, lo * (1 - F(1, 2 ** 40)))


@pytest.mark.property
@settings(max_examples=100, deadline=None)
@given(source_barcodes(), target_barcodes())
def test_implantation_ignores_target_ends(source, target):
    """Certified target ends are lower bounds only, so stretching them to the window changes nothing."""
    stretched = CertifiedBarcode(0, target.window_end,
                                 tuple(Bar(bar.birth, target.window_end) for bar in target.bars))
    assert implantation_lower_bound(source, target) == implantation_lower_bound(source, stretched)


@pytest.mark.property
@settings(max_examples=100, deadline=None)
@given(source_barcodes(), st.integers(min_value=1, max_value=1000), st.integers(min_value=1, max_value=1000),
       st.integers(min_value=1, max_value=1000))
def test_rank_is_monotone(bc, i, j, k):
    """rank(s, t) only drops as t grows."""
    s, t, u = sorted(bc.window_end * F(x, 1001) for x in (i, j, k))
    try:
        assert rank(bc, s, u) <= rank(bc, s, t) <= dim(bc, s)
    except QueryAtBirth:
        assume(False)
