# src/orbitgauge/commands/spectrum.py
import logging

import click

from .. import config
from ..engine.domains import EllipsoidSpec, SinkholeSpec, TruncatedEllipsoidSpec, render_domain
from ..engine.numeric import render_rational
from ..engine.persistence import (barcode_from_orbits, ellipsoid_empty_barcode, sinkhole_barcode,
                                  truncated_barcode)
from ..engine.reeb import (ORBIT_CSV_FIELDS, corner_period_infimum, ellipsoid_spectrum,
                           ellipsoid_spectrum_by_tubes, sinkhole_spectrum, trunc_orbits, tube_orbits)
from ..error_handlers import HypothesisViolated, InvalidArgument
from .common import RATIONAL, domain_options, emit, load_domain, output_options

logger = logging.getLogger(__name__)

BARCODE_CSV_FIELDS = ['degree', 'birth', 'cert_end']


@click.command('spectrum')
@domain_options
@click.option('--cap', type=RATIONAL, default=config.DEFAULT_PERIOD_CAP, show_default=True,
              help='Largest exact period listed.')
@click.option('--ncap', type=click.IntRange(min=1), default=config.DEFAULT_N_CAP, show_default=True,
              help='Largest multiplicity of corner families.')
@click.option('--method', type=click.Choice(['closed', 'tubes']), default='closed', show_default=True,
              help='Ellipsoids only: closed formula or tube recursion.')
@click.option('--threshold', type=RATIONAL, default=None, help='Sinkholes only: period bound b in (1/2, 1).')
@output_options
def spectrum_command(domain, in_file, cap, ncap, method, threshold, fmt, jobs, out):
    """List closed Reeb orbits with periods and Conley-Zehnder indices."""
    spec = load_domain(domain, in_file)
    if isinstance(spec, EllipsoidSpec):
        orbits = ellipsoid_spectrum(spec, cap) if method == 'closed' else ellipsoid_spectrum_by_tubes(spec, cap)
    elif isinstance(spec, TruncatedEllipsoidSpec):
        orbits = trunc_orbits(spec, cap, ncap)
    elif isinstance(spec, SinkholeSpec):
        if threshold is None:
            raise InvalidArgument("Sinkhole spectra need --threshold")
        orbits = sinkhole_spectrum(spec, threshold)
    else:
        orbits = tube_orbits(spec.base, spec.profile, cap, ncap)

    logger.info(f"spectrum: {len(orbits)} entries")
    payload = {'domain': render_domain(spec), 'orbits': [orbit.to_dict() for orbit in orbits]}
    emit(payload, ORBIT_CSV_FIELDS, [orbit.csv_row() for orbit in orbits], fmt, out)


def _barcode_for(spec, degree, window, ncap):
    if isinstance(spec, TruncatedEllipsoidSpec):
        return truncated_barcode(spec, degree, window)
    if isinstance(spec, SinkholeSpec):
        bc = sinkhole_barcode(spec)
        if degree is not None and degree != bc.degree:
            raise InvalidArgument(f"Sinkhole barcodes are certified in degree {bc.degree} only",
                                  {'degree': degree})
        return bc
    if degree is None:
        raise InvalidArgument("--degree is required for this family")
    if isinstance(spec, EllipsoidSpec):
        if window is None:
            return ellipsoid_empty_barcode(spec.m, degree)
        return barcode_from_orbits(ellipsoid_spectrum(spec, window), degree, window)
    if window is None:
        raise InvalidArgument("--window is required for radial tubes")
    infimum = corner_period_infimum(spec.base, spec.profile)
    if window > infimum.value:
        raise HypothesisViolated("Window reaches corner families",
                                 {'window_end': render_rational(window), 'limit': render_rational(infimum.value)})
    return barcode_from_orbits(tube_orbits(spec.base, spec.profile, window, ncap), degree, window)


@click.command('barcode')
@domain_options
@click.option('--degree', type=int, default=None, help='Grading (truncated: defaults to k_beta).')
@click.option('--window', type=RATIONAL, default=None, help='Window end (default: the certified maximum).')
@click.option('--ncap', type=click.IntRange(min=1), default=config.DEFAULT_N_CAP, show_default=True)
@output_options
def barcode_command(domain, in_file, degree, window, ncap, fmt, jobs, out):
    """Certified barcode in one degree."""
    spec = load_domain(domain, in_file)
    bc = _barcode_for(spec, degree, window, ncap)
    rows = [{'degree': bc.degree, 'birth': render_rational(bar.birth), 'cert_end': render_rational(bar.cert_end)}
            for bar in bc.bars]
    emit({'domain': render_domain(spec), 'barcode': bc.to_dict()}, BARCODE_CSV_FIELDS, rows, fmt, out)
