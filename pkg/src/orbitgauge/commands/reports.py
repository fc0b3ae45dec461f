# src/orbitgauge/commands/reports.py
import logging

import click

from .. import config
from ..engine.reports import (CERTIFICATE_CSV_FIELDS, DEFAULT_SINKHOLE_GRID, ELLDIST_CSV_FIELDS,
                              QUASIEMBED_CSV_FIELDS, SINKHOLE_GRID_FIELDS, elldist_report, quasiembed_verify,
                              sinkhole_grid_report, v34_report)
from ..engine.numeric import as_rational
from ..error_handlers import InvalidArgument, OrbitGaugeError
from ..utils.files import read_json_source
from ..utils.system import resolve_jobs
from .common import INT_LIST, RATIONAL, RATIONAL_LIST, emit, output_options

logger = logging.getLogger(__name__)


@click.command('v34')
@click.option('--n', 'n', type=click.IntRange(min=1), required=True, help='Half dimension minus one.')
@click.option('--eps', type=RATIONAL, required=True, help='Truncation depth.')
@output_options
def v34_command(n, eps, fmt, jobs, out):
    """Double-knot report: lower delta_f both ways, composed d_c upper bound."""
    report = v34_report(n, eps)
    emit(report.to_dict(), CERTIFICATE_CSV_FIELDS, report.rows(), fmt, out)


@click.command('elldist')
@click.option('--a', 'capacities', type=RATIONAL_LIST, default='1,1', show_default=True,
              help='Base ellipsoid capacities.')
@click.option('--r', 'r_values', type=INT_LIST, default=','.join(str(r) for r in config.ELLDIST_R_VALUES),
              show_default=True, help='Window indices, one row each.')
@click.option('--eps-factor', type=RATIONAL, default=config.ELLDIST_EPS_FACTOR, show_default=True,
              help='eps = factor / beta^2.')
@output_options
def elldist_command(capacities, r_values, eps_factor, fmt, jobs, out):
    """Lower bounds against all ellipsoids along certified beta windows."""
    report = elldist_report(r_values, capacities, eps_factor, resolve_jobs(jobs))
    emit(report.to_dict(), ELLDIST_CSV_FIELDS, report.rows(), fmt, out)


@click.command('quasiembed')
@click.option('--x', 'x', type=RATIONAL_LIST, required=True, help='Descending nonnegative point.')
@click.option('--y', 'y', type=RATIONAL_LIST, required=True, help='Descending nonnegative point.')
@click.option('--surrogate', default=None, metavar='JSON',
              help='Table {"x": ["value", "error"]} for 1/2 e^-x (inline or @file).')
@click.option('--n', 'n', type=click.IntRange(min=1), default=1, show_default=True)
@output_options
def quasiembed_command(x, y, surrogate, n, fmt, jobs, out):
    """Check the log-sandwich between sup-distance and d_f on two points."""
    table = read_json_source(surrogate) if surrogate else None
    report = quasiembed_verify(x, y, table, n)
    emit(report.to_dict(), QUASIEMBED_CSV_FIELDS, report.rows(), fmt, out)
    if not report.holds:
        click.get_current_context().exit(1)


def _parse_grid(source):
    grid = read_json_source(source)
    if not isinstance(grid, list) or not grid:
        raise InvalidArgument("Grid must be a nonempty list of depth vectors")
    try:
        return [tuple(as_rational(v) for v in depths) for depths in grid]
    except (TypeError, OrbitGaugeError):
        raise InvalidArgument("Grid entries must be lists of rational strings")


@click.command('sinkhole-grid')
@click.option('--grid', default=None, metavar='JSON', help='List of depth vectors (inline or @file).')
@click.option('--n', 'n', type=click.IntRange(min=1), default=1, show_default=True)
@output_options
def sinkhole_grid_command(grid, n, fmt, jobs, out):
    """Sinkhole lower/upper bounds on every ordered pair of a depth grid."""
    depths = _parse_grid(grid) if grid else DEFAULT_SINKHOLE_GRID
    report = sinkhole_grid_report(depths, n, resolve_jobs(jobs))
    emit(report.to_dict(), SINKHOLE_GRID_FIELDS, report.rows(), fmt, out)
    if not report.consistent:
        click.get_current_context().exit(1)
