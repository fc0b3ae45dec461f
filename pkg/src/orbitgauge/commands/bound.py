# src/orbitgauge/commands/bound.py
import logging

import click

from ..engine.bounds import (Quantity, lower_sinkhole_pair, lower_trunc_vs_all_ellipsoids, manual_inclusion,
                             upper_sinkhole_pair, upper_trunc_vs_ellipsoid)
from ..engine.diophantine import DirichletWitness, dirichlet_tuple
from ..engine.domains import TruncatedEllipsoidSpec
from ..engine.numeric import ceil_int
from ..engine.reports import CERTIFICATE_CSV_FIELDS, certificate_row
from ..error_handlers import InvalidArgument
from ..utils.files import read_json_source
from .common import RATIONAL, RATIONAL_LIST, domain_options, emit, load_domain, output_options

logger = logging.getLogger(__name__)

RULE_CHOICES = ['coarsecvg', 'dellu', 'uppersink', 'quasicor', 'manual-inclusion']


def _require(value, option, rule):
    if value is None:
        raise InvalidArgument(f"--rule {rule} needs {option}")
    return value


def _dellu(domain, in_file, witness, min_pn):
    spec = load_domain(domain, in_file)
    if not isinstance(spec, TruncatedEllipsoidSpec):
        raise InvalidArgument("--rule dellu needs a truncated domain")
    if witness is not None:
        found = DirichletWitness.from_dict(read_json_source(witness))
    else:
        # ceil(beta) is the first candidate window end on the diagonal a_1 = ... = a_{n+1}
        found = dirichlet_tuple(spec.base, min_pn or max(1, ceil_int(spec.beta)))
    return lower_trunc_vs_all_ellipsoids(spec, found)


@click.command('bound')
@click.option('--rule', type=click.Choice(RULE_CHOICES), required=True, help='Certificate rule.')
@click.option('--beta', type=RATIONAL, default=None, help='coarsecvg: truncation slope.')
@domain_options
@click.option('--witness', default=None, metavar='JSON', help='dellu: Dirichlet witness (inline or @file).')
@click.option('--min-pn', type=click.IntRange(min=1), default=None, help='dellu: witness search start.')
@click.option('--eps', type=RATIONAL_LIST, default=None, help='uppersink/quasicor: first depth vector.')
@click.option('--zeta', type=RATIONAL_LIST, default=None, help='uppersink/quasicor: second depth vector.')
@click.option('--n', 'n', type=click.IntRange(min=1), default=1, show_default=True, help='quasicor: half dimension.')
@click.option('--quantity', type=click.Choice([q.value for q in Quantity]), default=None,
              help='manual-inclusion: bounded quantity.')
@click.option('--from', 'from_domain', default=None, help='Source domain identifier.')
@click.option('--to', 'to_domain', default=None, help='Target domain identifier.')
@click.option('--value', type=RATIONAL, default=None, help='manual-inclusion: declared upper bound.')
@click.option('--note', default='', help='manual-inclusion: free text stored with the inputs.')
@output_options
def bound_command(rule, beta, domain, in_file, witness, min_pn, eps, zeta, n, quantity, from_domain, to_domain,
                  value, note, fmt, jobs, out):
    """Produce a single distance-bound certificate."""
    if rule == 'coarsecvg':
        cert = upper_trunc_vs_ellipsoid(_require(beta, '--beta', rule), from_domain, to_domain)
    elif rule == 'dellu':
        cert = _dellu(domain, in_file, witness, min_pn)
    elif rule == 'uppersink':
        cert = upper_sinkhole_pair(_require(eps, '--eps', rule), _require(zeta, '--zeta', rule))
    elif rule == 'quasicor':
        cert = lower_sinkhole_pair(_require(eps, '--eps', rule), _require(zeta, '--zeta', rule), n)
    else:
        cert = manual_inclusion(Quantity(_require(quantity, '--quantity', rule)),
                                _require(from_domain, '--from', rule), _require(to_domain, '--to', rule),
                                _require(value, '--value', rule), note)
    logger.info(f"{rule}: {cert.quantity.value} {cert.direction.value} {cert.value}")
    emit(cert.to_dict(), CERTIFICATE_CSV_FIELDS, [certificate_row(cert)], fmt, out)
