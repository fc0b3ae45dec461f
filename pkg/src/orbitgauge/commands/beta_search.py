# src/orbitgauge/commands/beta_search.py
import click

from ..engine.diophantine import certify_beta, dirichlet_tuple
from ..engine.domains import EllipsoidSpec
from ..engine.numeric import render_rational
from .common import RATIONAL, RATIONAL_LIST, emit, output_options

WITNESS_CSV_FIELDS = ['p', 'lo', 'hi', 'quality', 'beta']


@click.command('beta-search')
@click.option('--a', 'capacities', type=RATIONAL_LIST, required=True, help='Capacities a_1,...,a_{n+1}.')
@click.option('--min-pn', type=click.IntRange(min=1), required=True, help='Smallest p_n tried.')
@click.option('--ceiling', type=click.IntRange(min=1), default=None, help='Largest p_n tried (n >= 2).')
@click.option('--beta', type=RATIONAL, default=None, help='Also certify this beta against the window.')
@output_options
def beta_search_command(capacities, min_pn, ceiling, beta, fmt, jobs, out):
    """Find a Dirichlet tuple and its certified beta window."""
    base = EllipsoidSpec(capacities)
    witness = dirichlet_tuple(base, min_pn, ceiling)
    payload = {'witness': witness.to_dict()}
    if beta is not None:
        payload['certificate'] = certify_beta(base, beta, witness).to_dict()
    row = {
        'p': ';'.join(str(p) for p in witness.p),
        'lo': render_rational(witness.lo),
        'hi': render_rational(witness.hi),
        'quality': render_rational(witness.quality),
        'beta': '' if beta is None else render_rational(beta),
    }
    emit(payload, WITNESS_CSV_FIELDS, [row], fmt, out)
