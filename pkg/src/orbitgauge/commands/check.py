# src/orbitgauge/commands/check.py
import logging

import click

from ..engine.bounds import BoundCertificate, consistency_check, replay, verify
from ..error_handlers import InvalidArgument, OrbitGaugeError
from ..utils.files import read_json_source
from .common import emit, output_options

logger = logging.getLogger(__name__)

CHECK_CSV_FIELDS = ['kind', 'quantity', 'from', 'to', 'lower', 'upper', 'message']


def load_certificates(source):
    """Certificates from a JSON list, or from any artifact with a "certificates" list."""
    data = read_json_source(source)
    if isinstance(data, dict):
        data = data['certificates'] if 'certificates' in data else [data]
    if not isinstance(data, list):
        raise InvalidArgument("Expected a certificate list")
    return [BoundCertificate.from_dict(item) for item in data]


def _replays(cert):
    try:
        return replay(cert)
    except OrbitGaugeError as e:
        logger.warning(f"Replay of a {cert.provenance.rule} certificate failed: {e.message}")
        return False


def _entry(index, cert, recompute):
    entry = {'index': index, 'rule': cert.provenance.rule, 'verified': verify(cert)}
    if recompute:
        entry['replayed'] = _replays(cert)
    return entry


@click.command('check')
@click.option('--in', 'in_file', required=True, metavar='FILE', help='Certificate file or report artifact.')
@click.option('--replay', 'recompute', is_flag=True, default=False,
              help='Also rebuild every certificate from its rule and inputs.')
@output_options
def check_command(in_file, recompute, fmt, jobs, out):
    """Verify every stored certificate and cross-check the set.

    Without --replay nothing is recomputed: digests, seals and the claims fixed
    by each rule's inputs are checked as stored. With --replay a certificate
    passes when rebuilding it reproduces its claim.
    """
    certs = load_certificates(f'@{in_file}')
    entries = [_entry(i, cert, recompute) for i, cert in enumerate(certs)]
    verdicts = consistency_check(certs)
    passed = [entry['replayed'] if recompute else entry['verified'] for entry in entries]
    ok = all(passed) and not any(v.kind == 'violation' for v in verdicts)

    payload = {'ok': ok, 'certificates': entries, 'verdicts': [v.to_dict() for v in verdicts]}
    emit(payload, CHECK_CSV_FIELDS, [v.to_dict() for v in verdicts], fmt, out)
    if not ok:
        logger.warning(f"check failed on {in_file}")
        click.get_current_context().exit(1)
