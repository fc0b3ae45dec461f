# src/orbitgauge/commands/common.py
import logging
from typing import Any, Dict, List, Optional

import click

from .. import config
from ..engine.domains import parse_domain
from ..engine.numeric import parse_rational, to_decimal
from ..error_handlers import InvalidArgument, OrbitGaugeError
from ..utils.files import read_json_source, rows_to_csv, to_json, write_artifact

logger = logging.getLogger(__name__)


class RationalType(click.ParamType):
    """Exact rational given as "p/q", an integer or a decimal string."""
    name = 'rational'

    def convert(self, value, param, ctx):
        try:
            return parse_rational(str(value))
        except OrbitGaugeError as e:
            self.fail(e.message, param, ctx)


class RationalListType(click.ParamType):
    """Comma-separated rationals."""
    name = 'rational-list'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        parts = [part for part in str(value).split(',') if part.strip()]
        if not parts:
            self.fail("Expected at least one value", param, ctx)
        try:
            return tuple(parse_rational(part) for part in parts)
        except OrbitGaugeError as e:
            self.fail(e.message, param, ctx)


class IntListType(click.ParamType):
    name = 'int-list'

    def convert(self, value, param, ctx):
        if isinstance(value, tuple):
            return value
        try:
            return tuple(int(part) for part in str(value).split(',') if part.strip())
        except ValueError:
            self.fail(f"Expected comma-separated integers, got {value!r}", param, ctx)


RATIONAL = RationalType()
RATIONAL_LIST = RationalListType()
INT_LIST = IntListType()


def output_options(func):
    """--format, --jobs and --out, shared by every command."""
    func = click.option('--out', default=None, metavar='FILE',
                        help='Write the artifact to FILE instead of stdout.')(func)
    func = click.option('--jobs', type=click.IntRange(min=1), default=None,
                        help='Sweep width (default: ORBITGAUGE_JOBS or the core count).')(func)
    func = click.option('--format', 'fmt', type=click.Choice(config.OUTPUT_FORMATS), default='json',
                        show_default=True, help='Artifact format.')(func)
    return func


def domain_options(func):
    """--domain JSON and --in FILE; exactly one is required."""
    func = click.option('--in', 'in_file', default=None, metavar='FILE',
                        help='Read the domain descriptor from FILE.')(func)
    func = click.option('--domain', default=None, metavar='JSON', help='Inline domain descriptor.')(func)
    return func


def load_domain(domain: Optional[str], in_file: Optional[str]):
    if (domain is None) == (in_file is None):
        raise InvalidArgument("Pass exactly one of --domain and --in")
    source = domain if domain is not None else f'@{in_file}'
    return parse_domain(read_json_source(source))


def _pretty_cell(value: Any) -> str:
    if isinstance(value, str) and '/' in value:
        try:
            return to_decimal(parse_rational(value), config.DECIMAL_PLACES)
        except OrbitGaugeError:
            return value
    return str(value)


def pretty_table(fields: List[str], rows: List[Dict[str, Any]]) -> str:
    """Aligned text table with rationals shown as fixed decimals."""
    cells = [[_pretty_cell(row.get(name, '')) for name in fields] for row in rows]
    widths = [max([len(name)] + [len(line[i]) for line in cells]) for i, name in enumerate(fields)]
    lines = ['  '.join(name.ljust(width) for name, width in zip(fields, widths)).rstrip()]
    for line in cells:
        lines.append('  '.join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip())
    return '\n'.join(lines) + '\n'


def emit(payload: Dict[str, Any], fields: List[str], rows: List[Dict[str, Any]], fmt: str,
         out: Optional[str] = None):
    """Render a result in the requested format and write it."""
    if fmt == 'json':
        text = to_json(payload)
    elif fmt == 'csv':
        text = rows_to_csv(fields, rows)
    else:
        text = pretty_table(fields, rows)
    write_artifact(text, out)
