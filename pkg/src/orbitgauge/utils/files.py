# src/orbitgauge/utils/files.py
import io
import os
import csv
import json
import logging
from typing import Any, Dict, Iterable, List, Optional

import click

from ..error_handlers import InvalidArgument

logger = logging.getLogger(__name__)


def to_json(obj: Any, compact: bool = False) -> str:
    """Canonical JSON: sorted keys, indent 2 for artifacts or compact separators for digests."""
    if compact:
        return json.dumps(obj, sort_keys=True, separators=(',', ':'))
    return json.dumps(obj, sort_keys=True, indent=2) + '\n'


def rows_to_csv(fieldnames: List[str], rows: Iterable[Dict[str, Any]]) -> str:
    """Render rows as CSV with a header line and '\\n' line ends."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator='\n')
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def read_json_source(source: str) -> Any:
    """Decode inline JSON, "@path" or a path to an existing file.

    Raises:
        InvalidArgument: the file is unreadable or the text is not JSON
    """
    path = None
    if source.startswith('@'):
        path = source[1:]
    elif not source.lstrip().startswith(('{', '[', '"')) and os.path.isfile(source):
        path = source

    if path is not None:
        try:
            with open(path, 'r') as f:
                text = f.read()
        except OSError as e:
            raise InvalidArgument(f"Cannot read {path}: {e.strerror}", {'path': path})
    else:
        text = source

    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidArgument(f"Invalid JSON input: {e.msg}", {'line': e.lineno, 'column': e.colno})


def write_artifact(text: str, out: Optional[str] = None):
    """Write an artifact to stdout, or to the --out file."""
    if out is None or out == '-':
        click.echo(text, nl=False)
        return
    try:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out, 'w', newline='') as f:
            f.write(text)
    except OSError as e:
        raise InvalidArgument(f"Cannot write {out}: {e.strerror}", {'path': out})
    logger.info(f"Wrote {len(text)} bytes to {out}")
