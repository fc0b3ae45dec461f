import json
import logging
from fractions import Fraction

import pytest
from click.testing import CliRunner

from ..app import create_cli
from ..engine.diophantine import dirichlet_tuple
from ..engine.domains import EllipsoidSpec, TruncatedEllipsoidSpec
from ..services.cache import cache_service
from ..services.job_queue import job_queue


@pytest.fixture
def cli():
    """A freshly built command group."""
    return create_cli()


@pytest.fixture
def runner():
    """A CLI runner with stdout and stderr kept apart."""
    return CliRunner()


@pytest.fixture
def invoke(cli, runner):
    """Run the CLI with a list of arguments."""
    def _invoke(*args):
        return runner.invoke(cli, [str(arg) for arg in args])
    return _invoke


def error_payload(result):
    """The single JSON error document on stderr, wherever log lines put it."""
    documents = []
    for line in result.stderr.splitlines():
        try:
            document = json.loads(line)
        except ValueError:
            continue
        if isinstance(document, dict) and document.get('status') == 'error':
            documents.append(document)
    assert len(documents) == 1, result.stderr
    return documents[0]


@pytest.fixture(autouse=True)
def clean_services():
    """Each test starts with an empty cache and leaves no workers or CLI log handlers behind."""
    cache_service.clear()
    cache_service.enabled = True
    yield
    job_queue.stop()
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_orbitgauge', False):
            root.removeHandler(handler)


@pytest.fixture
def disk_base():
    """The (1,1) base ellipsoid, i.e. the ball rescaled to capacity 1."""
    return EllipsoidSpec((Fraction(1), Fraction(1)))


@pytest.fixture
def dellu_spec(disk_base):
    """The worked truncated example: eps = 1/100, beta = 299/100."""
    return TruncatedEllipsoidSpec(disk_base, Fraction(1, 100), Fraction(299, 100))


@pytest.fixture
def dellu_witness(disk_base):
    """Window (26/9, 3) around beta = 299/100."""
    return dirichlet_tuple(disk_base, 3)
