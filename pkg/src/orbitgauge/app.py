# src/orbitgauge/app.py
import sys
import logging

import click

from . import __version__, config
from .error_handlers import register_error_handlers

# Import command modules
from .commands.spectrum import spectrum_command, barcode_command
from .commands.beta_search import beta_search_command
from .commands.bound import bound_command
from .commands.reports import v34_command, elldist_command, quasiembed_command, sinkhole_grid_command
from .commands.check import check_command

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']

logger = logging.getLogger(__name__)


def create_cli():
    """Create and configure the click command group."""
    @click.group(name='orbitgauge', no_args_is_help=False)
    @click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
                  help='Logging threshold (default: ORBITGAUGE_LOG_LEVEL or WARNING).')
    @click.version_option(__version__, prog_name='orbitgauge')
    def cli(log_level):
        """Certified Reeb orbits, barcodes and distance bounds in exact arithmetic."""
        setup_logging(log_level or config.LOG_LEVEL, config.LOG_FILE)

    # Register error handlers
    register_error_handlers(cli)

    # Register commands
    register_commands(cli)

    return cli


def setup_logging(level, log_file=None):
    """Configure logging on stderr and an optional file; stdout carries artifacts only."""
    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, '_orbitgauge', False):
            root_logger.removeHandler(handler)
            handler.close()

    formatter = logging.Formatter(config.LOG_FORMAT)
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    for handler in handlers:
        handler.setFormatter(formatter)
        handler._orbitgauge = True
        root_logger.addHandler(handler)

    root_logger.setLevel(getattr(logging, str(level).upper(), logging.WARNING))


def register_commands(cli):
    """Register all subcommands."""
    cli.add_command(spectrum_command)
    cli.add_command(barcode_command)
    cli.add_command(beta_search_command)
    cli.add_command(bound_command)
    cli.add_command(v34_command)
    cli.add_command(elldist_command)
    cli.add_command(quasiembed_command)
    cli.add_command(sinkhole_grid_command)
    cli.add_command(check_command)


def main():
    cli = create_cli()
    cli(prog_name='orbitgauge')


if __name__ == '__main__':
    main()
