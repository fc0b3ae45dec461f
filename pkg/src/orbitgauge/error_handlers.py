# src/orbitgauge/error_handlers.py
import json
import logging

import click

logger = logging.getLogger(__name__)


# Error Codes
class ErrorCode:
    # General / validation errors (1000-1999)
    UNKNOWN_ERROR = 1000
    INVALID_ARGUMENT = 1001
    INVALID_PARAMETER = 1002
    OUTSIDE_WINDOW = 1003
    CHAIN_MISMATCH = 1004
    QUERY_AT_BIRTH = 1005

    # Degeneracy errors (2000-2999)
    DEGENERATE_INPUT = 2000
    DEGENERATE_ORBIT = 2001

    # Hypothesis errors (3000-3999)
    HYPOTHESIS_VIOLATED = 3000
    BETA_NOT_CERTIFIED = 3001
    DOUBLE_KNOT_HYPOTHESIS_FAILED = 3002

    # Search errors (4000-4999)
    SEARCH_EXHAUSTED = 4000

    # Engine self-checks (9000)
    INTERNAL_ERROR = 9000


# Map error codes to process exit statuses
ERROR_TO_EXIT_STATUS = {
    ErrorCode.UNKNOWN_ERROR: 1,
    ErrorCode.INVALID_ARGUMENT: 2,
    ErrorCode.INVALID_PARAMETER: 2,
    ErrorCode.OUTSIDE_WINDOW: 2,
    ErrorCode.CHAIN_MISMATCH: 2,
    ErrorCode.QUERY_AT_BIRTH: 2,

    ErrorCode.DEGENERATE_INPUT: 1,
    ErrorCode.DEGENERATE_ORBIT: 1,

    ErrorCode.HYPOTHESIS_VIOLATED: 1,
    ErrorCode.BETA_NOT_CERTIFIED: 1,
    ErrorCode.DOUBLE_KNOT_HYPOTHESIS_FAILED: 1,

    ErrorCode.SEARCH_EXHAUSTED: 1,
    ErrorCode.INTERNAL_ERROR: 1,
}


class OrbitGaugeError(Exception):
    """Base exception for engine and CLI errors."""
    error_code = ErrorCode.UNKNOWN_ERROR

    def __init__(self, message, details=None, error_code=None):
        if error_code is not None:
            self.error_code = error_code
        self.message = message
        self.details = details
        super().__init__(self.message)

    @property
    def name(self):
        return type(self).__name__


class InvalidArgument(OrbitGaugeError):
    error_code = ErrorCode.INVALID_ARGUMENT


class InvalidParameter(OrbitGaugeError):
    """A domain descriptor violates a family invariant; details carry the field path."""
    error_code = ErrorCode.INVALID_PARAMETER


class OutsideWindow(OrbitGaugeError):
    error_code = ErrorCode.OUTSIDE_WINDOW


class ChainMismatch(OrbitGaugeError):
    error_code = ErrorCode.CHAIN_MISMATCH


class QueryAtBirth(OrbitGaugeError):
    """A rank query landed exactly on a bar birth."""
    error_code = ErrorCode.QUERY_AT_BIRTH


class DegenerateInput(OrbitGaugeError):
    error_code = ErrorCode.DEGENERATE_INPUT


class DegenerateOrbit(OrbitGaugeError):
    error_code = ErrorCode.DEGENERATE_ORBIT


class HypothesisViolated(OrbitGaugeError):
    error_code = ErrorCode.HYPOTHESIS_VIOLATED


class BetaNotCertified(OrbitGaugeError):
    error_code = ErrorCode.BETA_NOT_CERTIFIED


class DoubleKnotHypothesisFailed(OrbitGaugeError):
    error_code = ErrorCode.DOUBLE_KNOT_HYPOTHESIS_FAILED


class SearchExhausted(OrbitGaugeError):
    error_code = ErrorCode.SEARCH_EXHAUSTED


class InternalError(OrbitGaugeError):
    """An engine self-check failed (pipeline and closed form disagree)."""
    error_code = ErrorCode.INTERNAL_ERROR


def create_error_response(error_code, message, details=None, name=None):
    """Create a standardized error response."""
    response = {
        'status': 'error',
        'error': {
            'code': error_code,
            'name': name or 'OrbitGaugeError',
            'message': message
        }
    }

    if details:
        response['error']['details'] = details

    return response


def handle_error(error):
    """Write the JSON form of an engine error to stderr and return the exit status.

    The JSON line is the only stderr output at the default log level.
    """
    status = ERROR_TO_EXIT_STATUS.get(error.error_code, 1)
    logger.debug(f"{error.name} {error.error_code}: {error.message}")
    response = create_error_response(error.error_code, error.message, error.details, error.name)
    click.echo(json.dumps(response, sort_keys=True, default=str), err=True)
    return status


def register_error_handlers(cli):
    """Wrap the click group so every command, the group itself included, reports errors as JSON."""
    original_invoke = cli.invoke
    original_make_context = cli.make_context

    def make_context(*args, **kwargs):
        # Group options are parsed here, before invoke runs
        try:
            return original_make_context(*args, **kwargs)
        except click.UsageError as error:
            wrapped = InvalidArgument(error.format_message(), {'usage': True})
            raise click.exceptions.Exit(handle_error(wrapped))

    def invoke(ctx):
        try:
            return original_invoke(ctx)
        except OrbitGaugeError as error:
            ctx.exit(handle_error(error))
        except click.UsageError as error:
            wrapped = InvalidArgument(error.format_message(), {'usage': True})
            ctx.exit(handle_error(wrapped))
        except (click.exceptions.Exit, click.Abort):
            raise
        except Exception as error:
            logger.debug(f"Unhandled exception: {error}", exc_info=True)
            wrapped = OrbitGaugeError("An unexpected error occurred", {'type': type(error).__name__})
            ctx.exit(handle_error(wrapped))

    cli.invoke = invoke
    cli.make_context = make_context
    return cli
