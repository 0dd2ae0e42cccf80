import logging
import logging.config
import sys
from contextlib import contextmanager
from typing import Optional

from pydantic import ValidationError

from wordseries import settings
from wordseries.core.utils.constants import (
    EXIT_HYPOTHESIS,
    EXIT_OK,
    EXIT_PARSE_ERROR,
    EXIT_RESONANCE,
    EXIT_VERIFY_FAILED,
)
from wordseries.core.utils.exceptions import (
    DimensionMismatch,
    HypothesisViolation,
    ProblemFileError,
    ResonanceError,
    UnsupportedGenerator,
)
from wordseries.core.utils.serializers import AverageParams, CoeffsParams, VerifyParams
from wordseries.core.utils.utils import average, compute_coefficients, load_problem, run_suite
from wordseries.core.utils.writers import write_table, write_trajectory

logger = logging.getLogger(__name__)


def configure_logging(level: Optional[str] = None):
    '''Applies settings.LOGGING, optionally overriding the level of the wordseries logger.'''
    logging.config.dictConfig(settings.LOGGING)
    if level:
        logging.getLogger('wordseries').setLevel(level.upper())


def _error(message: str, code: int) -> int:
    sys.stderr.write(f'error: {message}\n')
    return code


@contextmanager
def _output(path: Optional[str]):
    if path is None:
        yield sys.stdout
        return

    with open(path, 'w', encoding='utf-8', newline='') as stream:
        yield stream


def _emit(document: str):
    sys.stdout.write(document + '\n')


def cmd_validate(path: str, options: Optional[dict] = None) -> int:
    '''
    Parses a problem file and runs its hypotheses and the resonance screen.

    Args:
        path (str): Problem file.
        options (dict): Unused; accepted for a uniform command signature.

    Returns:
        int: 0 when the problem is valid, 2 on parse errors, 3 on a violated
            hypothesis, 4 on resonance.
    '''
    try:
        _, _, report = load_problem(path)
    except ValidationError as document_error:
        return _error(str(document_error), EXIT_PARSE_ERROR)
    except ProblemFileError as file_error:
        return _error(str(file_error), EXIT_PARSE_ERROR)
    except HypothesisViolation as hypothesis_error:
        return _error(str(hypothesis_error), EXIT_HYPOTHESIS)
    except ResonanceError as resonance_error:
        return _error(str(resonance_error), EXIT_RESONANCE)
    except Exception:
        logger.exception('unexpected error while validating %s', path)
        return _error('Unexpected error while validating the problem file.', EXIT_VERIFY_FAILED)

    _emit(report.model_dump_json(indent=2))
    return EXIT_OK


def cmd_coeffs(path: str, options: Optional[dict] = None) -> int:
    '''
    Writes a coefficient table (alpha, alphabar, betabar, kappa, gamma-u or rho)
    as CSV or JSON, to --out or stdout.
    '''
    try:
        params = CoeffsParams(**(options or {}))
    except ValidationError as options_error:
        return _error(str(options_error), EXIT_PARSE_ERROR)

    try:
        spec, defaults, _ = load_problem(path)
        table = compute_coefficients(spec, defaults, params)
    except (ValidationError, ProblemFileError) as parse_error:
        return _error(str(parse_error), EXIT_PARSE_ERROR)
    except (ValueError, DimensionMismatch) as options_error:
        return _error(str(options_error), EXIT_PARSE_ERROR)
    except HypothesisViolation as hypothesis_error:
        return _error(str(hypothesis_error), EXIT_HYPOTHESIS)
    except ResonanceError as resonance_error:
        return _error(str(resonance_error), EXIT_RESONANCE)
    except Exception:
        logger.exception('unexpected error while computing %s', params.what)
        return _error('Unexpected error while computing coefficients.', EXIT_VERIFY_FAILED)

    with _output(params.out) as stream:
        write_table(table, stream, params.format)

    logger.info('wrote %s: %d words', params.what, len(table))
    return EXIT_OK


def cmd_verify(path: str, options: Optional[dict] = None) -> int:
    '''
    Runs a verification suite and prints its report as JSON.

    Returns:
        int: 0 when every identity holds, 1 on any violation, 2/3/4 when the
            problem cannot be loaded.
    '''
    try:
        params = VerifyParams(**(options or {}))
    except ValidationError as options_error:
        return _error(str(options_error), EXIT_PARSE_ERROR)

    try:
        spec, defaults, _ = load_problem(path)
        report = run_suite(spec, defaults, params)
    except (ValidationError, ProblemFileError) as parse_error:
        return _error(str(parse_error), EXIT_PARSE_ERROR)
    except (ValueError, DimensionMismatch, UnsupportedGenerator) as options_error:
        return _error(str(options_error), EXIT_PARSE_ERROR)
    except HypothesisViolation as hypothesis_error:
        return _error(str(hypothesis_error), EXIT_HYPOTHESIS)
    except ResonanceError as resonance_error:
        return _error(str(resonance_error), EXIT_RESONANCE)
    except Exception:
        logger.exception('unexpected error while running suite %s', params.suite)
        return _error(f'Unexpected error while running suite {params.suite}.', EXIT_VERIFY_FAILED)

    _emit(report.model_dump_json(indent=2))

    if not report.passed:
        logger.warning('suite %s failed', params.suite)
        return EXIT_VERIFY_FAILED

    return EXIT_OK


def cmd_average(path: str, options: Optional[dict] = None) -> int:
    '''Writes the averaged trajectory, the direct reference and the pointwise error.'''
    try:
        params = AverageParams(**(options or {}))
    except ValidationError as options_error:
        return _error(str(options_error), EXIT_PARSE_ERROR)

    try:
        spec, defaults, _ = load_problem(path)
        result = average(spec, defaults, params)
    except (ValidationError, ProblemFileError) as parse_error:
        return _error(str(parse_error), EXIT_PARSE_ERROR)
    except (ValueError, DimensionMismatch) as options_error:
        return _error(str(options_error), EXIT_PARSE_ERROR)
    except HypothesisViolation as hypothesis_error:
        return _error(str(hypothesis_error), EXIT_HYPOTHESIS)
    except ResonanceError as resonance_error:
        return _error(str(resonance_error), EXIT_RESONANCE)
    except Exception:
        logger.exception('unexpected error while averaging %s', path)
        return _error('Unexpected error while computing the averaged trajectory.', EXIT_VERIFY_FAILED)

    with _output(params.out) as stream:
        write_trajectory(result.times, result.averaged, result.reference, stream, params.format)

    logger.info('averaged trajectory: %d samples, max error %.3e', result.times.size, result.errors.max())
    return EXIT_OK
