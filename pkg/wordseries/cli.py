import argparse
from typing import Optional, Sequence

from wordseries.core.commands import cmd_average, cmd_coeffs, cmd_validate, cmd_verify, configure_logging
from wordseries.core.utils.constants import COEFFICIENT_KINDS, SUITES

commands = {
    'validate': cmd_validate,
    'coeffs': cmd_coeffs,
    'verify': cmd_verify,
    'average': cmd_average,
}

GLOBAL_OPTIONS = ('command', 'path', 'log_level')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wordseries',
        description='Word-series coefficients, averaging and normal forms of perturbed problems.',
    )
    parser.add_argument('--log-level', help='Level of the wordseries logger (overrides WORDSERIES_LOG_LEVEL).')
    subparsers = parser.add_subparsers(dest='command', required=True)

    validate = subparsers.add_parser('validate', help='Parse a problem file and check its hypotheses.')
    validate.add_argument('path')

    coeffs = subparsers.add_parser('coeffs', help='Write a coefficient table.')
    coeffs.add_argument('path')
    coeffs.add_argument('--what', required=True, choices=COEFFICIENT_KINDS)
    coeffs.add_argument('--t', type=float)
    coeffs.add_argument('--t0', type=float)
    coeffs.add_argument('--theta', help='Comma-separated angles.')
    coeffs.add_argument('--u', help='Comma-separated shift vector.')
    coeffs.add_argument('--order', type=int)
    coeffs.add_argument('--out')
    coeffs.add_argument('--format', choices=('csv', 'json'))

    verify = subparsers.add_parser('verify', help='Run a verification suite.')
    verify.add_argument('path')
    verify.add_argument('--suite', required=True, choices=SUITES)
    verify.add_argument('--order', type=int)
    verify.add_argument('--seed', type=int)
    verify.add_argument('--samples', type=int)
    verify.add_argument('--eps', help='Comma-separated eps sweep of the scaling suite.')

    average = subparsers.add_parser('average', help='Write the averaged trajectory next to the direct solution.')
    average.add_argument('path')
    average.add_argument('--eps', type=float)
    average.add_argument('--t-end', type=float)
    average.add_argument('--order', type=int)
    average.add_argument('--x0', help='Comma-separated initial point.')
    average.add_argument('--samples', type=int)
    average.add_argument('--out')
    average.add_argument('--format', choices=('csv', 'json'))

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    '''Parses argv, configures logging and dispatches to the command; returns its exit code.'''
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    options = {
        name: value
        for name, value in vars(args).items()
        if name not in GLOBAL_OPTIONS and value is not None
    }

    return commands[args.command](args.path, options)
