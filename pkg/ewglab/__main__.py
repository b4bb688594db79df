"""Command line entry point.

Exit status: 0 if every check passed, 1 if a check failed or a scenario
raised, 2 if the scenario document or an override is invalid.
"""
import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .config import ScenarioConfig, apply_overrides, load_config, parse_tolerance
from .errors import ConfigError
from .harness import Harness

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='ewglab',
        description='Run numerical checks of relative states, the spin measurement model, '
                    'the x³p operator and relativistic position, and write CSV/SVG reports.',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='logging level (default: WARNING)')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='run the scenarios of a TOML document')
    run.add_argument('config', help='path of the scenario document')
    check = commands.add_parser('check', help='run every scenario with the built-in defaults')
    for sub in (run, check):
        sub.add_argument('--out', default=None, help='output directory, overrides $EWGLAB_OUT')
        sub.add_argument('--seed', type=int, default=None, help='seed of every random draw (u64)')
        sub.add_argument('--tol', action='append', default=[], metavar='NAME=VALUE',
                         help='override a tolerance: exact, quadrature or weight (repeatable)')
        sub.add_argument('--no-plots', action='store_true', help='do not write SVG plots')
        sub.add_argument('--workers', type=int, default=4, help='scenarios run in parallel (default: 4)')
    return parser


def _configure(args: argparse.Namespace) -> ScenarioConfig:
    config = load_config(args.config) if args.command == 'run' else ScenarioConfig()
    tolerances = dict(parse_tolerance(t) for t in args.tol)
    return apply_overrides(config, output_dir=args.out, seed=args.seed, tolerances=tolerances)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format='%(levelname)s %(name)s: %(message)s')
    try:
        config = _configure(args)
    except ConfigError as e:
        print(f'ewglab: {e}', file=sys.stderr)
        return EXIT_CONFIG
    if args.workers < 1:
        print('ewglab: --workers must be a positive integer', file=sys.stderr)
        return EXIT_CONFIG
    harness = Harness(config, max_workers=args.workers)
    if args.no_plots:
        harness.write_plots = False
    report = harness.run()
    print(report.summary())
    print(f'output written to {harness.output_dir}')
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
