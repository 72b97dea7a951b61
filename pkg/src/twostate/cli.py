"""
Module that contains the command line app.

Why does this file exist, and why not put this in __main__?

  Importing __main__ later would execute the code twice: once as the
  script run by `python -m twostate` and once as the module
  ``twostate.__main__``, which is not yet in ``sys.modules``.

Subcommands:

* abl: ad-hoc ABL query for given pre, post and measurement specs,
* scenario: one of the built-in scenarios with --param overrides,
* sweep: Sharp-Shanks quantities on an angle grid (csv by default),
* simulate: single or paired world Monte Carlo.

Exit codes are 0 on success, 2 for invalid input and 1 for numerical
errors such as a vanishing ABL denominator.
"""

import argparse
import logging
import math
import sys

import numpy as np

from twostate.counterfactual import CONDITION_TOLERANCE
from twostate.hilbert import AXES
from twostate.hilbert import BlochDirection
from twostate.hilbert import SpectralMeasurement
from twostate.hilbert import StateVector
from twostate.hilbert import axis
from twostate.hilbert import basis_state
from twostate.hilbert import box_measurement
from twostate.hilbert import computational_measurement
from twostate.hilbert import spin_measurement
from twostate.hilbert import spin_state
from twostate.montecarlo import COMMON_RANDOM_NUMBERS
from twostate.montecarlo import COUPLINGS
from twostate.scenarios import ScenarioSpec
from twostate.scenarios import abl_report
from twostate.scenarios import available_scenarios
from twostate.scenarios import run_scenario
from twostate.scenarios import sharp_shanks_sweep
from twostate.scenarios import simulation_report
from twostate.utils import FORMATS
from twostate.utils import _configure_logging
from twostate.utils import emit_report
from twostate.version import version

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INVALID = 2

_LOGGER = logging.getLogger('twostate.cli')


def parse_number(text):
    """Parses a real number that may contain pi, e.g. '3*pi/4' or '-pi'."""
    cleaned = text.strip().lower().replace(' ', '')
    numerator, _, denominator = cleaned.partition('/')
    try:
        if numerator.endswith('pi'):
            factor = numerator[:-2].rstrip('*')
            if factor in ('', '+', '-'):
                factor += '1'
            value = float(factor) * math.pi
        else:
            value = float(numerator)
        if denominator:
            value /= float(denominator)
    except (ValueError, ZeroDivisionError):
        raise ValueError('Cannot parse number {!r}'.format(text))
    return value


def _angle(text, degrees):
    value = parse_number(text)
    return math.radians(value) if degrees else value


def parse_parameter(assignment):
    """Splits 'key=value' and converts the value.

    Values are tried as integer, as number (pi allowed), as boolean and
    as comma separated list of numbers; otherwise they stay text.
    """
    key, sep, raw = assignment.partition('=')
    if not sep or not key:
        raise ValueError('Parameter {!r} is not of the form key=value'.format(assignment))
    raw = raw.strip()
    try:
        return key, int(raw)
    except ValueError:
        pass
    try:
        return key, parse_number(raw)
    except ValueError:
        pass
    if raw.lower() in ('true', 'false'):
        return key, raw.lower() == 'true'
    if ',' in raw:
        try:
            return key, [parse_number(item) for item in raw.split(',')]
        except ValueError:
            pass
    return key, raw


def _direction(text, degrees):
    if text in AXES:
        return axis(text)
    parts = text.split(',')
    if len(parts) not in (1, 2):
        raise ValueError('Direction {!r} is neither an axis nor theta,phi'.format(text))
    angles = [_angle(part, degrees) for part in parts]
    return BlochDirection.from_angles(*angles)


def parse_state(spec, degrees=False):
    """State from a spec string.

    * spin:<axis> or spin:<theta>,<phi>, optionally followed by ':down',
    * vec:<comma separated complex amplitudes>, normalized on the fly,
    * basis:<dim>:<index>.

    Returns
    -------
    StateVector
    """
    kind, _, rest = spec.partition(':')
    if kind == 'spin':
        direction, _, orientation = rest.partition(':')
        if orientation not in ('', 'up', 'down'):
            raise ValueError('Spin orientation must be up or down, got {!r}'.format(orientation))
        return spin_state(_direction(direction, degrees), up=orientation != 'down')
    if kind == 'vec':
        try:
            amplitudes = [complex(item.strip().replace('i', 'j')) for item in rest.split(',')]
        except ValueError:
            raise ValueError('Cannot parse amplitudes {!r}'.format(rest))
        return StateVector.from_unnormalized(amplitudes)
    if kind == 'basis':
        dim, _, index = rest.partition(':')
        return basis_state(int(dim), int(index))
    raise ValueError('Unknown state spec {!r}; use spin:, vec: or basis:'.format(spec))


def parse_measurement(spec, degrees=False):
    """Measurement from a spec string.

    * spin:<axis> or spin:<theta>,<phi> with outcomes up and down,
    * box:<dim>:<index> with outcomes in and out,
    * basis:<dim> with outcomes 0 .. dim-1,
    * identity:<dim>.

    Returns
    -------
    SpectralMeasurement
    """
    kind, _, rest = spec.partition(':')
    if kind == 'spin':
        return spin_measurement(_direction(rest, degrees), name='sigma_' + rest)
    if kind == 'box':
        dim, _, index = rest.partition(':')
        return box_measurement(int(dim), int(index))
    if kind == 'basis':
        return computational_measurement(int(rest))
    if kind == 'identity':
        return SpectralMeasurement.identity(int(rest))
    raise ValueError('Unknown measurement spec {!r}; use spin:, box:, basis: or identity:'.format(
        spec))


def parse_grid(text, degrees=False):
    """Angle grid 'start:stop:steps' or a comma separated list."""
    if ':' in text:
        parts = text.split(':')
        if len(parts) != 3:
            raise ValueError('Grid {!r} is not of the form start:stop:steps'.format(text))
        steps = int(parts[2])
        if steps < 1:
            raise ValueError('Grid {!r} needs at least one step'.format(text))
        return np.linspace(_angle(parts[0], degrees), _angle(parts[1], degrees), steps).tolist()
    return [_angle(item, degrees) for item in text.split(',')]


def _common_parser():
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--format', dest='format', choices=FORMATS, default=None,
                        help="Output format. Default: csv for sweep, json otherwise.")
    parser.add_argument('--out', dest='out', default=None,
                        help="Output file or directory. Default: stdout.")
    parser.add_argument('--tolerance', dest='tolerance', type=float,
                        default=CONDITION_TOLERANCE,
                        help="Tolerance of the validity conditions.")
    parser.add_argument('--degrees', dest='degrees', action='store_true', default=False,
                        help="Interpret angles in degrees.")
    parser.add_argument('--table', dest='table', default=None,
                        help="Table written in csv format. Default: primary table.")
    return parser


def build_parser():
    """Argument parser of the twostate command line tool."""
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog='twostate',
        description='twostate - ABL probabilities, pre- and post-selected ensembles\n'
                    'and counterfactual validity checks.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + version)
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    abl = subparsers.add_parser('abl', parents=[common],
                                help="ABL probabilities of an intermediate measurement.")
    abl.add_argument('--pre', required=True, help="Pre-selected state spec.")
    abl.add_argument('--post', required=True, help="Post-selected state spec.")
    abl.add_argument('--measurement', required=True, help="Intermediate measurement spec.")
    abl.add_argument('--outcome', default=None, help="Outcome reported separately.")

    scen = subparsers.add_parser('scenario', parents=[common],
                                 help="Run a built-in scenario.",
                                 epilog='Scenarios: ' + ', '.join(available_scenarios()))
    scen.add_argument('name', help="Scenario name.")
    scen.add_argument('--param', dest='params', action='append', default=[],
                      metavar='KEY=VALUE', help="Scenario parameter, repeatable.")
    scen.add_argument('--seed', dest='seed', type=int, default=None,
                      help="Seed of the scenario's Monte Carlo runs. Default: 0.")

    sweep = subparsers.add_parser('sweep', parents=[common],
                                  help="Sharp-Shanks quantities on an angle grid.")
    sweep.add_argument('--theta-ac', dest='theta_ac', default='0:pi:9',
                       help="Grid of theta_ac, start:stop:steps or a list. Default: 0:pi:9.")
    sweep.add_argument('--theta-cb', dest='theta_cb', default='0:pi:9',
                       help="Grid of theta_cb, start:stop:steps or a list. Default: 0:pi:9.")
    sweep.add_argument('--outcome', default='c1', choices=('c1', 'c2'),
                       help="Intermediate outcome. Default: c1.")
    sweep.add_argument('--no-progress', dest='progress', action='store_false', default=True,
                       help="Hide the progress bar.")

    sim = subparsers.add_parser('simulate', parents=[common],
                                help="Monte Carlo runs of pre- and post-selected systems.")
    sim.add_argument('--pre', required=True, help="Pre-selected state spec.")
    sim.add_argument('--mid', default=None,
                     help="Intermediate measurement spec. Default: none.")
    sim.add_argument('--counterfactual', default=None,
                     help="Intermediate measurement spec of a paired counterfactual world.")
    sim.add_argument('--post', required=True, help="Post-selection measurement spec.")
    sim.add_argument('--n', dest='n', type=int, default=1000,
                     help="Number of systems. Default: 1000.")
    sim.add_argument('--seed', dest='seed', type=int, default=0,
                     help="Seed of the keyed generator. Default: 0.")
    sim.add_argument('--coupling', choices=COUPLINGS, default=COMMON_RANDOM_NUMBERS,
                     help="Coupling of paired worlds. Default: common-random-numbers.")
    return parser


def _report(args):
    if args.command == 'abl':
        return abl_report(parse_state(args.pre, args.degrees),
                          parse_state(args.post, args.degrees),
                          parse_measurement(args.measurement, args.degrees),
                          outcome=args.outcome, tolerance=args.tolerance)
    if args.command == 'scenario':
        parameters = dict(parse_parameter(item) for item in args.params)
        if args.seed is not None:
            parameters['seed'] = args.seed
        if args.degrees:
            parameters['degrees'] = True
        if args.tolerance != CONDITION_TOLERANCE:
            parameters['tolerance'] = args.tolerance
        return run_scenario(ScenarioSpec(name=args.name, parameters=parameters))
    if args.command == 'sweep':
        return sharp_shanks_sweep(parse_grid(args.theta_ac, args.degrees),
                                  parse_grid(args.theta_cb, args.degrees),
                                  tolerance=args.tolerance, outcome=args.outcome,
                                  show_progress=args.progress)
    mid = None if args.mid is None else parse_measurement(args.mid, args.degrees)
    counterfactual = None
    if args.counterfactual is not None:
        counterfactual = parse_measurement(args.counterfactual, args.degrees)
    return simulation_report(parse_state(args.pre, args.degrees), mid,
                             parse_measurement(args.post, args.degrees), args.n, args.seed,
                             mid_counterfactual=counterfactual, coupling=args.coupling)


def main(argv=None):
    """twostate command line tool.

    Parameters
    ----------
    argv : list(str) or None
        Arguments without the program name. Defaults to sys.argv[1:].

    Returns
    -------
    int
        Exit code.
    """
    args = build_parser().parse_args(argv)
    fmt = args.format or ('csv' if args.command == 'sweep' else 'json')
    try:
        _configure_logging()
        _LOGGER.info('twostate %s: %s', version, vars(args))
        report = _report(args)
        emit_report(report, fmt=fmt, destination=args.out, table=args.table)
    except ArithmeticError as err:
        _LOGGER.error('numerical error: %s', err)
        print('twostate: numerical error: {}'.format(err), file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as err:
        _LOGGER.error('invalid input: %s', err)
        print('twostate: error: {}'.format(err), file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK
