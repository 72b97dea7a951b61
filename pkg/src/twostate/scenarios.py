"""Built-in scenarios.

Each scenario rebuilds a named construction end to end and returns a
:class:`twostate.utils.ScenarioReport`. Every number in a report can be
recomputed from the echoed parameters with the module level functions.

Available scenarios:

* sharp-shanks: counterfactual and corrected totals for coplanar spins,
* three-box: the three-box particle search,
* figure-4: expected counts and fixed fractions of paired worlds,
* footnote-12: mid spin orthogonal to the pre/post plane,
* special-case: mid spin along the pre or the post direction.
"""

import logging
import math
from collections import OrderedDict
from typing import ClassVar
from typing import List
from typing import Optional

import numpy as np
import pandas as pd
from progress.bar import Bar
from pydantic import BaseModel
from pydantic import ConfigDict
from pydantic import Field

from twostate.counterfactual import CONDITION_TOLERANCE
from twostate.counterfactual import consistency_condition
from twostate.counterfactual import counterfactual_verdict
from twostate.counterfactual import special_case_detector
from twostate.counterfactual import weight_condition
from twostate.decorators import SCENARIOS
from twostate.decorators import ScenarioError
from twostate.decorators import scenario
from twostate.ensembles import born_probability
from twostate.ensembles import eta_weights
from twostate.ensembles import mixture_M
from twostate.ensembles import mixture_Mprime
from twostate.ensembles import ss_corrected_total
from twostate.ensembles import ss_counterfactual_total
from twostate.hilbert import StateVector
from twostate.hilbert import axis
from twostate.hilbert import box_measurement
from twostate.hilbert import computational_measurement
from twostate.hilbert import coplanar_direction
from twostate.hilbert import rank_one_measurement
from twostate.hilbert import spin_measurement
from twostate.hilbert import spin_state
from twostate.montecarlo import COMMON_RANDOM_NUMBERS
from twostate.montecarlo import COUPLINGS
from twostate.montecarlo import INDEPENDENT
from twostate.montecarlo import PairedRunSet
from twostate.montecarlo import RunRecord
from twostate.montecarlo import expected_counts
from twostate.montecarlo import expected_fixed_fraction
from twostate.montecarlo import fixed_systems
from twostate.montecarlo import frequency_report
from twostate.montecarlo import paired_worlds
from twostate.montecarlo import records_to_frame
from twostate.montecarlo import simulate_runs
from twostate.montecarlo import theoretical_weights
from twostate.tsvf import TwoStateVector
from twostate.tsvf import VanishingDenominatorError
from twostate.tsvf import abl_distribution
from twostate.tsvf import abl_distribution_projected
from twostate.utils import ScenarioReport

_LOGGER = logging.getLogger('twostate.scenarios')


class ScenarioSpec(BaseModel):
    """Scenario name with raw parameters."""

    model_config = ConfigDict(extra='forbid')

    name: str
    parameters: dict = Field(default_factory=dict)
    description: str = ''


class _Parameters(BaseModel):
    model_config = ConfigDict(extra='forbid')

    angle_fields: ClassVar[tuple] = ()

    degrees: bool = False
    tolerance: float = Field(CONDITION_TOLERANCE, gt=0.)
    seed: int = Field(0, ge=0, lt=2**63)


def run_scenario(spec):
    """Runs a registered scenario.

    Parameters
    ----------
    spec : ScenarioSpec or dict
        Name and raw parameters.

    Returns
    -------
    ScenarioReport

    Raises
    ------
    ScenarioError
        For an unknown scenario name or invalid parameters.
    """
    if isinstance(spec, dict):
        spec = ScenarioSpec(**spec)
    if spec.name not in SCENARIOS:
        raise ScenarioError('Unknown scenario {!r}; available: {}'.format(
            spec.name, ', '.join(SCENARIOS)))
    return SCENARIOS[spec.name].run(spec.parameters)


def available_scenarios():
    """Names and descriptions of the registered scenarios."""
    return OrderedDict((name, entry.description) for name, entry in SCENARIOS.items())


# ==========================================================
# coplanar spin configurations

class CoplanarSpins(object):
    """Spins a = z, c at theta_ac and b at theta_ac + theta_cb in the x-z plane.

    Attributes
    ----------
    pre : StateVector
        Spin up along a, the pre-selected state.
    pre_meas, mid_meas, post_meas : SpectralMeasurement
        sigma_a (a1, a2), sigma_c (c1, c2) and sigma_b (b1, b2).
    """

    def __init__(self, theta_ac, theta_cb):
        self.theta_ac = theta_ac
        self.theta_cb = theta_cb
        self.theta_ab = theta_ac + theta_cb
        a = axis('z')
        c = coplanar_direction(theta_ac)
        b = coplanar_direction(self.theta_ab)
        self.pre = spin_state(a)
        self.pre_meas = spin_measurement(a, labels=('a1', 'a2'), name='sigma_a')
        self.mid_meas = spin_measurement(c, labels=('c1', 'c2'), name='sigma_c')
        self.post_meas = spin_measurement(b, labels=('b1', 'b2'), name='sigma_b')

    def post_state(self, label):
        """Eigenstate of sigma_b for the outcome label."""
        return self.post_meas.projector(label).support_vector()


def _grid_abl(pre, projector, mid, outcome):
    # impossible post-selections stay empty in grid tables
    try:
        return abl_distribution_projected(pre, projector, mid)[outcome]
    except VanishingDenominatorError:
        _LOGGER.debug('vanishing ABL denominator on grid point')
        return np.nan


def _sharp_shanks_row(config, outcome, tolerance):
    pre, mid, post = config.pre, config.mid_meas, config.post_meas
    weights = weight_condition(pre, mid, post, tolerance)
    consistency = consistency_condition(pre, mid, post.projector('b1'), tolerance)
    counterfactual = ss_counterfactual_total(pre, mid, post, outcome)
    born = born_probability(pre, mid, outcome)
    return OrderedDict([
        ('theta_ac', config.theta_ac),
        ('theta_cb', config.theta_cb),
        ('theta_ab', config.theta_ab),
        ('abl_b1', _grid_abl(pre, post.projector('b1'), mid, outcome)),
        ('abl_b2', _grid_abl(pre, post.projector('b2'), mid, outcome)),
        ('weight_M_b1', weights.rows[0].weight_M),
        ('weight_eta_b1', weights.rows[0].weight_eta),
        ('counterfactual_total', counterfactual),
        ('born_probability', born),
        ('corrected_total', ss_corrected_total(pre, mid, post, outcome)),
        ('discrepancy', counterfactual - born),
        ('pair_value', consistency.pairs[0].value),
        ('weight_condition', weights.satisfied),
        ('consistency', consistency.satisfied),
        ('special_case', special_case_detector(config.pre_meas, mid, post).flag),
    ])


def _condition_tables(report, verdict):
    report.add_table('weight_condition', verdict.weight_condition.to_frame())
    report.add_table('consistency', verdict.consistency.to_frame())


class SharpShanksParameters(_Parameters):
    """Parameters of the sharp-shanks scenario."""

    angle_fields: ClassVar[tuple] = ('theta_ac', 'theta_cb')

    theta_ac: float = math.pi / 4
    theta_cb: float = math.pi / 4
    mid_outcome: str = Field('c1', pattern='^c[12]$')
    n: int = Field(0, ge=0, le=10**7)


@scenario('sharp-shanks', SharpShanksParameters,
          'Counterfactual against corrected total probability for coplanar spins')
def sharp_shanks(params, report):
    """Composes the probability of a sigma_c outcome over M and over eta."""
    config = CoplanarSpins(params['theta_ac'], params['theta_cb'])
    outcome = params['mid_outcome']
    pre, mid, post = config.pre, config.mid_meas, config.post_meas
    tolerance = params['tolerance']

    abl = OrderedDict()
    reversed_abl = OrderedDict()
    for label in post.labels:
        tsv = TwoStateVector(pre, config.post_state(label), 'I')
        for mid_label, value in abl_distribution(tsv, mid).items():
            abl['{}|{}'.format(mid_label, label)] = value
        for mid_label, value in abl_distribution(tsv.reversed(), mid).items():
            reversed_abl['{}|{}'.format(mid_label, label)] = value
    report.add_result('abl', abl)
    report.add_result('abl_time_reversed', reversed_abl)

    mixture = mixture_M(pre, post)
    mixture_prime = mixture_Mprime(pre, mid, post)
    report.add_result('weights_M', OrderedDict((sub.post_outcome, sub.weight)
                                               for sub in mixture))
    report.add_result('weights_eta', eta_weights(mixture_prime))

    verdict = counterfactual_verdict(pre, mid, post, 'b1', mid_outcome=outcome,
                                     pre_meas=config.pre_meas, tolerance=tolerance)
    counterfactual = ss_counterfactual_total(pre, mid, post, outcome)
    born = born_probability(pre, mid, outcome)
    report.add_result('totals', OrderedDict([
        ('outcome', outcome),
        ('counterfactual_total', counterfactual),
        ('born_probability', born),
        ('corrected_total', ss_corrected_total(pre, mid, post, outcome)),
        ('discrepancy', verdict.discrepancy),
    ]))
    report.add_result('weight_condition', OrderedDict(
        [(row.post_outcome, OrderedDict([('weight_M', row.weight_M),
                                         ('weight_eta', row.weight_eta),
                                         ('delta', row.delta)]))
         for row in verdict.weight_condition.rows]))
    report.add_result('consistency', OrderedDict(
        ('{},{}'.format(pair.alpha, pair.beta), pair.value)
        for pair in verdict.consistency.pairs))

    report.add_verdict('weight_condition', verdict.weight_condition.satisfied)
    report.add_verdict('consistency', verdict.consistency.satisfied)
    report.add_verdict('special_case', verdict.special_case.flag)
    report.add_verdict('special_case_reason', verdict.special_case.reason)
    report.add_verdict('licensed', verdict.licensed)

    report.add_table('mixture_M', mixture.to_frame(), primary=True)
    report.add_table('mixture_Mprime', mixture_prime.to_frame())
    _condition_tables(report, verdict)

    if params['n']:
        records = simulate_runs(pre, mid, post, params['n'], params['seed'], pre_label='a1')
        report.add_table('frequencies_eta', frequency_report(
            records, 'post', theoretical_weights(pre, mid, post, 'post')))
        report.add_table('frequencies_abl_b1', frequency_report(
            records, 'mid', theoretical_weights(pre, mid, post, 'mid', given_post='b1'),
            given_post='b1'))


class ThreeBoxParameters(_Parameters):
    """Parameters of the three-box scenario; amplitudes are normalized."""

    pre: List[float] = Field(default_factory=lambda: [1., 1., 1.], min_length=2, max_length=16)
    post: List[float] = Field(default_factory=lambda: [1., 1., -1.], min_length=2,
                              max_length=16)
    n: int = Field(0, ge=0, le=10**7)


@scenario('three-box', ThreeBoxParameters,
          'Searching a pre- and post-selected particle in each box')
def three_box(params, report):
    """ABL probabilities and verdicts for opening each box."""
    if len(params['pre']) != len(params['post']):
        raise ScenarioError('Invalid parameter \'post\' for scenario three-box: '
                            'pre and post need the same number of boxes')
    pre = StateVector.from_unnormalized(params['pre'])
    post = StateVector.from_unnormalized(params['post'])
    post_meas = rank_one_measurement(post, labels=('post', 'not-post'), name='post')
    pre_meas = rank_one_measurement(pre, labels=('pre', 'not-pre'), name='pre')
    names = [chr(ord('A') + box) for box in range(pre.dim)]

    rows = []
    for box, name in enumerate(names):
        search = box_measurement(pre.dim, box, name='box' + name)
        verdict = counterfactual_verdict(pre, search, post_meas, 'post', mid_outcome='in',
                                         pre_meas=pre_meas, tolerance=params['tolerance'])
        rows.append(OrderedDict([
            ('box', name),
            ('abl_in', verdict.abl['in']),
            ('abl_out', verdict.abl['out']),
            ('born_in', born_probability(pre, search, 'in')),
            ('pair_value', verdict.consistency.pairs[0].value),
            ('consistency', verdict.consistency.satisfied),
            ('weight_condition', verdict.weight_condition.satisfied),
            ('discrepancy', verdict.discrepancy),
            ('licensed', verdict.licensed),
        ]))
        report.add_verdict('licensed_' + name, verdict.licensed)
    table = pd.DataFrame(rows)
    report.add_result('abl_in', OrderedDict(zip(names, table['abl_in'])))
    report.add_result('consistency', OrderedDict(zip(names, table['consistency'])))
    report.add_table('searches', table, primary=True)

    if params['n']:
        search = box_measurement(pre.dim, 0, name='boxA')
        records = simulate_runs(pre, search, post_meas, params['n'], params['seed'])
        report.add_table('frequencies_abl_A', frequency_report(
            records, 'mid', theoretical_weights(pre, search, post_meas, 'mid',
                                                given_post='post'),
            given_post='post'))


# ==========================================================
# paired worlds

_FIGURE_FOUR_ACTUAL = OrderedDict([
    (('theta1', 'z1'), (2, 7, 10, 12)),
    (('theta1', 'z2'), (1, 4, 6, 8)),
    (('theta2', 'z1'), (3, 5, 15, 16)),
    (('theta2', 'z2'), (9, 11, 13, 14)),
])
_FIGURE_FOUR_COUNTERFACTUAL = OrderedDict([
    (('phi1', 'z1'), (1, 3, 4, 6, 7, 10, 11, 13, 14)),
    (('phi1', 'z2'), (2, 5, 9)),
    (('phi2', 'z1'), (8,)),
    (('phi2', 'z2'), (12, 15, 16)),
])


def figure_four_illustration():
    """Statistically ideal assignment of 16 systems to both worlds.

    Returns
    -------
    PairedRunSet
        Hand-built records without coupling model; the mid outcomes
        are theta1/theta2 in the actual and phi1/phi2 in the
        counterfactual world.
    """
    def _records(assignment, world):
        return [RunRecord(system_id, world, 'z1', mid, post, 'illustration')
                for (mid, post), systems in assignment.items() for system_id in systems]
    return PairedRunSet(_records(_FIGURE_FOUR_ACTUAL, 'actual'),
                        _records(_FIGURE_FOUR_COUNTERFACTUAL, 'counterfactual'), None)


class FigureFourParameters(_Parameters):
    """Parameters of the figure-4 scenario."""

    angle_fields: ClassVar[tuple] = ('theta', 'phi')

    theta: float = math.pi / 2
    phi: float = math.pi / 3
    n_systems: int = Field(16, ge=1)
    n: int = Field(0, ge=0, le=10**7)


@scenario('figure-4', FigureFourParameters,
          'Time-symmetrically fixed systems of an actual and a counterfactual world')
def figure_four(params, report):
    """Expected counts of both worlds and their fixed fractions."""
    pre = spin_state(axis('z'))
    post_meas = spin_measurement(axis('z'), labels=('z1', 'z2'), name='sigma_z')
    actual = spin_measurement(coplanar_direction(params['theta']),
                              labels=('theta1', 'theta2'), name='sigma_theta')
    counterfactual = spin_measurement(coplanar_direction(params['phi']),
                                      labels=('phi1', 'phi2'), name='sigma_phi')

    report.add_table('actual_counts', expected_counts(pre, actual, post_meas,
                                                      params['n_systems']), primary=True)
    report.add_table('counterfactual_counts', expected_counts(pre, counterfactual, post_meas,
                                                              params['n_systems']))

    illustration = fixed_systems(figure_four_illustration(), 'z1')
    report.add_result('illustration', OrderedDict([
        ('fixed_systems', list(illustration.system_ids)),
        ('selected', illustration.selected),
        ('fraction', illustration.fraction),
    ]))
    report.add_result('expected_fixed_fraction', OrderedDict(
        (coupling, expected_fixed_fraction(pre, actual, counterfactual, post_meas, 'z1',
                                           coupling))
        for coupling in COUPLINGS))
    report.add_note('Fixed fractions depend on the coupling model between the worlds; '
                    'they are not predictions of quantum mechanics.')

    if params['n']:
        simulated = OrderedDict()
        for coupling in COUPLINGS:
            pairs = paired_worlds(pre, actual, counterfactual, post_meas, params['n'],
                                  params['seed'], coupling=coupling, pre_label='z1')
            fixed = fixed_systems(pairs, 'z1')
            simulated[coupling] = OrderedDict([('selected', fixed.selected),
                                               ('fixed', len(fixed.system_ids)),
                                               ('fraction', fixed.fraction)])
            report.add_table('runs_' + coupling, pairs.to_frame(),
                             primary=coupling == COMMON_RANDOM_NUMBERS)
            if coupling == INDEPENDENT:
                report.add_table('frequencies_actual', frequency_report(
                    pairs.actual, 'mid_post',
                    theoretical_weights(pre, actual, post_meas, 'mid_post')))
                report.add_table('frequencies_counterfactual', frequency_report(
                    pairs.counterfactual, 'mid_post',
                    theoretical_weights(pre, counterfactual, post_meas, 'mid_post')))
        report.add_result('simulated_fixed_fraction', simulated)


# ==========================================================
# validity condition probes

def qutrit_witness():
    """Configuration meeting the weight condition while consistency fails.

    pre = (1, 1, 1)/sqrt(3), post = (1, 1, w*)/sqrt(3) with
    w = exp(2 pi i/3), and the intermediate measurement in the
    computational basis. All off-diagonal terms cancel in sum but not
    individually.

    Returns
    -------
    tuple
        :code:`(pre, mid_meas, post_meas)`.
    """
    omega = np.exp(2j * np.pi / 3.)
    pre = StateVector.from_unnormalized([1., 1., 1.])
    post = StateVector.from_unnormalized([1., 1., np.conj(omega)])
    return (pre, computational_measurement(3, name='basis'),
            rank_one_measurement(post, labels=('post', 'not-post'), name='post'))


def orthogonal_mid_pair_value(theta_ab):
    """Closed form cos(theta_ab)/4 of the pair value for a = z, c = y."""
    return math.cos(theta_ab) / 4.


class FootnoteTwelveParameters(_Parameters):
    """Parameters of the footnote-12 scenario."""

    angle_fields: ClassVar[tuple] = ('start', 'stop')

    start: float = 0.
    stop: float = math.pi
    steps: int = Field(13, ge=1, le=100000)


@scenario('footnote-12', FootnoteTwelveParameters,
          'Weight and consistency conditions for a mid spin orthogonal to pre and post')
def footnote_twelve(params, report):
    """Sweeps theta_ab with a = z, b in the x-z plane and c = y."""
    tolerance = params['tolerance']
    pre = spin_state(axis('z'))
    mid = spin_measurement(axis('y'), labels=('c1', 'c2'), name='sigma_y')
    rows = []
    for theta_ab in np.linspace(params['start'], params['stop'], params['steps']):
        post_meas = spin_measurement(coplanar_direction(theta_ab), labels=('b1', 'b2'),
                                     name='sigma_b')
        weights = weight_condition(pre, mid, post_meas, tolerance)
        consistency = consistency_condition(pre, mid, post_meas.projector('b1').support_vector(),
                                            tolerance)
        rows.append(OrderedDict([
            ('theta_ab', float(theta_ab)),
            ('weight_M', weights.rows[0].weight_M),
            ('weight_eta', weights.rows[0].weight_eta),
            ('delta', weights.rows[0].delta),
            ('pair_value', consistency.pairs[0].value),
            ('closed_form', orthogonal_mid_pair_value(theta_ab)),
            ('weight_condition', weights.satisfied),
            ('consistency', consistency.satisfied),
        ]))
    sweep = pd.DataFrame(rows)
    report.add_table('sweep', sweep, primary=True)
    counterexamples = sweep[sweep['weight_condition'] & ~sweep['consistency']]
    report.add_result('sweep_summary', OrderedDict([
        ('points', len(sweep)),
        ('weight_condition_points', int(sweep['weight_condition'].sum())),
        ('consistency_points', int(sweep['consistency'].sum())),
        ('weight_without_consistency_points', len(counterexamples)),
    ]))
    report.add_verdict('sweep_has_weight_without_consistency', len(counterexamples) > 0)

    pre3, mid3, post3 = qutrit_witness()
    weights = weight_condition(pre3, mid3, post3, tolerance)
    consistency = consistency_condition(pre3, mid3, post3.projector('post'), tolerance)
    report.add_result('qutrit_witness', OrderedDict([
        ('max_delta', weights.max_delta),
        ('pair_values', OrderedDict(('{},{}'.format(pair.alpha, pair.beta), pair.value)
                                    for pair in consistency.pairs)),
        ('weight_condition', weights.satisfied),
        ('consistency', consistency.satisfied),
    ]))
    report.add_verdict('witness_weight_without_consistency',
                       weights.satisfied and not consistency.satisfied)
    report.add_note('With c orthogonal to both a and b the pair value equals cos(theta_ab)/4 '
                    'and vanishes exactly where the weight condition holds (theta_ab = pi/2), '
                    'so this family shows no configuration meeting the weight condition '
                    'while violating the consistency condition. For spin-1/2 the weight '
                    'condition is equivalent to the consistency condition.')
    report.add_note('qutrit_witness is a three-level configuration that meets the weight '
                    'condition while the consistency condition fails.')


class SpecialCaseParameters(_Parameters):
    """Parameters of the special-case scenario."""

    angle_fields: ClassVar[tuple] = ('theta_ac', 'theta_cb')

    steps: int = Field(13, ge=1, le=100000)
    theta_ac: Optional[float] = None
    theta_cb: Optional[float] = None


def _special_case_row(theta_ac, theta_cb, tolerance):
    row = _sharp_shanks_row(CoplanarSpins(theta_ac, theta_cb), 'c1', tolerance)
    row['cos2_half_theta_ab'] = math.cos((theta_ac + theta_cb) / 2.)**2
    return row


@scenario('special-case', SpecialCaseParameters,
          'Mid spin along the pre- or post-selection direction')
def special_case(params, report):
    """Sweeps theta_cb with c = a and theta_ac with c = b."""
    tolerance = params['tolerance']
    grid = np.linspace(0., math.pi, params['steps'])
    along_pre = pd.DataFrame([_special_case_row(0., float(theta), tolerance) for theta in grid])
    along_post = pd.DataFrame([_special_case_row(float(theta), 0., tolerance) for theta in grid])
    report.add_table('c_along_a', along_pre, primary=True)
    report.add_table('c_along_b', along_post)

    for name, table in (('c_along_a', along_pre), ('c_along_b', along_post)):
        report.add_verdict(name + '_weight_condition', bool(table['weight_condition'].all()))
        report.add_verdict(name + '_consistency', bool(table['consistency'].all()))
        report.add_verdict(name + '_discrepancy_vanishes',
                           bool((table['discrepancy'].abs() <= tolerance).all()))

    if params['theta_ac'] is not None or params['theta_cb'] is not None:
        theta_ac = params['theta_ac'] or 0.
        theta_cb = params['theta_cb'] or 0.
        report.add_result('point', _special_case_row(theta_ac, theta_cb, tolerance))


# ==========================================================
# reports of the command line subcommands

def sharp_shanks_sweep(theta_ac_values, theta_cb_values, tolerance=CONDITION_TOLERANCE,
                       outcome='c1', show_progress=True):
    """Sharp-Shanks quantities on a theta_ac x theta_cb grid.

    Returns
    -------
    ScenarioReport
        With the single table 'sweep'.
    """
    theta_ac_values = [float(value) for value in theta_ac_values]
    theta_cb_values = [float(value) for value in theta_cb_values]
    report = ScenarioReport('sweep', OrderedDict([
        ('theta_ac', theta_ac_values), ('theta_cb', theta_cb_values),
        ('tolerance', tolerance), ('mid_outcome', outcome)]))
    rows = []
    bar = Bar('Sweeping', max=len(theta_ac_values) * len(theta_cb_values)) \
        if show_progress else None
    for theta_ac in theta_ac_values:
        for theta_cb in theta_cb_values:
            rows.append(_sharp_shanks_row(CoplanarSpins(theta_ac, theta_cb), outcome, tolerance))
            if bar is not None:
                bar.next()
    if bar is not None:
        bar.finish()
    report.add_table('sweep', pd.DataFrame(rows), primary=True)
    return report


def abl_report(pre, post, meas, outcome=None, tolerance=CONDITION_TOLERANCE):
    """Report of an ad-hoc ABL query.

    Parameters
    ----------
    pre, post : StateVector
        Boundary states.
    meas : SpectralMeasurement
        Intermediate measurement.
    outcome : str or None
        Outcome whose probability is reported separately.
    """
    tsv = TwoStateVector(pre, post)
    distribution = abl_distribution(tsv, meas)
    report = ScenarioReport('abl', OrderedDict([
        ('pre', pre.amplitudes.tolist()), ('post', post.amplitudes.tolist()),
        ('measurement', meas.name), ('outcome', outcome), ('tolerance', tolerance)]))
    report.add_result('abl', distribution)
    report.add_result('born', OrderedDict(zip(meas.labels, meas.probabilities(pre).tolist())))
    if outcome is not None:
        meas.index(outcome)
        report.add_result('probability', distribution[outcome])
    consistency = consistency_condition(pre, meas, post, tolerance)
    report.add_verdict('consistency', consistency.satisfied)
    report.add_verdict('licensed', consistency.satisfied)
    report.add_table('abl', pd.DataFrame(OrderedDict([
        ('outcome', meas.labels), ('probability', list(distribution.values()))])),
        primary=True)
    report.add_table('consistency', consistency.to_frame())
    return report


def simulation_report(pre, mid_meas, post_meas, n, seed, mid_counterfactual=None,
                      coupling=COMMON_RANDOM_NUMBERS):
    """Report of a Monte Carlo run, paired if mid_counterfactual is given.

    Returns
    -------
    ScenarioReport
        Tables 'runs' (one row per record) and frequency checks.
    """
    report = ScenarioReport('simulate', OrderedDict([
        ('pre', pre.amplitudes.tolist()),
        ('mid', None if mid_meas is None else mid_meas.name),
        ('mid_counterfactual', None if mid_counterfactual is None else mid_counterfactual.name),
        ('post', post_meas.name), ('n', n),
        ('coupling', None if mid_counterfactual is None else coupling)]), seed=seed)
    if mid_counterfactual is None:
        records = simulate_runs(pre, mid_meas, post_meas, n, seed)
        report.add_table('runs', records_to_frame(records), primary=True)
        report.add_table('frequencies', frequency_report(
            records, 'post', theoretical_weights(pre, mid_meas, post_meas, 'post')))
        return report

    pairs = paired_worlds(pre, mid_meas, mid_counterfactual, post_meas, n, seed,
                          coupling=coupling)
    report.add_table('runs', pairs.to_frame(), primary=True)
    report.add_table('frequencies_actual', frequency_report(
        pairs.actual, 'post', theoretical_weights(pre, mid_meas, post_meas, 'post')))
    report.add_table('frequencies_counterfactual', frequency_report(
        pairs.counterfactual, 'post',
        theoretical_weights(pre, mid_counterfactual, post_meas, 'post')))
    fixed = OrderedDict()
    for label in post_meas.labels:
        found = fixed_systems(pairs, label)
        fixed[label] = OrderedDict([
            ('selected', found.selected), ('fixed', len(found.system_ids)),
            ('fraction', found.fraction),
            ('expected_fraction', expected_fixed_fraction(pre, mid_meas, mid_counterfactual,
                                                          post_meas, label, coupling))])
    report.add_result('fixed_systems', fixed)
    return report
