"""Seeded Monte Carlo simulation of pre- and post-selected runs.

Every uniform draw is addressed by (seed, stream, stage, system_id) and
taken from a numpy Philox counter-based generator keyed by
(seed, stream, stage). The draw of system i is the i-th output of that
keyed stream, so results do not depend on iteration order or on how
the systems are split into chunks.

The stage of a draw is the number of random collapses the system has
undergone in its world. A collapse whose outcome is certain consumes
no draw. Outcomes are sampled by inverse CDF over the declared outcome
order of each measurement.

An intermediate measurement that commutes with the post-selection
observable is sampled after the post outcome, conditioned on it. The
joint outcome distribution is the same, and the post outcome is drawn
as in a world without the intermediate measurement.

Quantum mechanics defines no joint distribution over an actual and a
counterfactual world, so paired simulations take an explicit coupling:

* 'independent': each world uses its own streams,
* 'common-random-numbers': both worlds read the actual world's streams.
"""

import logging
from collections import OrderedDict
from collections import namedtuple

import numpy as np
import pandas as pd
from scipy import stats

from twostate.ensembles import eta_weights
from twostate.ensembles import mixture_M
from twostate.ensembles import mixture_Mprime
from twostate.hilbert import DimensionMismatchError
from twostate.tsvf import abl_distribution_projected

ACTUAL = 'actual'
COUNTERFACTUAL = 'counterfactual'
WORLDS = (ACTUAL, COUNTERFACTUAL)

INDEPENDENT = 'independent'
COMMON_RANDOM_NUMBERS = 'common-random-numbers'
COUPLINGS = (INDEPENDENT, COMMON_RANDOM_NUMBERS)

CERTAINTY_TOLERANCE = 1e-12

_STREAMS = {ACTUAL: 0, COUNTERFACTUAL: 1}
# Philox emits four 64 bit words per counter increment
_WORDS_PER_COUNTER = 4

_LOGGER = logging.getLogger('twostate.montecarlo')

RunRecord = namedtuple('RunRecord', ['system_id', 'world', 'pre_outcome', 'mid_outcome',
                                     'post_outcome', 'seed_path'])
RunRecord.__doc__ = """One simulated system in one world.

:code:`mid_outcome` is None iff the world has no intermediate measurement.
:code:`seed_path` names the draw streams, '<seed>/<stream>/<system_id>'.
"""

RECORD_COLUMNS = ['system_id', 'world', 'pre', 'mid', 'post', 'seed_path']

FixedSet = namedtuple('FixedSet', ['system_ids', 'fraction', 'selected'])
FixedSet.__doc__ = """Time-symmetrically fixed systems.

:code:`fraction` is len(system_ids) / selected, or None when no system
was post-selected in the actual world.
"""


def _check_seed(seed):
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError('seed must be in [0, 2**64), got {}'.format(seed))
    return seed


def keyed_uniforms(seed, stream, stage, system_ids):
    """Uniform draws in [0, 1) for the given systems.

    Parameters
    ----------
    seed : int
        Non-negative seed below 2**64.
    stream : str
        'actual' or 'counterfactual'.
    stage : int
        Number of random collapses performed before this draw.
    system_ids : array-like of int
        Non-negative system identifiers.

    Returns
    -------
    numpy.ndarray
        One draw per system id, independent of the other ids requested.
    """
    system_ids = np.asarray(system_ids, dtype=np.int64)
    if system_ids.size == 0:
        return np.empty(0)
    if system_ids.min() < 0:
        raise ValueError('system ids must be non-negative')
    key = np.array([_check_seed(seed), (_STREAMS[stream] << 32) | int(stage)], dtype=np.uint64)
    start = int(system_ids.min()) // _WORDS_PER_COUNTER
    bitgen = np.random.Philox(counter=start, key=key)
    offset = start * _WORDS_PER_COUNTER
    draws = np.random.Generator(bitgen).random(int(system_ids.max()) + 1 - offset)
    return draws[system_ids - offset]


def _projector_stack(meas):
    return np.array([projector.matrix for projector in meas.projectors])


def _probabilities(states, projectors):
    images = np.einsum('mij,nj->nmi', projectors, states)
    probs = np.einsum('nmi,nmi->nm', images.conj(), images).real
    return images, probs


def _inverse_cdf(probs, uniforms):
    cumulative = np.cumsum(probs, axis=-1)
    cumulative = cumulative / cumulative[..., -1:]
    index = (uniforms[..., None] >= cumulative).sum(axis=-1)
    return np.minimum(index, probs.shape[-1] - 1)


def _sampling_order(measurements):
    """Positions of the measurements in the order their collapses are sampled."""
    order = list(range(len(measurements)))
    if len(measurements) == 2 and measurements[0].commutes_with(measurements[1]):
        order.reverse()
    return order


def _restore_order(sampled, order):
    restored = [None] * len(order)
    for position, index in enumerate(order):
        restored[index] = sampled[position]
    return restored


def _run_protocol(pre, measurements, system_ids, seed, stream):
    """Sequential collapses of all systems; returns outcome indices per measurement."""
    order = _sampling_order(measurements)
    measurements = [measurements[index] for index in order]
    nsystems = len(system_ids)
    states = np.tile(pre.amplitudes, (nsystems, 1))
    stages = np.zeros(nsystems, dtype=np.int64)
    uniforms = np.array([keyed_uniforms(seed, stream, stage, system_ids)
                         for stage in range(len(measurements))]).reshape(
                             len(measurements), nsystems)
    rows = np.arange(nsystems)
    indices = []
    for meas in measurements:
        images, probs = _probabilities(states, _projector_stack(meas))
        chosen = np.argmax(probs, axis=1)
        uncertain = probs.max(axis=1) < 1. - CERTAINTY_TOLERANCE
        if uncertain.any():
            draws = uniforms[stages[uncertain], rows[uncertain]]
            chosen[uncertain] = _inverse_cdf(probs[uncertain], draws)
            stages[uncertain] += 1
        collapsed = images[rows, chosen]
        states = collapsed / np.linalg.norm(collapsed, axis=1)[:, None]
        indices.append(chosen)
    return _restore_order(indices, order)


def _check_protocol(pre, mid_meas, post_meas, n, system_ids):
    for meas in (mid_meas, post_meas):
        if meas is not None and meas.dim != pre.dim:
            raise DimensionMismatchError('Measurement {} has dim={}, state has dim={}'.format(
                meas.name, meas.dim, pre.dim))
    if system_ids is None:
        if int(n) < 1:
            raise ValueError('n must be at least 1, got {}'.format(n))
        system_ids = np.arange(int(n))
    return np.unique(np.asarray(system_ids, dtype=np.int64))


def _simulate(pre, mid_meas, post_meas, system_ids, seed, world, stream, pre_label):
    measurements = [meas for meas in (mid_meas, post_meas) if meas is not None]
    indices = _run_protocol(pre, measurements, system_ids, seed, stream)
    post_labels = np.array(post_meas.labels, dtype=object)[indices[-1]]
    if mid_meas is None:
        mid_labels = [None] * len(system_ids)
    else:
        mid_labels = np.array(mid_meas.labels, dtype=object)[indices[0]]
    return [RunRecord(int(system_id), world, pre_label, mid, post,
                      '{}/{}/{}'.format(seed, stream, system_id))
            for system_id, mid, post in zip(system_ids, mid_labels, post_labels)]


def simulate_runs(pre, mid_meas, post_meas, n, seed, pre_label='pre', system_ids=None):
    """Samples pre-selected systems through an optional mid and a post measurement.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state shared by all systems.
    mid_meas : SpectralMeasurement or None
        Intermediate measurement, None for no intermediate measurement.
    post_meas : SpectralMeasurement
        Post-selection observable.
    n : int
        Number of systems, ids 0 to n-1.
    seed : int
        Seed of the keyed generator.
    pre_label : str
        Label of the pre-selection outcome. Default: 'pre'.
    system_ids : array-like or None
        Simulate only these ids. Results agree with the corresponding
        records of a full run, which allows chunked execution.

    Returns
    -------
    list(RunRecord)
        Records of the 'actual' world sorted by system id.
    """
    system_ids = _check_protocol(pre, mid_meas, post_meas, n, system_ids)
    _LOGGER.info('simulating %s systems, seed=%s', len(system_ids), seed)
    return _simulate(pre, mid_meas, post_meas, system_ids, seed, ACTUAL, ACTUAL, pre_label)


class PairedRunSet(object):
    """Records of the same systems in an actual and a counterfactual world.

    Parameters
    ----------
    actual : list(RunRecord)
    counterfactual : list(RunRecord)
    coupling : str or None
        'independent' or 'common-random-numbers'. None marks records
        that were assigned by hand rather than sampled.
    """

    def __init__(self, actual, counterfactual, coupling):
        if coupling is not None and coupling not in COUPLINGS:
            raise ValueError('Unknown coupling {!r}; use one of {}'.format(coupling, COUPLINGS))
        actual = sorted(actual, key=lambda record: record.system_id)
        counterfactual = sorted(counterfactual, key=lambda record: record.system_id)
        if [r.system_id for r in actual] != [r.system_id for r in counterfactual]:
            raise ValueError('Both worlds must contain the same systems.')
        if [r.pre_outcome for r in actual] != [r.pre_outcome for r in counterfactual]:
            raise ValueError('Both worlds must share the pre-selection outcomes.')
        self.actual = actual
        self.counterfactual = counterfactual
        self.coupling = coupling

    @property
    def system_ids(self):
        """Sorted system ids."""
        return [record.system_id for record in self.actual]

    def __len__(self):
        return len(self.actual)

    def to_frame(self):
        """Records of both worlds, actual first."""
        return records_to_frame(self.actual + self.counterfactual)


def paired_worlds(pre, mid_actual, mid_counterfactual, post_meas, n, seed,
                  coupling=COMMON_RANDOM_NUMBERS, pre_label='pre', system_ids=None):
    """Simulates the same systems in an actual and a counterfactual world.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    mid_actual : SpectralMeasurement or None
        Intermediate measurement of the actual world.
    mid_counterfactual : SpectralMeasurement
        Intermediate measurement of the counterfactual world.
    post_meas : SpectralMeasurement
        Post-selection observable of both worlds.
    n : int
        Number of systems.
    seed : int
    coupling : str
        'common-random-numbers' (default) or 'independent'.

    Returns
    -------
    PairedRunSet
        Under common random numbers, a counterfactual measurement that
        commutes with post_meas keeps the post outcome of an actual
        world without intermediate measurement.
    """
    if coupling not in COUPLINGS:
        raise ValueError('Unknown coupling {!r}; use one of {}'.format(coupling, COUPLINGS))
    system_ids = _check_protocol(pre, mid_actual, post_meas, n, system_ids)
    _check_protocol(pre, mid_counterfactual, post_meas, n, system_ids)
    stream = ACTUAL if coupling == COMMON_RANDOM_NUMBERS else COUNTERFACTUAL
    _LOGGER.info('paired worlds: %s systems, seed=%s, coupling=%s',
                 len(system_ids), seed, coupling)
    actual = _simulate(pre, mid_actual, post_meas, system_ids, seed, ACTUAL, ACTUAL, pre_label)
    counterfactual = _simulate(pre, mid_counterfactual, post_meas, system_ids, seed,
                               COUNTERFACTUAL, stream, pre_label)
    return PairedRunSet(actual, counterfactual, coupling)


def fixed_systems(pairs, target_post):
    """Systems post-selected with target_post in both worlds.

    Parameters
    ----------
    pairs : PairedRunSet
    target_post : str
        Post-selection outcome.

    Returns
    -------
    FixedSet
        The fraction is relative to the systems with target_post in the
        actual world and None if there are none.
    """
    selected = [r.system_id for r in pairs.actual if r.post_outcome == target_post]
    counterfactual = set(r.system_id for r in pairs.counterfactual
                         if r.post_outcome == target_post)
    fixed = tuple(system_id for system_id in selected if system_id in counterfactual)
    fraction = float(len(fixed)) / len(selected) if selected else None
    return FixedSet(fixed, fraction, len(selected))


def records_to_frame(records):
    """RunRecords as a table with the columns system_id, world, pre, mid, post, seed_path."""
    return pd.DataFrame([list(record) for record in records], columns=RECORD_COLUMNS)


# ==========================================================
# exact enumeration of the sampling procedure

def _settle(world):
    """Applies leading measurements with a certain outcome."""
    state, remaining, outcomes = world
    while remaining:
        images, probs = _probabilities(state[None, :], _projector_stack(remaining[0]))
        if probs.max() < 1. - CERTAINTY_TOLERANCE:
            break
        index = int(np.argmax(probs[0]))
        state = images[0, index] / np.linalg.norm(images[0, index])
        outcomes = outcomes + (remaining[0].labels[index],)
        remaining = remaining[1:]
    return state, remaining, outcomes


def _enumerate(worlds, weight, result):
    worlds = [_settle(world) for world in worlds]
    active = [i for i, world in enumerate(worlds) if world[1]]
    if not active:
        key = tuple(world[2] for world in worlds)
        result[key] = result.get(key, 0.) + weight
        return
    branches = {}
    breakpoints = {0., 1.}
    for i in active:
        state, remaining, _ = worlds[i]
        images, probs = _probabilities(state[None, :], _projector_stack(remaining[0]))
        branches[i] = (images[0], probs[0])
        cumulative = np.cumsum(probs[0]) / probs[0].sum()
        breakpoints.update(float(value) for value in cumulative[:-1])
    edges = sorted(point for point in breakpoints if 0. <= point <= 1.)
    for low, high in zip(edges[:-1], edges[1:]):
        if high - low <= 0.:
            continue
        middle = np.array(.5 * (low + high))
        successors = list(worlds)
        for i in active:
            images, probs = branches[i]
            index = int(_inverse_cdf(probs, middle))
            _, remaining, outcomes = worlds[i]
            successors[i] = (images[index] / np.linalg.norm(images[index]), remaining[1:],
                             outcomes + (remaining[0].labels[index],))
        _enumerate(successors, weight * (high - low), result)


def _protocol_distribution(pre, protocols):
    orders = [_sampling_order(protocol) for protocol in protocols]
    result = {}
    _enumerate([(np.array(pre.amplitudes), tuple(protocol[index] for index in order), ())
                for protocol, order in zip(protocols, orders)], 1., result)
    restored = {}
    for key, weight in result.items():
        key = tuple(tuple(_restore_order(outcomes, order))
                    for outcomes, order in zip(key, orders))
        restored[key] = restored.get(key, 0.) + weight
    return restored


def joint_outcome_distribution(pre, protocol_a, protocol_b, coupling):
    """Exact joint outcome distribution of two worlds under a coupling.

    The enumeration follows the sampling procedure of
    :func:`paired_worlds`: shared uniforms are refined on all inverse
    CDF breakpoints. Monte Carlo frequencies converge to it.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state of both worlds.
    protocol_a, protocol_b : list(SpectralMeasurement)
        Measurements of each world in time order.
    coupling : str
        'independent' or 'common-random-numbers'.

    Returns
    -------
    OrderedDict
        Maps (outcomes_a, outcomes_b), tuples of labels, to probabilities.
    """
    if coupling == COMMON_RANDOM_NUMBERS:
        joint = _protocol_distribution(pre, [protocol_a, protocol_b])
    elif coupling == INDEPENDENT:
        first = _protocol_distribution(pre, [protocol_a])
        second = _protocol_distribution(pre, [protocol_b])
        joint = {(key_a[0], key_b[0]): weight_a * weight_b
                 for key_a, weight_a in first.items()
                 for key_b, weight_b in second.items()}
    else:
        raise ValueError('Unknown coupling {!r}; use one of {}'.format(coupling, COUPLINGS))
    return OrderedDict(sorted(joint.items()))


def expected_fixed_fraction(pre, mid_actual, mid_counterfactual, post_meas, target_post,
                            coupling):
    """Exact fixed fraction that :func:`fixed_systems` estimates.

    Returns
    -------
    float or None
        P(target in both worlds) / P(target in the actual world), None
        if the target cannot occur in the actual world.
    """
    post_meas.index(target_post)
    protocol_a = [meas for meas in (mid_actual, post_meas) if meas is not None]
    protocol_b = [mid_counterfactual, post_meas]
    joint = joint_outcome_distribution(pre, protocol_a, protocol_b, coupling)
    selected = sum(weight for (first, _), weight in joint.items() if first[-1] == target_post)
    both = sum(weight for (first, second), weight in joint.items()
               if first[-1] == target_post and second[-1] == target_post)
    if selected <= CERTAINTY_TOLERANCE:
        return None
    return both / selected


def expected_counts(pre, mid_meas, post_meas, n):
    """Statistically ideal counts of n systems per subensemble.

    Returns
    -------
    pandas.DataFrame
        Columns label, mid, post, weight, count in mixture order.
    """
    if mid_meas is None:
        mixture = mixture_M(pre, post_meas)
    else:
        mixture = mixture_Mprime(pre, mid_meas, post_meas)
    table = mixture.to_frame()
    table['count'] = table['weight'] * n
    return table


# ==========================================================
# frequency checks

GROUPINGS = ('post', 'mid', 'mid_post')


def _group_key(record, group_by):
    if group_by == 'post':
        return record.post_outcome
    if group_by == 'mid':
        return record.mid_outcome
    return '{},{}'.format(record.mid_outcome, record.post_outcome)


def theoretical_weights(pre, mid_meas, post_meas, group_by='post', given_post=None):
    """Theoretical group weights for :func:`frequency_report`.

    Parameters
    ----------
    group_by : str
        'post': eta weights (M weights without mid measurement),
        'mid': Born probabilities, or ABL probabilities if given_post is set,
        'mid_post': weights of the subensembles of M'.
    given_post : str or None
        Post outcome to condition on.

    Returns
    -------
    OrderedDict
        Group key to probability.
    """
    if group_by not in GROUPINGS:
        raise ValueError('group_by must be one of {}, got {!r}'.format(GROUPINGS, group_by))
    if group_by == 'post':
        if mid_meas is None:
            return OrderedDict((sub.post_outcome, sub.weight)
                               for sub in mixture_M(pre, post_meas))
        return eta_weights(mixture_Mprime(pre, mid_meas, post_meas))
    if mid_meas is None:
        raise ValueError('group_by={!r} requires an intermediate measurement'.format(group_by))
    if group_by == 'mid_post':
        return OrderedDict(('{},{}'.format(sub.mid_outcome, sub.post_outcome), sub.weight)
                           for sub in mixture_Mprime(pre, mid_meas, post_meas))
    if given_post is not None:
        return abl_distribution_projected(pre, post_meas.projector(given_post), mid_meas)
    return OrderedDict(zip(mid_meas.labels, mid_meas.probabilities(pre).tolist()))


def frequency_report(records, group_by, expected, given_post=None):
    """Empirical against theoretical group frequencies.

    Parameters
    ----------
    records : list(RunRecord)
        Records of one world.
    group_by : str
        'post', 'mid' or 'mid_post'.
    expected : dict
        Theoretical weight per group, e.g. from :func:`theoretical_weights`.
    given_post : str or None
        Only records with this post outcome are counted.

    Returns
    -------
    pandas.DataFrame
        Columns group, count, n, frequency, expected, zscore and pvalue
        with z = (frequency - expected) / sqrt(expected (1 - expected) / n).
    """
    if group_by not in GROUPINGS:
        raise ValueError('group_by must be one of {}, got {!r}'.format(GROUPINGS, group_by))
    if given_post is not None:
        records = [record for record in records if record.post_outcome == given_post]
    counts = OrderedDict((key, 0) for key in expected)
    for record in records:
        key = _group_key(record, group_by)
        counts[key] = counts.get(key, 0) + 1
    total = len(records)

    table = pd.DataFrame(OrderedDict([
        ('group', list(counts.keys())),
        ('count', list(counts.values())),
    ]))
    table['n'] = total
    table['frequency'] = table['count'] / total if total else np.nan
    table['expected'] = [float(expected.get(key, 0.)) for key in counts]
    with np.errstate(divide='ignore', invalid='ignore'):
        stderr = np.sqrt(table['expected'] * (1. - table['expected']) / total)
        deviation = table['frequency'] - table['expected']
        zscore = np.where(stderr > 0., deviation / stderr,
                          np.where(np.abs(deviation) <= CERTAINTY_TOLERANCE, 0.,
                                   np.sign(deviation) * np.inf))
    table['zscore'] = zscore
    table['pvalue'] = 2. * stats.norm.sf(np.abs(zscore))
    return table
