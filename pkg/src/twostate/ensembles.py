"""Pre- and post-selected ensembles.

This module builds the mixture M of post-selected subensembles that
arises without an intermediate measurement, the mixture M' that arises
with one, and the aggregates eta_k of M' sharing the post outcome b_k.
On top of those it evaluates the total probability of an intermediate
outcome composed from ABL probabilities in both ways.
"""

import logging
from collections import OrderedDict
from collections import namedtuple

import numpy as np
import pandas as pd

from twostate.hilbert import ALGEBRA_TOLERANCE
from twostate.hilbert import DimensionMismatchError
from twostate.hilbert import NormalizationError
from twostate.hilbert import StateVector
from twostate.hilbert import UnknownOutcomeError
from twostate.tsvf import DENOMINATOR_TOLERANCE
from twostate.tsvf import TwoStateVector
from twostate.tsvf import abl_distribution_projected

NO_INTERMEDIATE = 'no-intermediate'
WITH_INTERMEDIATE = 'with-intermediate'

_LOGGER = logging.getLogger('twostate.ensembles')


class Subensemble(namedtuple('Subensemble', ['label', 'tsv', 'weight',
                                             'mid_outcome', 'post_outcome'])):
    """Post-selected subensemble with its weight and two-state vector.

    Attributes
    ----------
    label : str
        E.g. 'E1' or "E'_12".
    tsv : TwoStateVector
        Boundary states of the subensemble, tagged with the
        intermediate observable.
    weight : float
        Fraction of the pre-selected systems in this subensemble.
    mid_outcome : str or None
        Intermediate outcome shared by its members, None for M.
    post_outcome : str
        Post-selection outcome shared by its members.
    """
    __slots__ = ()

    def __new__(cls, label, tsv, weight, mid_outcome=None, post_outcome=None):
        weight = float(weight)
        if not -ALGEBRA_TOLERANCE <= weight <= 1. + ALGEBRA_TOLERANCE:
            raise NormalizationError('Weight of {} outside [0, 1]: {!r}'.format(label, weight))
        weight = min(max(weight, 0.), 1.)
        return super(Subensemble, cls).__new__(cls, label, tsv, weight,
                                               mid_outcome, post_outcome)


class EnsembleMixture(object):
    """Mixture of post-selected subensembles.

    Parameters
    ----------
    scenario : str
        'no-intermediate' for M or 'with-intermediate' for M'.
    subensembles : list(Subensemble)
        Subensembles whose weights sum to one. Zero-weight members are
        kept so that labels do not depend on the configuration.
    """

    def __init__(self, scenario, subensembles, tolerance=ALGEBRA_TOLERANCE):
        if scenario not in (NO_INTERMEDIATE, WITH_INTERMEDIATE):
            raise ValueError('Unknown mixture scenario {!r}'.format(scenario))
        subensembles = tuple(subensembles)
        total = sum(sub.weight for sub in subensembles)
        if abs(total - 1.) > tolerance:
            raise NormalizationError('Mixture weights sum to {!r}, not 1'.format(total))
        self.scenario = scenario
        self._subensembles = subensembles

    @property
    def subensembles(self):
        """Subensembles in construction order."""
        return self._subensembles

    @property
    def labels(self):
        """Subensemble labels."""
        return [sub.label for sub in self._subensembles]

    @property
    def post_outcomes(self):
        """Distinct post-selection outcomes in order of appearance."""
        return list(OrderedDict.fromkeys(sub.post_outcome for sub in self._subensembles))

    def __iter__(self):
        return iter(self._subensembles)

    def __len__(self):
        return len(self._subensembles)

    def weight(self, label):
        """Weight of the subensemble with the given label."""
        for sub in self._subensembles:
            if sub.label == label:
                return sub.weight
        raise UnknownOutcomeError('No subensemble {!r} in {}'.format(label, self.labels))

    def post_weight(self, post_outcome):
        """Total weight of all subensembles with the given post outcome."""
        if post_outcome not in self.post_outcomes:
            raise UnknownOutcomeError('Unknown post outcome {!r}; available: {}'.format(
                post_outcome, self.post_outcomes))
        return float(sum(sub.weight for sub in self._subensembles
                         if sub.post_outcome == post_outcome))

    def to_frame(self):
        """Table with columns label, mid, post and weight."""
        return pd.DataFrame(OrderedDict([
            ('label', self.labels),
            ('mid', [sub.mid_outcome for sub in self._subensembles]),
            ('post', [sub.post_outcome for sub in self._subensembles]),
            ('weight', [sub.weight for sub in self._subensembles]),
        ]))


def _check_dims(pre, *measurements):
    for meas in measurements:
        if meas.dim != pre.dim:
            raise DimensionMismatchError('Measurement {} has dim={}, state has dim={}'.format(
                meas.name, meas.dim, pre.dim))


def _selected_state(image, projector):
    """Normalized image of a collapse, or a state in the range if it vanishes."""
    norm = np.linalg.norm(image)
    if norm > DENOMINATOR_TOLERANCE:
        return StateVector(image / norm)
    return projector.support_vector()


def _subensemble_label(prefix, *indices):
    if all(index < 9 for index in indices):
        return prefix + ''.join(str(index + 1) for index in indices)
    return prefix + ','.join(str(index + 1) for index in indices)


def mixture_M(pre, post_meas):  # pylint: disable=invalid-name
    """Mixture of post-selected subensembles without intermediate measurement.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    post_meas : SpectralMeasurement
        Post-selection observable.

    Returns
    -------
    EnsembleMixture
        One subensemble 'E<k>' per post outcome with weight <pre|P_k|pre>.
    """
    _check_dims(pre, post_meas)
    subensembles = []
    for k, outcome in enumerate(post_meas.outcomes):
        image = outcome.projector.apply(pre)
        post = _selected_state(image, outcome.projector)
        subensembles.append(Subensemble(_subensemble_label('E', k),
                                        TwoStateVector(pre, post, 'I'),
                                        np.vdot(image, image).real,
                                        None, outcome.label))
    return EnsembleMixture(NO_INTERMEDIATE, subensembles)


def mixture_Mprime(pre, mid_meas, post_meas):  # pylint: disable=invalid-name
    """Mixture of post-selected subensembles with an intermediate measurement.

    The subensemble E'_jk collects the systems that yield mid outcome j
    and post outcome k. Its weight ||P_k P_j pre||^2 follows from the
    sequential Born rule.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    mid_meas : SpectralMeasurement
        Intermediate measurement.
    post_meas : SpectralMeasurement
        Post-selection observable.

    Returns
    -------
    EnsembleMixture
    """
    _check_dims(pre, mid_meas, post_meas)
    subensembles = []
    for j, mid in enumerate(mid_meas.outcomes):
        mid_image = mid.projector.apply(pre)
        for k, post in enumerate(post_meas.outcomes):
            image = post.projector.matrix.dot(mid_image)
            post_state = _selected_state(image, post.projector)
            subensembles.append(Subensemble(_subensemble_label("E'_", j, k),
                                            TwoStateVector(pre, post_state, mid_meas.name),
                                            np.vdot(image, image).real,
                                            mid.label, post.label))
    return EnsembleMixture(WITH_INTERMEDIATE, subensembles)


def eta_weight(mixture, k):
    """Weight of the aggregate eta_k of M' subensembles with post outcome k.

    Parameters
    ----------
    mixture : EnsembleMixture
        Mixture M' from :func:`mixture_Mprime`.
    k : str
        Post outcome label.
    """
    if mixture.scenario != WITH_INTERMEDIATE:
        raise ValueError('eta weights are defined on the with-intermediate mixture.')
    return mixture.post_weight(k)


def eta_weights(mixture):
    """All eta weights keyed by post outcome."""
    return OrderedDict((k, eta_weight(mixture, k)) for k in mixture.post_outcomes)


def born_probability(pre, mid_meas, outcome):
    """Usual Born probability <pre|P_outcome|pre> of the intermediate outcome."""
    _check_dims(pre, mid_meas)
    return mid_meas.projector(outcome).expectation(pre)


def _composed_total(pre, mid_meas, post_meas, outcome, weights):
    mid_meas.index(outcome)
    total = 0.
    for post, weight in zip(post_meas.outcomes, weights):
        if weight <= DENOMINATOR_TOLERANCE:
            # ensembles that never occur do not contribute
            continue
        abl = abl_distribution_projected(pre, post.projector, mid_meas)[outcome]
        total += abl * weight
    return float(total)


def ss_counterfactual_total(pre, mid_meas, post_meas, outcome):
    """Total probability of a mid outcome composed over the mixture M.

    This is the counterfactual reading: ABL probabilities of the
    unperformed measurement weighted by the subensembles that arise
    without it, sum_k ABL(outcome | pre, b_k) |<b_k|pre>|^2.

    Raises
    ------
    VanishingDenominatorError
        If an occurring post outcome is impossible once the
        intermediate measurement is performed.
    """
    _check_dims(pre, mid_meas, post_meas)
    weights = [sub.weight for sub in mixture_M(pre, post_meas)]
    return _composed_total(pre, mid_meas, post_meas, outcome, weights)


def ss_corrected_total(pre, mid_meas, post_meas, outcome):
    """Total probability of a mid outcome composed over the eta aggregates.

    The eta weights are the weights of the post outcomes when the
    intermediate measurement is performed. The result equals
    :func:`born_probability`.
    """
    _check_dims(pre, mid_meas, post_meas)
    weights = list(eta_weights(mixture_Mprime(pre, mid_meas, post_meas)).values())
    return _composed_total(pre, mid_meas, post_meas, outcome, weights)


def ss_discrepancy(pre, mid_meas, post_meas, outcome):
    """Signed difference between the counterfactual total and the Born probability."""
    discrepancy = (ss_counterfactual_total(pre, mid_meas, post_meas, outcome)
                   - born_probability(pre, mid_meas, outcome))
    _LOGGER.debug('discrepancy for %s=%s: %s', mid_meas.name, outcome, discrepancy)
    return discrepancy
