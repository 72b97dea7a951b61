"""Validity checks for the counterfactual reading of ABL probabilities.

Three checks are provided:

* the closest-world weight condition, which compares the weight of each
  subensemble of M with the weight of the matching eta aggregate of M',
* the consistency condition, which requires
  Re{<post|P_a|pre><pre|P_b|post>} = 0 for all pairs a != b of
  intermediate outcomes,
* a detector for the special case of an intermediate observable that
  commutes with the pre- or post-selection observable.

:func:`counterfactual_verdict` bundles them. The counterfactual reading
is licensed iff the consistency condition holds.
"""

import itertools
import logging
from collections import OrderedDict
from collections import namedtuple

import numpy as np
import pandas as pd

from twostate.ensembles import eta_weights
from twostate.ensembles import mixture_M
from twostate.ensembles import mixture_Mprime
from twostate.ensembles import ss_discrepancy
from twostate.hilbert import ALGEBRA_TOLERANCE
from twostate.hilbert import DimensionMismatchError
from twostate.hilbert import Projector
from twostate.hilbert import rank_one_measurement
from twostate.tsvf import abl_distribution_projected

CONDITION_TOLERANCE = 1e-10

_LOGGER = logging.getLogger('twostate.counterfactual')

WeightRow = namedtuple('WeightRow', ['post_outcome', 'weight_M', 'weight_eta', 'delta'])
PairValue = namedtuple('PairValue', ['alpha', 'beta', 'value'])
SpecialCase = namedtuple('SpecialCase', ['flag', 'reason'])


class WeightConditionReport(namedtuple('WeightConditionReport',
                                       ['rows', 'tolerance', 'satisfied'])):
    """Outcome-by-outcome comparison of M weights and eta weights.

    Attributes
    ----------
    rows : tuple(WeightRow)
        One row per post outcome with delta = weight_M - weight_eta.
    tolerance : float
    satisfied : boolean
        True iff max |delta| <= tolerance.
    """
    __slots__ = ()

    @property
    def max_delta(self):
        """Largest absolute delta."""
        return max(abs(row.delta) for row in self.rows)

    def to_frame(self):
        """Rows as a pandas.DataFrame."""
        return pd.DataFrame([row._asdict() for row in self.rows],
                            columns=list(WeightRow._fields))


class ConsistencyReport(namedtuple('ConsistencyReport', ['pairs', 'tolerance', 'satisfied'])):
    """Pair values of the consistency condition.

    Attributes
    ----------
    pairs : tuple(PairValue)
        One entry per unordered pair of distinct intermediate outcomes.
    tolerance : float
    satisfied : boolean
        True iff every |value| <= tolerance.
    """
    __slots__ = ()

    @property
    def max_value(self):
        """Largest absolute pair value, 0 for single-outcome measurements."""
        return max([abs(pair.value) for pair in self.pairs] or [0.])

    def to_frame(self):
        """Pairs as a pandas.DataFrame."""
        return pd.DataFrame([pair._asdict() for pair in self.pairs],
                            columns=list(PairValue._fields))


Verdict = namedtuple('Verdict', ['licensed', 'mid_outcome', 'post_outcome', 'abl',
                                 'weight_condition', 'consistency',
                                 'consistent_for_all_post_outcomes',
                                 'special_case', 'discrepancy'])
Verdict.__doc__ = """Aggregated validity report for one pre/post selection.

The counterfactual ABL reading is :code:`licensed` iff the consistency
condition holds for the selected post outcome.
"""


def _check_dims(pre, *measurements):
    for meas in measurements:
        if meas.dim != pre.dim:
            raise DimensionMismatchError('Measurement {} has dim={}, state has dim={}'.format(
                meas.name, meas.dim, pre.dim))


def weight_condition(pre, mid_meas, post_meas, tolerance=CONDITION_TOLERANCE):
    """Closest-world weight condition.

    For each post outcome b_k the weight of the subensemble E_k of M
    must equal the weight of eta_k, the systems of M' sharing b_k.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    mid_meas : SpectralMeasurement
        Counterfactually measured observable.
    post_meas : SpectralMeasurement
        Post-selection observable.
    tolerance : float
        Default: 1e-10.

    Returns
    -------
    WeightConditionReport
    """
    _check_dims(pre, mid_meas, post_meas)
    weights_m = OrderedDict((sub.post_outcome, sub.weight) for sub in mixture_M(pre, post_meas))
    weights_eta = eta_weights(mixture_Mprime(pre, mid_meas, post_meas))
    rows = tuple(WeightRow(label, weights_m[label], weights_eta[label],
                           weights_m[label] - weights_eta[label])
                 for label in post_meas.labels)
    satisfied = max(abs(row.delta) for row in rows) <= tolerance
    return WeightConditionReport(rows, tolerance, satisfied)


def _pair_value(pre, alpha, beta, post):
    if isinstance(post, Projector):
        value = np.vdot(beta.apply(pre), post.matrix.dot(alpha.apply(pre)))
    else:
        value = alpha.sandwich(post, pre) * np.conj(beta.sandwich(post, pre))
    return float(np.real(value))


def consistency_condition(pre, mid_meas, post, tolerance=CONDITION_TOLERANCE):
    """Consistency condition for a pre/post selection.

    Evaluates Re{<post|P_a|pre><pre|P_b|post>} for every unordered
    pair a != b of intermediate outcomes.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    mid_meas : SpectralMeasurement
        Intermediate observable.
    post : StateVector or Projector
        Post-selected state. A projector Q stands for a degenerate
        post-selection; the pair values are then Re<pre|P_b Q P_a|pre>.
    tolerance : float
        Default: 1e-10.

    Returns
    -------
    ConsistencyReport
    """
    _check_dims(pre, mid_meas)
    if post.dim != pre.dim:
        raise DimensionMismatchError('post dim={} vs pre dim={}'.format(post.dim, pre.dim))
    pairs = tuple(PairValue(alpha.label, beta.label,
                            _pair_value(pre, alpha.projector, beta.projector, post))
                  for alpha, beta in itertools.combinations(mid_meas.outcomes, 2))
    satisfied = all(abs(pair.value) <= tolerance for pair in pairs)
    return ConsistencyReport(pairs, tolerance, satisfied)


def offdiagonal_weight(pre, mid_meas, post):
    """Sum of Re<pre|P_b Q P_a|pre> over all ordered pairs a != b.

    This is exactly weight_M - weight_eta for the post outcome with
    projector Q, so the weight condition holds iff it vanishes for
    every post outcome.
    """
    report = consistency_condition(pre, mid_meas, post)
    return 2. * sum(pair.value for pair in report.pairs)


def special_case_detector(pre_meas, mid_meas, post_meas, tolerance=ALGEBRA_TOLERANCE):
    """Detects an intermediate observable sharing an eigenbasis with pre or post.

    Parameters
    ----------
    pre_meas, mid_meas, post_meas : SpectralMeasurement
        Pre-selection, intermediate and post-selection observables.

    Returns
    -------
    SpecialCase
        :code:`(flag, reason)`.
    """
    if not pre_meas.dim == mid_meas.dim == post_meas.dim:
        return SpecialCase(False, 'dimension mismatch')
    with_pre = mid_meas.commutes_with(pre_meas, tolerance)
    with_post = mid_meas.commutes_with(post_meas, tolerance)
    if with_pre and with_post:
        return SpecialCase(True, 'commutes with pre- and post-selection observables')
    if with_pre:
        return SpecialCase(True, 'commutes with pre-selection observable')
    if with_post:
        return SpecialCase(True, 'commutes with post-selection observable')
    return SpecialCase(False, 'commutes with neither pre- nor post-selection observable')


def counterfactual_verdict(pre, mid_meas, post_meas, post_outcome, mid_outcome=None,
                           pre_meas=None, tolerance=CONDITION_TOLERANCE):
    """Bundles all validity checks for one pre/post selection.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    mid_meas : SpectralMeasurement
        Counterfactually measured observable.
    post_meas : SpectralMeasurement
        Post-selection observable.
    post_outcome : str
        Post outcome that selects the two-state vector.
    mid_outcome : str or None
        Intermediate outcome whose discrepancy is reported. Defaults
        to the first declared outcome.
    pre_meas : SpectralMeasurement or None
        Pre-selection observable for the special case detector.
        Defaults to {|pre><pre|, I - |pre><pre|}.
    tolerance : float
        Default: 1e-10.

    Returns
    -------
    Verdict
    """
    _check_dims(pre, mid_meas, post_meas)
    if mid_outcome is None:
        mid_outcome = mid_meas.labels[0]
    mid_meas.index(mid_outcome)
    if pre_meas is None:
        pre_meas = rank_one_measurement(pre)
    post_projector = post_meas.projector(post_outcome)

    consistency = consistency_condition(pre, mid_meas, post_projector, tolerance)
    consistent_all = all(consistency_condition(pre, mid_meas, projector, tolerance).satisfied
                         for projector in post_meas.projectors)
    verdict = Verdict(licensed=consistency.satisfied,
                      mid_outcome=mid_outcome,
                      post_outcome=post_outcome,
                      abl=abl_distribution_projected(pre, post_projector, mid_meas),
                      weight_condition=weight_condition(pre, mid_meas, post_meas, tolerance),
                      consistency=consistency,
                      consistent_for_all_post_outcomes=consistent_all,
                      special_case=special_case_detector(pre_meas, mid_meas, post_meas),
                      discrepancy=ss_discrepancy(pre, mid_meas, post_meas, mid_outcome))
    _LOGGER.info('verdict for %s given %s: licensed=%s', mid_meas.name, post_outcome,
                 verdict.licensed)
    return verdict
