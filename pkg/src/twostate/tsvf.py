"""Two-state vectors and the ABL rule.

The ABL probability of outcome j of an intermediate measurement,
given pre-selection |pre> and post-selection <post|, is

    |<post|P_j|pre>|^2 / sum_i |<post|P_i|pre>|^2

which is the rank-1 formula |<b|c_j>|^2 |<c_j|a>|^2 / sum(...) for
nondegenerate measurements.
"""

import logging
from collections import OrderedDict

import numpy as np

from twostate.hilbert import ALGEBRA_TOLERANCE
from twostate.hilbert import DimensionMismatchError
from twostate.hilbert import NormalizationError
from twostate.hilbert import Projector
from twostate.hilbert import StateVector
from twostate.hilbert import UnknownOutcomeError  # noqa

DENOMINATOR_TOLERANCE = 1e-15

_LOGGER = logging.getLogger('twostate.tsvf')


class VanishingDenominatorError(ArithmeticError):
    """The pre/post pair is impossible given the intermediate measurement."""


class TwoStateVector(object):
    """Pre-selected state evolving forward and post-selected state evolving backward.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    post : StateVector
        Post-selected state.
    measured_observable : str or None
        Name of the observable measured between the boundary times,
        e.g. 'I' when no measurement took place. Default: None.
    """

    def __init__(self, pre, post, measured_observable=None):
        if pre.dim != post.dim:
            raise DimensionMismatchError(
                'pre (dim={}) and post (dim={}) differ in dimension'.format(pre.dim, post.dim))
        self._pre = pre
        self._post = post
        self._measured = measured_observable

    @property
    def pre(self):
        """Pre-selected state."""
        return self._pre

    @property
    def post(self):
        """Post-selected state."""
        return self._post

    @property
    def measured_observable(self):
        """Label of the intermediate observable, if any."""
        return self._measured

    @property
    def dim(self):
        """Hilbert space dimension."""
        return self._pre.dim

    def reversed(self):
        """Time-reversed two-state vector with pre and post exchanged."""
        return TwoStateVector(self._post, self._pre, self._measured)

    def __repr__(self):  # pragma: no cover
        return 'TwoStateVector(pre={!r}, post={!r}, measured={!r})'.format(
            self._pre, self._post, self._measured)


class EvolutionSpec(object):
    """Unitary evolution between a boundary time and the measurement time.

    Parameters
    ----------
    forward_unitary : array-like or None
        Square unitary matrix. None stands for the zero Hamiltonian,
        i.e. the identity. Default: None.
    """

    def __init__(self, forward_unitary=None, tolerance=ALGEBRA_TOLERANCE):
        if forward_unitary is not None:
            forward_unitary = np.array(forward_unitary, dtype=complex)
            if forward_unitary.ndim != 2 or forward_unitary.shape[0] != forward_unitary.shape[1]:
                raise NormalizationError('Unitary must be square, got shape {}'.format(
                    forward_unitary.shape))
            identity = np.eye(forward_unitary.shape[0])
            if not np.allclose(forward_unitary.conj().T.dot(forward_unitary), identity,
                               rtol=0., atol=tolerance):
                raise NormalizationError('forward_unitary is not unitary.')
            forward_unitary.flags.writeable = False
        self._unitary = forward_unitary

    @property
    def forward_unitary(self):
        """The unitary, or None for the identity."""
        return self._unitary

    def unitary(self, dim):
        """Unitary matrix for the given dimension."""
        if self._unitary is None:
            return np.eye(dim, dtype=complex)
        if self._unitary.shape[0] != dim:
            raise DimensionMismatchError(
                'Evolution of dim={} applied to dim={}'.format(self._unitary.shape[0], dim))
        return self._unitary

    def inverse(self):
        """Evolution by U^dagger."""
        if self._unitary is None:
            return EvolutionSpec()
        return EvolutionSpec(self._unitary.conj().T)


def evolve(tsv, evo):
    """Propagates both boundary states to the measurement time.

    The pre-state is mapped forward by U, the post-state backward by
    U^dagger, so that <post(t)|X|pre(t)> = <post|U X U|pre>.

    Parameters
    ----------
    tsv : TwoStateVector
    evo : EvolutionSpec

    Returns
    -------
    TwoStateVector
    """
    unitary = evo.unitary(tsv.dim)
    pre = StateVector(unitary.dot(tsv.pre.amplitudes))
    post = StateVector(unitary.conj().T.dot(tsv.post.amplitudes))
    return TwoStateVector(pre, post, tsv.measured_observable)


def _check_measurement(dim, meas):
    if meas.dim != dim:
        raise DimensionMismatchError(
            'Measurement {} has dim={}, states have dim={}'.format(meas.name, meas.dim, dim))


def abl_weights(pre, post, meas):
    """Unnormalized ABL weights of all outcomes in declared order.

    Parameters
    ----------
    pre : StateVector
        Pre-selected state.
    post : StateVector or Projector
        Post-selected state, or the projector of a (possibly
        degenerate) post-selection outcome. For a projector Q the
        weights are ||Q P_i pre||^2.
    meas : SpectralMeasurement
        Intermediate measurement.

    Returns
    -------
    numpy.ndarray
        Non-negative weights.
    """
    _check_measurement(pre.dim, meas)
    if isinstance(post, Projector):
        if post.dim != pre.dim:
            raise DimensionMismatchError('post projector dim={} vs pre dim={}'.format(
                post.dim, pre.dim))
        images = [post.matrix.dot(projector.apply(pre)) for projector in meas.projectors]
        return np.array([np.vdot(image, image).real for image in images])
    if post.dim != pre.dim:
        raise DimensionMismatchError('post dim={} vs pre dim={}'.format(post.dim, pre.dim))
    return np.array([abs(projector.sandwich(post, pre))**2 for projector in meas.projectors])


def _normalize(weights, meas):
    total = weights.sum()
    if total <= DENOMINATOR_TOLERANCE:
        raise VanishingDenominatorError(
            'ABL denominator {!r} vanishes for measurement {}: the post-selection '
            'cannot occur with this intermediate measurement.'.format(total, meas.name))
    return weights / total


def abl_distribution_projected(pre, post, meas):
    """ABL distribution for a state or projector post-selection.

    See :func:`abl_weights` for the meaning of :code:`post`.

    Returns
    -------
    OrderedDict
        Outcome label to probability, in declared order.
    """
    probs = _normalize(abl_weights(pre, post, meas), meas)
    return OrderedDict(zip(meas.labels, [float(p) for p in probs]))


def abl_distribution(tsv, meas):
    """ABL probabilities of all outcomes of an intermediate measurement.

    Parameters
    ----------
    tsv : TwoStateVector
        Pre- and post-selection.
    meas : SpectralMeasurement
        Intermediate measurement.

    Returns
    -------
    OrderedDict
        Outcome label to probability, in the measurement's declared order.
        The probabilities sum to one.

    Examples
    --------

    .. code-block:: python

      from twostate.hilbert import axis, spin_measurement, spin_state
      from twostate.tsvf import TwoStateVector, abl_distribution

      tsv = TwoStateVector(spin_state(axis('z')), spin_state(axis('x')))
      abl_distribution(tsv, spin_measurement(axis('y')))
    """
    return abl_distribution_projected(tsv.pre, tsv.post, meas)


def abl_probability(tsv, meas, outcome):
    """ABL probability of a single outcome.

    Raises
    ------
    UnknownOutcomeError
        If :code:`outcome` is not a label of :code:`meas`.
    VanishingDenominatorError
        If no outcome is compatible with the pre- and post-selection.
    """
    index = meas.index(outcome)
    probs = _normalize(abl_weights(tsv.pre, tsv.post, meas), meas)
    _LOGGER.debug('ABL(%s | %s) = %s', outcome, meas.name, probs[index])
    return float(probs[index])


def absorbed_measurement(meas, evo):
    """Measurement seen from the boundary states when U is absorbed.

    Returns the list of operators U P_i U whose sandwiches with the
    unevolved boundary states equal those of P_i with the evolved ones.
    The operators are in general not projectors.
    """
    unitary = evo.unitary(meas.dim)
    return [unitary.dot(projector.matrix).dot(unitary) for projector in meas.projectors]

