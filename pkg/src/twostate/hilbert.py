"""Dense linear algebra for small Hilbert spaces.

This module contains state vectors, projectors, spectral measurements
and the spin-1/2 and box constructors used throughout twostate.
All objects are immutable after construction.
"""

import logging
from collections import namedtuple

import numpy as np

ALGEBRA_TOLERANCE = 1e-12

_LOGGER = logging.getLogger('twostate.hilbert')


class DimensionMismatchError(ValueError):
    """Raised when objects of different Hilbert space dimension are combined."""


class NormalizationError(ValueError):
    """Raised when an object violates its algebraic invariants."""


class UnknownOutcomeError(KeyError, ValueError):
    """Raised for an outcome label a measurement does not declare."""


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


def _check_dims(*dims):
    if len(set(dims)) > 1:
        raise DimensionMismatchError(
            'Dimension mismatch: {}'.format(', '.join(str(d) for d in dims)))


class StateVector(object):
    """Normalized pure state over a finite basis.

    Parameters
    ----------
    amplitudes : array-like of complex
        Probability amplitudes. Their squared magnitudes must sum
        to one within :code:`tolerance`.
    tolerance : float
        Normalization tolerance. Default: 1e-12.

    Examples
    --------

    .. code-block:: python

      from twostate.hilbert import StateVector

      plus = StateVector([2**-.5, 2**-.5])
    """

    def __init__(self, amplitudes, tolerance=ALGEBRA_TOLERANCE):
        amplitudes = np.asarray(amplitudes, dtype=complex).ravel()
        if amplitudes.size == 0:
            raise NormalizationError('A state needs at least one amplitude.')
        if not np.all(np.isfinite(amplitudes)):
            raise NormalizationError('Amplitudes must be finite.')
        norm = np.sum(np.abs(amplitudes)**2)
        if abs(norm - 1.) > tolerance:
            raise NormalizationError(
                'State is not normalized: sum |amplitude|^2 = {!r}'.format(norm))
        self._amplitudes = _frozen(amplitudes)

    @classmethod
    def from_unnormalized(cls, amplitudes):
        """Creates a state by normalizing the given amplitudes."""
        amplitudes = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amplitudes)
        if not np.isfinite(norm) or norm <= ALGEBRA_TOLERANCE:
            raise NormalizationError('Cannot normalize a zero vector.')
        return cls(amplitudes / norm)

    @property
    def dim(self):
        """Hilbert space dimension."""
        return self._amplitudes.shape[0]

    @property
    def amplitudes(self):
        """Read-only amplitude array."""
        return self._amplitudes

    def __len__(self):
        return self.dim

    def __repr__(self):  # pragma: no cover
        return 'StateVector({})'.format(np.array2string(self._amplitudes, precision=6))

    def allclose(self, other, tolerance=ALGEBRA_TOLERANCE):
        """Amplitude-wise comparison. Global phases are not ignored."""
        _check_dims(self.dim, other.dim)
        return np.allclose(self._amplitudes, other.amplitudes, rtol=0., atol=tolerance)


def basis_state(dim, index):
    """Computational basis vector e_index of a dim-dimensional space."""
    if not 0 <= index < dim:
        raise ValueError('Basis index {} out of range for dim={}'.format(index, dim))
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[index] = 1.
    return StateVector(amplitudes)


def inner_product(x, y):
    """Inner product <x|y>, conjugating x.

    Parameters
    ----------
    x : StateVector
        Bra state.
    y : StateVector
        Ket state.

    Returns
    -------
    complex
        Probability amplitude <x|y>.
    """
    _check_dims(x.dim, y.dim)
    return complex(np.vdot(x.amplitudes, y.amplitudes))


class Projector(object):
    """Orthogonal projector on a finite dimensional Hilbert space.

    Parameters
    ----------
    matrix : array-like
        Square complex matrix that must be Hermitian and idempotent
        within :code:`tolerance`.
    tolerance : float
        Default: 1e-12.
    """

    def __init__(self, matrix, tolerance=ALGEBRA_TOLERANCE):
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise NormalizationError(
                'Projector must be a square matrix, got shape {}'.format(matrix.shape))
        if not np.allclose(matrix, matrix.conj().T, rtol=0., atol=tolerance):
            raise NormalizationError('Projector is not Hermitian.')
        if not np.allclose(matrix.dot(matrix), matrix, rtol=0., atol=tolerance):
            raise NormalizationError('Projector is not idempotent.')
        self._matrix = _frozen(matrix)

    @classmethod
    def onto(cls, *states):
        """Projector onto the span of mutually orthonormal states."""
        _check_dims(*[state.dim for state in states])
        matrix = sum(np.outer(state.amplitudes, state.amplitudes.conj())
                     for state in states)
        return cls(matrix)

    @property
    def dim(self):
        """Hilbert space dimension."""
        return self._matrix.shape[0]

    @property
    def matrix(self):
        """Read-only matrix representation."""
        return self._matrix

    @property
    def rank(self):
        """Dimension of the projected subspace."""
        return int(round(np.trace(self._matrix).real))

    def apply(self, state):
        """Unnormalized image P|state> as an array."""
        _check_dims(self.dim, state.dim)
        return self._matrix.dot(state.amplitudes)

    def expectation(self, state):
        """<state|P|state>, the Born probability of this projector."""
        return float(np.vdot(state.amplitudes, self.apply(state)).real)

    def sandwich(self, bra, ket):
        """Amplitude <bra|P|ket>."""
        _check_dims(self.dim, bra.dim, ket.dim)
        return complex(np.vdot(bra.amplitudes, self.apply(ket)))

    def commutes_with(self, other, tolerance=ALGEBRA_TOLERANCE):
        """Checks [P, Q] = 0 elementwise within tolerance."""
        _check_dims(self.dim, other.dim)
        p, q = self._matrix, other.matrix
        return np.allclose(p.dot(q), q.dot(p), rtol=0., atol=tolerance)

    def conjugated(self, unitary):
        """Projector U P U^dagger."""
        unitary = np.asarray(unitary, dtype=complex)
        return Projector(unitary.dot(self._matrix).dot(unitary.conj().T))

    def support_vector(self):
        """Normalized column of largest norm, a state inside the range of P."""
        norms = np.linalg.norm(self._matrix, axis=0)
        return StateVector.from_unnormalized(self._matrix[:, int(np.argmax(norms))])


Outcome = namedtuple('Outcome', ['label', 'eigenvalue', 'projector'])


class SpectralMeasurement(object):
    """Observable given by its spectral decomposition.

    The outcomes are kept in the declared order. Sampling and
    report tables rely on that order.

    Parameters
    ----------
    outcomes : list(tuple)
        Sequence of :code:`(label, eigenvalue, projector)` triples.
        Projectors must be pairwise orthogonal and sum to the identity.
    name : str
        Name of the observable, e.g. 'sigma_c'. Default: 'O'.
    tolerance : float
        Default: 1e-12.
    """

    def __init__(self, outcomes, name='O', tolerance=ALGEBRA_TOLERANCE):
        outcomes = tuple(Outcome(str(label), float(eigenvalue), projector)
                         for label, eigenvalue, projector in outcomes)
        if not outcomes:
            raise NormalizationError('A measurement needs at least one outcome.')
        labels = [outcome.label for outcome in outcomes]
        if len(set(labels)) != len(labels):
            raise NormalizationError('Outcome labels must be unique: {}'.format(labels))
        _check_dims(*[outcome.projector.dim for outcome in outcomes])

        dim = outcomes[0].projector.dim
        for i, first in enumerate(outcomes):
            for second in outcomes[i + 1:]:
                if not np.allclose(first.projector.matrix.dot(second.projector.matrix), 0.,
                                   rtol=0., atol=tolerance):
                    raise NormalizationError(
                        'Projectors {} and {} are not orthogonal.'.format(first.label,
                                                                          second.label))
        total = sum(outcome.projector.matrix for outcome in outcomes)
        if not np.allclose(total, np.eye(dim), rtol=0., atol=tolerance):
            raise NormalizationError(
                'Projectors of {} do not sum to the identity.'.format(name))

        self._outcomes = outcomes
        self.name = name

    @classmethod
    def from_states(cls, states, labels, eigenvalues=None, name='O'):
        """Nondegenerate measurement in an orthonormal basis.

        Parameters
        ----------
        states : list(StateVector)
            Orthonormal basis.
        labels : list(str)
            One label per basis state.
        eigenvalues : list(float) or None
            Defaults to 0, 1, 2, ...
        """
        labels = list(labels)
        eigenvalues = list(range(len(states)) if eigenvalues is None else eigenvalues)
        if not len(states) == len(labels) == len(eigenvalues):
            raise ValueError('states, labels and eigenvalues differ in length.')
        return cls([(label, eigenvalue, Projector.onto(state))
                    for state, label, eigenvalue in zip(states, labels, eigenvalues)],
                   name=name)

    @classmethod
    def identity(cls, dim):
        """The trivial measurement I with the single outcome 'identity'."""
        return cls([('identity', 1., Projector(np.eye(dim)))], name='I')

    @property
    def dim(self):
        """Hilbert space dimension."""
        return self._outcomes[0].projector.dim

    @property
    def outcomes(self):
        """Ordered outcome triples."""
        return self._outcomes

    @property
    def labels(self):
        """Outcome labels in declared order."""
        return [outcome.label for outcome in self._outcomes]

    @property
    def projectors(self):
        """Projectors in declared order."""
        return [outcome.projector for outcome in self._outcomes]

    def __len__(self):
        return len(self._outcomes)

    def __contains__(self, label):
        return label in self.labels

    def index(self, label):
        """Position of an outcome label."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise UnknownOutcomeError('Unknown outcome {!r} of {}; available: {}'.format(
                label, self.name, self.labels))

    def projector(self, label):
        """Projector belonging to an outcome label."""
        return self._outcomes[self.index(label)].projector

    def probabilities(self, state):
        """Born probabilities <state|P_i|state> in declared order."""
        _check_dims(self.dim, state.dim)
        return np.array([projector.expectation(state) for projector in self.projectors])

    def commutes_with(self, other, tolerance=ALGEBRA_TOLERANCE):
        """True if every projector commutes with every projector of other."""
        return all(mine.commutes_with(theirs, tolerance)
                   for mine in self.projectors for theirs in other.projectors)

    def conjugated(self, unitary, name=None):
        """Measurement with projectors U P U^dagger."""
        return SpectralMeasurement(
            [(o.label, o.eigenvalue, o.projector.conjugated(unitary)) for o in self._outcomes],
            name=name or self.name)

    def __repr__(self):  # pragma: no cover
        return 'SpectralMeasurement({}, {})'.format(self.name, self.labels)


class BlochDirection(object):
    """Unit vector in three dimensional space.

    Parameters
    ----------
    vector : array-like
        Three real components of unit Euclidean norm.
    """

    def __init__(self, vector, tolerance=ALGEBRA_TOLERANCE):
        vector = np.asarray(vector, dtype=float).ravel()
        if vector.shape != (3,):
            raise NormalizationError('A direction needs 3 components, got {}'.format(vector.shape))
        if abs(np.linalg.norm(vector) - 1.) > tolerance:
            raise NormalizationError(
                'Direction is not a unit vector: |n| = {!r}'.format(np.linalg.norm(vector)))
        vector.flags.writeable = False
        self._vector = vector

    @classmethod
    def from_angles(cls, theta, phi=0.):
        """Direction with polar angle theta and azimuth phi (radians)."""
        return cls([np.sin(theta) * np.cos(phi),
                    np.sin(theta) * np.sin(phi),
                    np.cos(theta)])

    @property
    def vector(self):
        """Read-only Cartesian components."""
        return self._vector

    @property
    def theta(self):
        """Polar angle in [0, pi]."""
        return float(np.arccos(np.clip(self._vector[2], -1., 1.)))

    @property
    def phi(self):
        """Azimuth in (-pi, pi]; zero on the z-axis."""
        return float(np.arctan2(self._vector[1], self._vector[0]))

    def __repr__(self):  # pragma: no cover
        return 'BlochDirection({})'.format(self._vector.tolist())


AXES = {
    'x': (1., 0., 0.), '-x': (-1., 0., 0.),
    'y': (0., 1., 0.), '-y': (0., -1., 0.),
    'z': (0., 0., 1.), '-z': (0., 0., -1.),
}


def axis(name):
    """Named coordinate direction, one of x, y, z, -x, -y, -z."""
    try:
        return BlochDirection(AXES[name])
    except KeyError:
        raise ValueError('Unknown axis {!r}; use one of {}'.format(name, sorted(AXES)))


def coplanar_direction(theta):
    """Direction in the x-z plane at polar angle theta from z.

    Angles beyond pi are allowed and wrap around the plane.
    """
    return BlochDirection([np.sin(theta), 0., np.cos(theta)])


def spin_state(direction, up=True):
    """Eigenvector of n.sigma for eigenvalue +1 (up) or -1 (down).

    For polar angle theta and azimuth phi the up state is
    (cos(theta/2), exp(i phi) sin(theta/2)) and the down state is
    (-exp(-i phi) sin(theta/2), cos(theta/2)).

    Parameters
    ----------
    direction : BlochDirection
        Spin quantization axis.
    up : boolean
        Selects the +1 eigenvector. Default: True.

    Returns
    -------
    StateVector
    """
    if not isinstance(direction, BlochDirection):
        direction = BlochDirection(direction)
    theta, phi = direction.theta, direction.phi
    cos, sin = np.cos(theta / 2.), np.sin(theta / 2.)
    if up:
        return StateVector([cos, np.exp(1j * phi) * sin])
    return StateVector([-np.exp(-1j * phi) * sin, cos])


def spin_measurement(direction, labels=('up', 'down'), name=None):
    """Spin-1/2 measurement along a direction.

    Parameters
    ----------
    direction : BlochDirection
        Measurement axis.
    labels : tuple(str)
        Labels of the +1 and -1 outcomes. Default: ('up', 'down').
    name : str or None
        Observable name. Defaults to 'sigma(theta,phi)'.

    Returns
    -------
    SpectralMeasurement
        Two outcomes with eigenvalues +1 and -1.
    """
    if not isinstance(direction, BlochDirection):
        direction = BlochDirection(direction)
    if name is None:
        name = 'sigma({:.6g},{:.6g})'.format(direction.theta, direction.phi)
    return SpectralMeasurement.from_states(
        [spin_state(direction, up=True), spin_state(direction, up=False)],
        labels=list(labels), eigenvalues=[1., -1.], name=name)


def box_measurement(dim, box, name=None):
    """Search measurement {P_box, I - P_box} of a particle in dim boxes.

    Parameters
    ----------
    dim : int
        Number of boxes.
    box : int
        Index of the searched box.

    Returns
    -------
    SpectralMeasurement
        Outcome 'in' (eigenvalue 1, rank 1) and 'out' (eigenvalue 0, rank dim-1).
    """
    if not 0 <= box < dim:
        raise ValueError('Box index {} out of range for dim={}'.format(box, dim))
    inside = Projector.onto(basis_state(dim, box))
    outside = Projector(np.eye(dim) - inside.matrix)
    return SpectralMeasurement([('in', 1., inside), ('out', 0., outside)],
                               name=name or 'box{}'.format(box))


def computational_measurement(dim, name='basis'):
    """Nondegenerate measurement in the computational basis, labels '0', '1', ..."""
    return SpectralMeasurement.from_states([basis_state(dim, i) for i in range(dim)],
                                           labels=[str(i) for i in range(dim)],
                                           name=name)


def rank_one_measurement(state, labels=('selected', 'rejected'), name=None):
    """Two-outcome measurement {|s><s|, I - |s><s|} selecting a state.

    This serves as the pre- or post-selection observable of an
    arbitrary state. The complement is degenerate for dim > 2.
    """
    selected = Projector.onto(state)
    rejected = Projector(np.eye(state.dim) - selected.matrix)
    _LOGGER.debug('rank one measurement of dimension %s', state.dim)
    return SpectralMeasurement([(labels[0], 1., selected), (labels[1], 0., rejected)],
                               name=name or 'select')
