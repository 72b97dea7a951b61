import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.stats import unitary_group

from twostate.hilbert import DimensionMismatchError
from twostate.hilbert import NormalizationError
from twostate.hilbert import SpectralMeasurement
from twostate.hilbert import StateVector
from twostate.hilbert import axis
from twostate.hilbert import basis_state
from twostate.hilbert import box_measurement
from twostate.hilbert import coplanar_direction
from twostate.hilbert import rank_one_measurement
from twostate.hilbert import spin_measurement
from twostate.hilbert import spin_state
from twostate.tsvf import EvolutionSpec
from twostate.tsvf import TwoStateVector
from twostate.tsvf import UnknownOutcomeError
from twostate.tsvf import VanishingDenominatorError
from twostate.tsvf import abl_distribution
from twostate.tsvf import abl_distribution_projected
from twostate.tsvf import abl_probability
from twostate.tsvf import abl_weights
from twostate.tsvf import absorbed_measurement
from twostate.tsvf import evolve

from . import oracle


def _basis_measurement(basis):
    return SpectralMeasurement.from_states([StateVector(vector) for vector in basis],
                                           labels=[str(i) for i in range(len(basis))])


def test_abl_sharp_shanks_values():
    pre = spin_state(axis('z'))
    mid = spin_measurement(coplanar_direction(np.pi / 4), labels=('c1', 'c2'))
    post = spin_state(coplanar_direction(np.pi / 2))
    dist = abl_distribution(TwoStateVector(pre, post), mid)
    cos4 = np.cos(np.pi / 8)**4
    sin4 = np.sin(np.pi / 8)**4
    assert list(dist) == ['c1', 'c2']
    assert_allclose(dist['c1'], cos4 / (cos4 + sin4))
    assert_allclose(dist['c1'], 0.971404520791, atol=1e-12)
    assert_allclose(sum(dist.values()), 1.)


def test_abl_three_box():
    pre = StateVector.from_unnormalized([1., 1., 1.])
    post = StateVector.from_unnormalized([1., 1., -1.])
    tsv = TwoStateVector(pre, post)
    assert_allclose(abl_probability(tsv, box_measurement(3, 0), 'in'), 1.)
    assert_allclose(abl_probability(tsv, box_measurement(3, 1), 'in'), 1.)
    assert_allclose(abl_probability(tsv, box_measurement(3, 2), 'in'), 0.2)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2**31))
def test_abl_matches_rank_one_oracle(dim, seed):
    pre = oracle.random_state(dim, seed)
    post = oracle.random_state(dim, seed + 1)
    basis = oracle.random_basis(dim, seed)
    tsv = TwoStateVector(StateVector(pre), StateVector(post))
    dist = abl_distribution(tsv, _basis_measurement(basis))
    assert_allclose(list(dist.values()), oracle.abl_rank_one(pre, post, basis), atol=1e-10)
    assert abs(sum(dist.values()) - 1.) <= 1e-12
    assert all(value >= 0. for value in dist.values())


@settings(max_examples=1000, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=2**31))
def test_abl_time_reversal_symmetry(dim, seed):
    tsv = TwoStateVector(StateVector(oracle.random_state(dim, seed)),
                         StateVector(oracle.random_state(dim, seed + 7)))
    meas = _basis_measurement(oracle.random_basis(dim, seed + 3))
    for outcome in meas.labels:
        assert abs(abl_probability(tsv, meas, outcome)
                   - abl_probability(tsv.reversed(), meas, outcome)) <= 1e-12


def test_abl_identity_measurement():
    tsv = TwoStateVector(spin_state(axis('z')), spin_state(axis('x')))
    assert_allclose(abl_probability(tsv, SpectralMeasurement.identity(2), 'identity'), 1.)


def test_abl_repeated_measurement():
    # measuring the pre-selected observable again reproduces the pre-selection
    tsv = TwoStateVector(spin_state(axis('z')), spin_state(axis('x')))
    dist = abl_distribution(tsv, spin_measurement(axis('z')))
    assert_allclose(list(dist.values()), [1., 0.], atol=1e-15)


def test_abl_errors():
    pre = spin_state(axis('z'))
    tsv = TwoStateVector(pre, spin_state(axis('z'), up=False))
    with pytest.raises(VanishingDenominatorError):
        abl_distribution(tsv, spin_measurement(axis('z')))
    # vanishing denominators are arithmetic errors
    with pytest.raises(ArithmeticError):
        abl_probability(tsv, SpectralMeasurement.identity(2), 'identity')
    with pytest.raises(UnknownOutcomeError):
        abl_probability(TwoStateVector(pre, spin_state(axis('x'))), spin_measurement(axis('y')),
                        'sideways')
    with pytest.raises(DimensionMismatchError):
        TwoStateVector(pre, basis_state(3, 0))
    with pytest.raises(DimensionMismatchError):
        abl_distribution(TwoStateVector(pre, pre), box_measurement(3, 0))


def test_abl_projector_post_selection_reduces_to_rank_one():
    pre = StateVector.from_unnormalized([1., 2j, -1.])
    post = StateVector.from_unnormalized([1., 1., 1j])
    meas = box_measurement(3, 1)
    projector = rank_one_measurement(post).projector('selected')
    assert_allclose(list(abl_distribution_projected(pre, projector, meas).values()),
                    list(abl_distribution(TwoStateVector(pre, post), meas).values()),
                    atol=1e-12)
    assert_allclose(abl_weights(pre, projector, meas), abl_weights(pre, post, meas),
                    atol=1e-12)


def test_evolution_identity_is_noop():
    tsv = TwoStateVector(spin_state(axis('z')), spin_state(axis('x')))
    evolved = evolve(tsv, EvolutionSpec())
    assert evolved.pre.allclose(tsv.pre)
    assert evolved.post.allclose(tsv.post)


def test_evolution_rejects_non_unitary():
    with pytest.raises(NormalizationError):
        EvolutionSpec([[1., 1.], [0., 1.]])
    with pytest.raises(NormalizationError):
        EvolutionSpec(np.ones((2, 3)))
    with pytest.raises(DimensionMismatchError):
        EvolutionSpec(np.eye(3)).unitary(2)


def test_evolution_absorbed_into_measurement():
    unitary = unitary_group.rvs(3, random_state=11)
    evo = EvolutionSpec(unitary)
    pre = StateVector(oracle.random_state(3, 1))
    post = StateVector(oracle.random_state(3, 2))
    meas = box_measurement(3, 0)
    evolved = evolve(TwoStateVector(pre, post), evo)
    for projector, operator in zip(meas.projectors, absorbed_measurement(meas, evo)):
        assert_allclose(projector.sandwich(evolved.post, evolved.pre),
                        np.vdot(post.amplitudes, operator.dot(pre.amplitudes)), atol=1e-12)
    assert_allclose(evo.inverse().unitary(3).dot(unitary), np.eye(3), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**31))
def test_evolution_round_trip(dim, seed):
    evo = EvolutionSpec(unitary_group.rvs(dim, random_state=seed))
    tsv = TwoStateVector(StateVector(oracle.random_state(dim, seed)),
                         StateVector(oracle.random_state(dim, seed + 1)))
    restored = evolve(evolve(tsv, evo), evo.inverse())
    assert restored.pre.allclose(tsv.pre, tolerance=1e-12)
    assert restored.post.allclose(tsv.post, tolerance=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**31))
def test_evolved_distribution_equals_absorbed_distribution(dim, seed):
    evo = EvolutionSpec(unitary_group.rvs(dim, random_state=seed))
    pre = oracle.random_state(dim, seed + 1)
    post = oracle.random_state(dim, seed + 2)
    meas = _basis_measurement(oracle.random_basis(dim, seed + 3))
    evolved = abl_distribution(evolve(TwoStateVector(StateVector(pre), StateVector(post)), evo),
                               meas)
    weights = np.array([abs(np.vdot(post, operator.dot(pre)))**2
                        for operator in absorbed_measurement(meas, evo)])
    assert list(evolved.keys()) == meas.labels
    assert_allclose(list(evolved.values()), weights / weights.sum(), atol=1e-12)
