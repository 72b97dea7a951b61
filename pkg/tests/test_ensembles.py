import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from twostate.ensembles import NO_INTERMEDIATE
from twostate.ensembles import WITH_INTERMEDIATE
from twostate.ensembles import EnsembleMixture
from twostate.ensembles import Subensemble
from twostate.ensembles import born_probability
from twostate.ensembles import eta_weight
from twostate.ensembles import eta_weights
from twostate.ensembles import mixture_M
from twostate.ensembles import mixture_Mprime
from twostate.ensembles import ss_corrected_total
from twostate.ensembles import ss_counterfactual_total
from twostate.ensembles import ss_discrepancy
from twostate.hilbert import NormalizationError
from twostate.hilbert import Projector
from twostate.hilbert import SpectralMeasurement
from twostate.hilbert import StateVector
from twostate.hilbert import UnknownOutcomeError
from twostate.hilbert import axis
from twostate.hilbert import box_measurement
from twostate.hilbert import computational_measurement
from twostate.hilbert import coplanar_direction
from twostate.hilbert import spin_measurement
from twostate.hilbert import spin_state
from twostate.tsvf import TwoStateVector

from . import oracle


def _coplanar(theta_ac, theta_cb):
    pre = spin_state(axis('z'))
    mid = spin_measurement(coplanar_direction(theta_ac), labels=('c1', 'c2'), name='sigma_c')
    post = spin_measurement(coplanar_direction(theta_ac + theta_cb), labels=('b1', 'b2'),
                            name='sigma_b')
    return pre, mid, post


def _basis_measurement(basis, prefix):
    return SpectralMeasurement.from_states([StateVector(vector) for vector in basis],
                                           labels=[prefix + str(i) for i in range(len(basis))])


def _coarse_measurement(basis, groups, prefix):
    return SpectralMeasurement([
        (prefix + str(i), float(i), Projector.onto(*[StateVector(basis[k]) for k in group]))
        for i, group in enumerate(groups)])


def test_mixture_M_labels_and_weights():
    pre, _, post = _coplanar(np.pi / 4, np.pi / 4)
    mixture = mixture_M(pre, post)
    assert mixture.scenario == NO_INTERMEDIATE
    assert mixture.labels == ['E1', 'E2']
    assert mixture.post_outcomes == ['b1', 'b2']
    assert_allclose([sub.weight for sub in mixture], [.5, .5])
    assert mixture.subensembles[0].tsv.measured_observable == 'I'
    assert mixture.subensembles[0].mid_outcome is None


def test_mixture_Mprime_labels_and_weights():
    pre, mid, post = _coplanar(np.pi / 4, np.pi / 4)
    mixture = mixture_Mprime(pre, mid, post)
    assert mixture.scenario == WITH_INTERMEDIATE
    assert mixture.labels == ["E'_11", "E'_12", "E'_21", "E'_22"]
    cos2, sin2 = np.cos(np.pi / 8)**2, np.sin(np.pi / 8)**2
    assert_allclose([sub.weight for sub in mixture],
                    [cos2 * cos2, cos2 * sin2, sin2 * sin2, sin2 * cos2])
    assert mixture.subensembles[1].mid_outcome == 'c1'
    assert mixture.subensembles[1].post_outcome == 'b2'
    assert mixture.subensembles[0].tsv.measured_observable == 'sigma_c'
    assert_allclose(mixture.weight("E'_21"), sin2 * sin2)
    with pytest.raises(UnknownOutcomeError):
        mixture.weight("E'_33")


def test_large_mixture_labels_are_separated():
    pre = StateVector.from_unnormalized(np.ones(10))
    mixture = mixture_Mprime(pre, computational_measurement(10), computational_measurement(10))
    assert "E'_99" in mixture.labels
    assert "E'_10,10" in mixture.labels
    assert "E'_1,10" in mixture.labels
    assert len(mixture) == 100


def test_zero_weight_subensembles_are_kept():
    pre = spin_state(axis('z'))
    mixture = mixture_M(pre, spin_measurement(axis('z')))
    assert mixture.labels == ['E1', 'E2']
    assert_allclose([sub.weight for sub in mixture], [1., 0.])
    # the post state of an empty subensemble still is a valid state in its range
    assert_allclose(abs(mixture.subensembles[1].tsv.post.amplitudes[1]), 1.)


def test_eta_weights():
    pre, mid, post = _coplanar(np.pi / 4, np.pi / 4)
    mixture = mixture_Mprime(pre, mid, post)
    assert_allclose(eta_weight(mixture, 'b1'), .75)
    assert_allclose(list(eta_weights(mixture).values()), [.75, .25])
    with pytest.raises(ValueError):
        eta_weight(mixture_M(pre, post), 'b1')
    with pytest.raises(UnknownOutcomeError):
        eta_weight(mixture, 'b3')


def test_mixture_weights_must_sum_to_one():
    tsv = TwoStateVector(spin_state(axis('z')), spin_state(axis('x')))
    with pytest.raises(NormalizationError):
        EnsembleMixture(NO_INTERMEDIATE, [Subensemble('E1', tsv, .4, None, 'b1')])
    with pytest.raises(NormalizationError):
        Subensemble('E1', tsv, 1.5, None, 'b1')
    with pytest.raises(ValueError):
        EnsembleMixture('sometimes', [Subensemble('E1', tsv, 1., None, 'b1')])


def test_sharp_shanks_totals():
    pre, mid, post = _coplanar(np.pi / 4, np.pi / 4)
    assert_allclose(ss_counterfactual_total(pre, mid, post, 'c1'), 0.735702260396, atol=1e-11)
    assert_allclose(born_probability(pre, mid, 'c1'), 0.853553390593, atol=1e-11)
    assert_allclose(ss_corrected_total(pre, mid, post, 'c1'), 0.853553390593, atol=1e-11)
    assert_allclose(ss_discrepancy(pre, mid, post, 'c1'), -0.117851130197, atol=1e-11)


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0., max_value=np.pi), st.floats(min_value=0., max_value=np.pi))
def test_corrected_total_equals_born(theta_ac, theta_cb):
    pre, mid, post = _coplanar(theta_ac, theta_cb)
    for outcome in ('c1', 'c2'):
        assert abs(ss_corrected_total(pre, mid, post, outcome)
                   - born_probability(pre, mid, outcome)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**31))
def test_mixtures_match_oracle(dim, seed):
    pre = oracle.random_state(dim, seed)
    mid_basis = oracle.random_basis(dim, seed)
    post_basis = oracle.random_basis(dim, seed + 1)
    mid = _basis_measurement(mid_basis, 'c')
    post = _basis_measurement(post_basis, 'b')
    state = StateVector(pre)

    weights_m = [sub.weight for sub in mixture_M(state, post)]
    assert_allclose(weights_m, oracle.weights_M(pre, post_basis), atol=1e-12)
    assert abs(sum(weights_m) - 1.) <= 1e-12

    prime = mixture_Mprime(state, mid, post)
    assert_allclose([sub.weight for sub in prime],
                    oracle.weights_Mprime(pre, mid_basis, post_basis).ravel(), atol=1e-12)
    assert abs(sum(sub.weight for sub in prime) - 1.) <= 1e-12
    assert_allclose(ss_counterfactual_total(state, mid, post, 'c0'),
                    oracle.counterfactual_total(pre, mid_basis, post_basis, 0), atol=1e-10)
    assert abs(ss_corrected_total(state, mid, post, 'c0')
               - born_probability(state, mid, 'c0')) <= 1e-12


@settings(max_examples=1000, deadline=None)
@given(st.integers(min_value=2, max_value=5), st.integers(min_value=0, max_value=2**31))
def test_corrected_total_equals_born_with_degenerate_mid(dim, seed):
    pre = StateVector(oracle.random_state(dim, seed))
    mid = _coarse_measurement(oracle.random_basis(dim, seed), oracle.random_partition(dim, seed),
                              'c')
    post = _basis_measurement(oracle.random_basis(dim, seed + 1), 'b')
    assert any(projector.rank > 1 for projector in mid.projectors)
    for outcome in mid.labels:
        assert abs(ss_corrected_total(pre, mid, post, outcome)
                   - born_probability(pre, mid, outcome)) <= 1e-12


@pytest.mark.parametrize('theta', [0.3, 1., np.pi / 2, 2.5])
def test_discrepancy_vanishes_in_special_case(theta):
    # c along a
    pre, mid, post = _coplanar(0., theta)
    assert abs(ss_discrepancy(pre, mid, post, 'c1')) <= 1e-12
    # c along b
    pre, mid, post = _coplanar(theta, 0.)
    assert abs(ss_discrepancy(pre, mid, post, 'c1')) <= 1e-12


def test_mid_equal_post_collapses_to_M():
    pre, _, post = _coplanar(0., 1.2)
    prime = mixture_Mprime(pre, post, post)
    off_branch = [sub.weight for sub in prime if sub.mid_outcome[1] != sub.post_outcome[1]]
    assert_allclose(off_branch, 0., atol=1e-15)
    assert_allclose(list(eta_weights(prime).values()),
                    [sub.weight for sub in mixture_M(pre, post)], atol=1e-12)


def test_mixture_frame():
    pre = StateVector.from_unnormalized([1., 1., 1.])
    frame = mixture_Mprime(pre, box_measurement(3, 0), box_measurement(3, 2)).to_frame()
    assert list(frame.columns) == ['label', 'mid', 'post', 'weight']
    assert len(frame) == 4
    assert_allclose(frame['weight'].sum(), 1.)
