import numpy as np
import pytest
from numpy.testing import assert_allclose
from numpy.testing import assert_equal

from twostate.hilbert import StateVector
from twostate.hilbert import axis
from twostate.hilbert import box_measurement
from twostate.hilbert import computational_measurement
from twostate.hilbert import coplanar_direction
from twostate.hilbert import rank_one_measurement
from twostate.hilbert import spin_measurement
from twostate.hilbert import spin_state
from twostate.montecarlo import COMMON_RANDOM_NUMBERS
from twostate.montecarlo import INDEPENDENT
from twostate.montecarlo import RECORD_COLUMNS
from twostate.montecarlo import PairedRunSet
from twostate.montecarlo import RunRecord
from twostate.montecarlo import expected_counts
from twostate.montecarlo import expected_fixed_fraction
from twostate.montecarlo import fixed_systems
from twostate.montecarlo import frequency_report
from twostate.montecarlo import joint_outcome_distribution
from twostate.montecarlo import keyed_uniforms
from twostate.montecarlo import paired_worlds
from twostate.montecarlo import records_to_frame
from twostate.montecarlo import simulate_runs
from twostate.montecarlo import theoretical_weights
from twostate.scenarios import figure_four_illustration


def _figure_four(theta=np.pi / 2, phi=np.pi / 3):
    pre = spin_state(axis('z'))
    post = spin_measurement(axis('z'), labels=('z1', 'z2'))
    actual = spin_measurement(coplanar_direction(theta), labels=('theta1', 'theta2'))
    counterfactual = spin_measurement(coplanar_direction(phi), labels=('phi1', 'phi2'))
    return pre, actual, counterfactual, post


def test_keyed_uniforms_do_not_depend_on_chunking():
    full = keyed_uniforms(42, 'actual', 0, np.arange(50))
    assert_equal(keyed_uniforms(42, 'actual', 0, [17, 3]), full[[17, 3]])
    assert_equal(keyed_uniforms(42, 'actual', 0, np.arange(25, 50)), full[25:])
    assert np.all((full >= 0.) & (full < 1.))


def test_keyed_uniforms_are_separated_by_key():
    base = keyed_uniforms(1, 'actual', 0, np.arange(8))
    assert not np.allclose(base, keyed_uniforms(2, 'actual', 0, np.arange(8)))
    assert not np.allclose(base, keyed_uniforms(1, 'counterfactual', 0, np.arange(8)))
    assert not np.allclose(base, keyed_uniforms(1, 'actual', 1, np.arange(8)))
    with pytest.raises(ValueError):
        keyed_uniforms(-1, 'actual', 0, [0])
    with pytest.raises(ValueError):
        keyed_uniforms(1, 'actual', 0, [-3])


def test_simulate_runs_is_reproducible():
    pre, actual, _, post = _figure_four()
    first = simulate_runs(pre, actual, post, 200, seed=9)
    second = simulate_runs(pre, actual, post, 200, seed=9)
    assert first == second
    assert [r.system_id for r in first] == list(range(200))
    assert first[5].seed_path == '9/actual/5'
    assert first[5].world == 'actual'
    assert first[5].pre_outcome == 'pre'

    chunk = simulate_runs(pre, actual, post, None, seed=9, system_ids=range(120, 200))
    assert chunk == first[120:]
    assert simulate_runs(pre, actual, post, 200, seed=10) != first


def test_simulate_runs_without_mid_measurement():
    pre, _, _, post = _figure_four()
    records = simulate_runs(pre, None, post, 20, seed=1)
    assert all(record.mid_outcome is None for record in records)
    # pre-selected up along z never flips without intermediate measurement
    assert all(record.post_outcome == 'z1' for record in records)


def test_simulate_runs_input_errors():
    pre, actual, _, post = _figure_four()
    with pytest.raises(ValueError):
        simulate_runs(pre, actual, post, 0, seed=1)
    with pytest.raises(ValueError):
        simulate_runs(StateVector.from_unnormalized([1., 1., 1.]), actual, post, 10, seed=1)


def test_simulated_frequencies_match_theory():
    pre, _, counterfactual, post = _figure_four()
    records = simulate_runs(pre, counterfactual, post, 20000, seed=2024)

    report = frequency_report(records, 'mid_post',
                              theoretical_weights(pre, counterfactual, post, 'mid_post'))
    assert list(report.columns) == ['group', 'count', 'n', 'frequency', 'expected', 'zscore',
                                    'pvalue']
    assert list(report['group']) == ['phi1,z1', 'phi1,z2', 'phi2,z1', 'phi2,z2']
    assert_allclose(report['expected'], [9. / 16, 3. / 16, 1. / 16, 3. / 16])
    assert report['count'].sum() == 20000
    assert np.all(np.abs(report['zscore']) < 5.)

    post_report = frequency_report(records, 'post',
                                   theoretical_weights(pre, counterfactual, post, 'post'))
    assert_allclose(post_report['expected'], [10. / 16, 6. / 16])
    assert np.all(np.abs(post_report['zscore']) < 5.)

    # conditional frequencies of the mid outcome approach the ABL probabilities
    abl = theoretical_weights(pre, counterfactual, post, 'mid', given_post='z1')
    conditional = frequency_report(records, 'mid', abl, given_post='z1')
    assert_allclose(conditional['expected'], [.9, .1])
    assert np.all(np.abs(conditional['zscore']) < 5.)


def test_certain_outcomes_consume_no_draw():
    # the pre-selected state is an eigenstate of the first measurement,
    # so the second measurement reads stage 0 just like without the first
    pre = spin_state(axis('z'))
    post = spin_measurement(axis('x'))
    with_certain = simulate_runs(pre, spin_measurement(axis('z')), post, 100, seed=5)
    without = simulate_runs(pre, None, post, 100, seed=5)
    assert [r.post_outcome for r in with_certain] == [r.post_outcome for r in without]


def test_paired_worlds_common_random_numbers():
    pre, actual, _, post = _figure_four()
    pairs = paired_worlds(pre, actual, actual, post, 300, seed=3,
                          coupling=COMMON_RANDOM_NUMBERS)
    assert pairs.coupling == COMMON_RANDOM_NUMBERS
    assert len(pairs) == 300
    assert [r.post_outcome for r in pairs.actual] == [r.post_outcome for r in pairs.counterfactual]
    assert pairs.counterfactual[0].seed_path == '3/actual/0'
    fixed = fixed_systems(pairs, 'z1')
    assert fixed.fraction == 1.

    independent = paired_worlds(pre, actual, actual, post, 300, seed=3, coupling=INDEPENDENT)
    assert independent.counterfactual[0].seed_path == '3/counterfactual/0'
    assert independent.actual == pairs.actual

    with pytest.raises(ValueError):
        paired_worlds(pre, actual, actual, post, 10, seed=3, coupling='telepathic')


def test_paired_world_fixed_fractions_converge():
    pre, actual, counterfactual, post = _figure_four()
    for coupling, exact in ((INDEPENDENT, .625), (COMMON_RANDOM_NUMBERS, .875)):
        assert_allclose(expected_fixed_fraction(pre, actual, counterfactual, post, 'z1',
                                                coupling), exact, atol=1e-12)
        fixed = fixed_systems(paired_worlds(pre, actual, counterfactual, post, 20000, seed=77,
                                            coupling=coupling), 'z1')
        assert abs(fixed.fraction - exact) < .03


def test_commuting_counterfactual_keeps_post_selection():
    pre = spin_state(axis('z'))
    post = spin_measurement(axis('x'), labels=('b1', 'b2'))
    # eigenbasis of the post observable listed in the opposite order
    reversed_basis = spin_measurement(axis('-x'))
    pairs = paired_worlds(pre, None, reversed_basis, post, 2000, seed=1,
                          coupling=COMMON_RANDOM_NUMBERS)
    for target in ('b1', 'b2'):
        fixed = fixed_systems(pairs, target)
        assert fixed.selected > 0
        assert fixed.fraction == 1.
        assert_allclose(expected_fixed_fraction(pre, None, reversed_basis, post, target,
                                                COMMON_RANDOM_NUMBERS), 1., atol=1e-12)
    assert_allclose(expected_fixed_fraction(pre, None, reversed_basis, post, 'b1',
                                            INDEPENDENT), .5, atol=1e-12)


@pytest.mark.parametrize('box', [0, 1, 2])
def test_coarse_commuting_counterfactual_keeps_post_selection(box):
    pre = StateVector.from_unnormalized([1., 2., 3j])
    post = computational_measurement(3)
    search = box_measurement(3, box)
    pairs = paired_worlds(pre, None, search, post, 3000, seed=5,
                          coupling=COMMON_RANDOM_NUMBERS)
    for target in post.labels:
        assert fixed_systems(pairs, target).fraction == 1.
        assert_allclose(expected_fixed_fraction(pre, None, search, post, target,
                                                COMMON_RANDOM_NUMBERS), 1., atol=1e-12)
    # the box found is the one the particle is post-selected in
    for record in pairs.counterfactual:
        assert record.mid_outcome == ('in' if record.post_outcome == str(box) else 'out')


def test_commuting_mid_is_sampled_after_the_post_outcome():
    pre = spin_state(coplanar_direction(np.pi / 3))
    post = spin_measurement(axis('x'), labels=('b1', 'b2'))
    without = simulate_runs(pre, None, post, 500, seed=12)
    with_mid = simulate_runs(pre, spin_measurement(axis('-x')), post, 500, seed=12)
    assert [r.post_outcome for r in with_mid] == [r.post_outcome for r in without]
    assert all(r.mid_outcome == ('down' if r.post_outcome == 'b1' else 'up')
               for r in with_mid)

    joint = joint_outcome_distribution(pre, [post], [spin_measurement(axis('-x')), post],
                                       COMMON_RANDOM_NUMBERS)
    assert set(joint) == {(('b1',), ('down', 'b1')), (('b2',), ('up', 'b2'))}
    assert_allclose(sum(joint.values()), 1., atol=1e-12)


@pytest.mark.parametrize('coupling', [INDEPENDENT, COMMON_RANDOM_NUMBERS])
def test_paired_world_marginals_match_mixture_weights(coupling):
    pre, actual, counterfactual, post = _figure_four(theta=np.pi / 5)
    pairs = paired_worlds(pre, actual, counterfactual, post, 100000, seed=2718,
                          coupling=coupling)
    for records, mid in ((pairs.actual, actual), (pairs.counterfactual, counterfactual)):
        report = frequency_report(records, 'mid_post',
                                  theoretical_weights(pre, mid, post, 'mid_post'))
        assert report['count'].sum() == 100000
        assert np.all(np.abs(report['zscore']) < 4.)


@pytest.mark.parametrize('coupling', [INDEPENDENT, COMMON_RANDOM_NUMBERS])
def test_paired_world_marginals_with_commuting_counterfactual(coupling):
    pre = spin_state(coplanar_direction(np.pi / 3))
    post = spin_measurement(axis('x'), labels=('b1', 'b2'))
    actual = spin_measurement(coplanar_direction(np.pi / 7))
    counterfactual = spin_measurement(axis('-x'))
    pairs = paired_worlds(pre, actual, counterfactual, post, 100000, seed=31,
                          coupling=coupling)
    for records, mid in ((pairs.actual, actual), (pairs.counterfactual, counterfactual)):
        report = frequency_report(records, 'mid_post',
                                  theoretical_weights(pre, mid, post, 'mid_post'))
        assert np.all(np.abs(report['zscore']) < 4.)


def test_joint_outcome_distribution_marginals():
    pre, actual, counterfactual, post = _figure_four()
    for coupling in (INDEPENDENT, COMMON_RANDOM_NUMBERS):
        joint = joint_outcome_distribution(pre, [actual, post], [counterfactual, post], coupling)
        assert_allclose(sum(joint.values()), 1., atol=1e-12)
        marginal = {}
        for (_, second), weight in joint.items():
            marginal[second] = marginal.get(second, 0.) + weight
        assert_allclose(marginal[('phi1', 'z1')], 9. / 16, atol=1e-12)
        assert_allclose(marginal[('phi2', 'z1')], 1. / 16, atol=1e-12)
    with pytest.raises(ValueError):
        joint_outcome_distribution(pre, [post], [post], 'telepathic')


def test_figure_four_illustration():
    pairs = figure_four_illustration()
    assert pairs.coupling is None
    assert pairs.system_ids == list(range(1, 17))
    fixed = fixed_systems(pairs, 'z1')
    assert fixed.system_ids == (3, 7, 10)
    assert fixed.selected == 8
    assert_allclose(fixed.fraction, 3. / 8)


def test_fixed_systems_without_selection():
    records = [RunRecord(0, 'actual', 'pre', None, 'z2', 'x'),
               RunRecord(1, 'actual', 'pre', None, 'z2', 'x')]
    pairs = PairedRunSet(records, [r._replace(world='counterfactual') for r in records], None)
    fixed = fixed_systems(pairs, 'z1')
    assert fixed.fraction is None
    assert fixed.system_ids == ()
    assert fixed.selected == 0

    with pytest.raises(ValueError):
        PairedRunSet(records, records[:1], None)
    with pytest.raises(ValueError):
        PairedRunSet(records, records, 'telepathic')


def test_expected_counts():
    pre, actual, counterfactual, post = _figure_four()
    assert_allclose(expected_counts(pre, actual, post, 16)['count'], [4., 4., 4., 4.])
    table = expected_counts(pre, counterfactual, post, 16)
    assert_allclose(table['count'], [9., 3., 1., 3.])
    assert list(table['label']) == ["E'_11", "E'_12", "E'_21", "E'_22"]
    assert_allclose(expected_counts(pre, None, post, 16)['count'], [16., 0.])


def test_records_to_frame():
    pre = StateVector.from_unnormalized([1., 1., 1.])
    post = rank_one_measurement(StateVector.from_unnormalized([1., 1., -1.]))
    frame = records_to_frame(simulate_runs(pre, None, post, 30, seed=0))
    assert list(frame.columns) == RECORD_COLUMNS
    assert len(frame) == 30
    assert set(frame['post']) <= {'selected', 'rejected'}


def test_frequency_report_rejects_unknown_grouping():
    with pytest.raises(ValueError):
        frequency_report([], 'world', {})
    pre, _, _, post = _figure_four()
    with pytest.raises(ValueError):
        theoretical_weights(pre, None, post, 'mid')
