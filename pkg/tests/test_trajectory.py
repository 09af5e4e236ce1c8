import pytest

from models.errors import InputError
from models.labels import LabelKind, NodeLabels, normalize_regression_labels
from utils.dataset_io import Snapshot, SnapshotSequence
from utils.synthetic import rewired_snapshot_sequence
from utils.trajectory import analyze_trajectory, available_metrics, pearson_correlation


@pytest.fixture
def rewired():
    return rewired_snapshot_sequence(nodes_per_class=20, degree=16, steps=5)


def test_pearson_of_identical_series():
    assert pearson_correlation([1.0, 2.0, 4.0, 8.0], [1.0, 2.0, 4.0, 8.0]) == pytest.approx(1.0)


def test_pearson_undefined_cases():
    assert pearson_correlation([1.0, 2.0], [3.0, 4.0]) is None
    assert pearson_correlation([1.0, 1.0, 1.0], [1.0, 2.0, 3.0]) is None
    assert pearson_correlation([1.0, 2.0, 3.0], [5.0, 5.0, 5.0]) is None
    with pytest.raises(InputError):
        pearson_correlation([1.0, 2.0, 3.0], [1.0, 2.0])


def test_rewiring_trends(rewired):
    sequence, labels = rewired
    analysis, _ = analyze_trajectory(sequence, labels)

    homophily = analysis.series('node_homophily')
    distance = analysis.series('ccns_distance')
    assert homophily == sorted(homophily)
    assert homophily[-1] == 1.0
    assert all(later <= earlier for earlier, later in zip(distance, distance[1:]))
    assert distance[-1] == pytest.approx(0.0, abs=1e-12)

    assert analysis.mean_nondecreasing['node_homophily']
    assert analysis.std_nonincreasing['node_homophily']
    assert analysis.std_nonincreasing['ccns_distance'] is None
    assert analysis.mean_nonincreasing['ccns_distance']
    assert not analysis.mean_nondecreasing['ccns_distance']
    assert analysis.pearson['node_homophily'] > 0.9
    assert analysis.direction['node_homophily'] == 1
    assert analysis.pearson['ccns_distance'] < -0.9
    assert analysis.direction['ccns_distance'] == -1


def test_records(rewired):
    sequence, labels = rewired
    _, records = analyze_trajectory(sequence, labels, metrics=['node_homophily'])
    steps = [record for record in records if record.step is not None]
    assert [record.step for record in steps] == [0, 1, 2, 3, 4]
    assert all(record.metric == 'node_homophily' for record in steps)
    correlation = [record for record in records if record.pearson is not None]
    assert len(correlation) == 1
    assert correlation[0].step is None
    assert correlation[0].mean_nondecreasing is True
    assert correlation[0].std_nonincreasing is True


def test_two_steps_leave_correlation_undefined():
    sequence, labels = rewired_snapshot_sequence(steps=2)
    analysis, records = analyze_trajectory(sequence, labels)
    assert len(analysis.steps) == 2
    assert analysis.pearson == {'node_homophily': None, 'ccns_distance': None}
    assert analysis.direction['node_homophily'] is None
    assert sum(record.step is not None for record in records) == 4


def test_missing_performance_leaves_correlation_undefined(rewired):
    sequence, labels = rewired
    bare = SnapshotSequence([Snapshot(snapshot.step, snapshot.graph) for snapshot in sequence])
    analysis, _ = analyze_trajectory(bare, labels)
    assert analysis.pearson['node_homophily'] is None
    assert analysis.mean_nondecreasing['node_homophily']


def test_lower_is_better_flips_the_performance_sign(rewired):
    sequence, labels = rewired
    errors = SnapshotSequence([
        Snapshot(snapshot.step, snapshot.graph, 1.0 - snapshot.performance) for snapshot in sequence
    ])
    analysis, _ = analyze_trajectory(errors, labels, lower_is_better=True)
    assert analysis.pearson['node_homophily'] > 0.9
    assert analysis.lower_is_better


def test_split_restriction(rewired):
    sequence, labels = rewired
    analysis, records = analyze_trajectory(sequence, labels, restrict=list(range(0, 40, 2)), split='train')
    full, _ = analyze_trajectory(sequence, labels)
    # every node of the regular fixture has the same homophily, so any subset averages alike
    assert analysis.series('node_homophily') == full.series('node_homophily')
    assert all(record.split == 'train' for record in records)


def test_metric_selection():
    assert available_metrics(False, LabelKind.CLASSIFICATION) == ('node_homophily', 'ccns_distance')
    assert available_metrics(True, LabelKind.REGRESSION) == ('continuous_regression_homophily',)


def test_inapplicable_metric_is_rejected(rewired):
    sequence, labels = rewired
    with pytest.raises(InputError):
        analyze_trajectory(sequence, labels, metrics=['regression_homophily'])


def test_regression_trajectory(rewired):
    sequence, _ = rewired
    values = normalize_regression_labels([0.0] * 20 + [1.0] * 20)
    analysis, _ = analyze_trajectory(sequence, values)
    assert analysis.series('regression_homophily') == sorted(analysis.series('regression_homophily'))
    assert analysis.pearson['regression_homophily'] > 0.9


def test_label_count_must_match(rewired):
    sequence, _ = rewired
    with pytest.raises(InputError):
        analyze_trajectory(sequence, NodeLabels.classification([0, 1]))
