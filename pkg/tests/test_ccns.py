import numpy as np
import pytest

from conftest import (
    brute_ccns,
    brute_histograms,
    brute_neighborhoods,
    random_discrete_instance,
    random_weighted_instance,
)
from models.errors import InputError
from models.graph import build_discrete_graph, build_weighted_graph
from models.labels import NodeLabels
from models.results import CcnsMode
from utils.ccns import ccns_distance, ccns_matrix, neighbor_histogram, neighbor_histograms
from utils.neighborhood import khop_neighborhoods


def test_discrete_histogram_counts_neighbor_classes():
    graph = build_discrete_graph(4, [(0, 1), (0, 2), (0, 3)])
    labels = NodeLabels.classification([2, 0, 0, 1], num_classes=3)
    nbh = khop_neighborhoods(graph, 1)
    assert neighbor_histogram(0, nbh, labels).tolist() == [2.0, 1.0, 0.0]


def test_isolated_node_has_zero_histogram():
    graph = build_discrete_graph(3, [(0, 1)])
    labels = NodeLabels.classification([0, 1, 1])
    assert neighbor_histogram(2, khop_neighborhoods(graph, 1), labels).tolist() == [0.0, 0.0]


def test_weighted_histogram_sums_weights():
    graph = build_weighted_graph(4, [(0, 1, 0.5), (0, 2, 1.5), (0, 3, 2.0)])
    labels = NodeLabels.classification([1, 0, 0, 2], num_classes=3)
    assert neighbor_histogram(0, graph, labels).tolist() == [2.0, 0.0, 2.0]


def test_disjoint_pure_cliques_give_identity(two_cliques):
    graph, labels = two_cliques
    matrix = ccns_matrix(graph, labels, khop_neighborhoods(graph, 1))
    assert np.array_equal(matrix.values, np.eye(2))
    assert ccns_distance(matrix) == 0.0
    assert matrix.classes == (0, 1)


def test_complete_graph_matches_brute_force():
    edges = [(u, v) for u in range(8) for v in range(u + 1, 8)]
    graph = build_discrete_graph(8, edges)
    labels = NodeLabels.classification([0, 1] * 4)
    matrix = ccns_matrix(graph, labels, khop_neighborhoods(graph, 1))
    members = brute_neighborhoods(graph, 1)
    expected = brute_ccns(brute_histograms(members, labels.class_ids, 2), labels.class_ids, 2)
    assert np.allclose(matrix.values, expected, rtol=0, atol=1e-12)
    assert np.all(matrix.values > 0.9)


@pytest.mark.parametrize('seed', range(200))
def test_discrete_matches_double_loop_reference(seed):
    graph, labels = random_discrete_instance(seed)
    if np.unique(labels.class_ids).size < labels.num_classes:
        labels = NodeLabels.classification(np.arange(graph.num_nodes) % labels.num_classes,
                                           num_classes=labels.num_classes)
        if graph.num_nodes < labels.num_classes:
            pytest.skip('fewer nodes than classes')
    for k in (1, 2, 3):
        matrix = ccns_matrix(graph, labels, khop_neighborhoods(graph, k))
        histograms = brute_histograms(brute_neighborhoods(graph, k), labels.class_ids, labels.num_classes)
        expected = brute_ccns(histograms, labels.class_ids, labels.num_classes)
        assert np.allclose(matrix.values, expected, rtol=0, atol=1e-12)
        expected_distance = np.abs(expected - np.eye(labels.num_classes)).sum() / labels.num_classes
        assert abs(ccns_distance(matrix) - expected_distance) <= 1e-12


@pytest.mark.parametrize('seed', range(30))
def test_continuous_matches_double_loop_reference(seed):
    graph, labels = random_weighted_instance(seed, max_nodes=15, p=0.4)
    if np.unique(labels.class_ids).size < labels.num_classes:
        pytest.skip('a class has no members')
    matrix = ccns_matrix(graph, labels, graph)
    assert matrix.mode is CcnsMode.CONTINUOUS
    dense = graph.weights.toarray()
    members = [list(np.flatnonzero(dense[v])) for v in range(graph.num_nodes)]
    histograms = brute_histograms(members, labels.class_ids, labels.num_classes, weights=dense)
    expected = brute_ccns(histograms, labels.class_ids, labels.num_classes)
    assert np.allclose(matrix.values, expected, rtol=0, atol=1e-12)


@pytest.mark.parametrize('seed', range(30))
def test_unit_weights_reduce_to_discrete(seed):
    weighted, labels = random_weighted_instance(seed)
    if np.unique(labels.class_ids).size < labels.num_classes:
        pytest.skip('a class has no members')
    pairs, _ = weighted.edge_pairs()
    unit = weighted.reweighted(np.ones(len(pairs)))
    discrete = build_discrete_graph(weighted.num_nodes, pairs)
    continuous = ccns_matrix(unit, labels, unit)
    reference = ccns_matrix(discrete, labels, khop_neighborhoods(discrete, 1))
    assert np.allclose(continuous.values, reference.values, rtol=0, atol=1e-12)


@pytest.mark.parametrize('factor', [1e-3, 1.0, 1e3])
def test_continuous_is_scale_invariant(factor):
    graph, _ = random_weighted_instance(11, p=0.5)
    labels = NodeLabels.classification(np.arange(graph.num_nodes) % 3)
    scaled = graph.scaled(factor)
    assert np.allclose(ccns_matrix(scaled, labels, scaled).values,
                       ccns_matrix(graph, labels, graph).values, rtol=0, atol=1e-10)


@pytest.mark.parametrize('seed', range(20))
def test_matrix_is_symmetric_and_bounded(seed):
    graph, labels = random_discrete_instance(seed)
    labels = NodeLabels.classification(np.arange(graph.num_nodes) % 2)
    matrix = ccns_matrix(graph, labels, khop_neighborhoods(graph, 2))
    assert np.array_equal(matrix.values, matrix.values.T)
    assert np.all((matrix.values >= 0) & (matrix.values <= 1))
    assert ccns_distance(matrix) >= 0


def test_distance_examples():
    assert ccns_distance(np.eye(3)) == 0.0
    assert ccns_distance([[0.9, 0.2], [0.2, 0.8]]) == pytest.approx(0.35, abs=1e-15)


def test_zero_histograms_are_counted():
    graph = build_discrete_graph(4, [(0, 1)])
    labels = NodeLabels.classification([0, 1, 0, 1])
    matrix = ccns_matrix(graph, labels, khop_neighborhoods(graph, 1))
    assert matrix.num_zero_histograms == 2
    # class 0 = {0, 2}: only node 0 has a histogram, so the diagonal holds (1 + 0 + 0 + 0) / 4
    assert matrix.values[0, 0] == pytest.approx(0.25)


def test_exclude_self_pairs(two_cliques):
    graph, labels = two_cliques
    nbh = khop_neighborhoods(graph, 1)
    assert np.allclose(ccns_matrix(graph, labels, nbh, exclude_self_pairs=True).values, np.eye(2))

    lone = build_discrete_graph(3, [(0, 1), (1, 2)])
    matrix = ccns_matrix(lone, NodeLabels.classification([0, 1, 0]), khop_neighborhoods(lone, 1),
                         exclude_self_pairs=True)
    assert matrix.values[1, 1] == 0.0
    assert matrix.exclude_self_pairs


def test_restrict_limits_member_sets(two_cliques):
    graph, labels = two_cliques
    nbh = khop_neighborhoods(graph, 1)
    matrix = ccns_matrix(graph, labels, nbh, restrict=[0, 1, 4])
    assert np.allclose(matrix.values, np.eye(2))

    with pytest.raises(InputError):
        ccns_matrix(graph, labels, nbh, restrict=[0, 1])
    partial = ccns_matrix(graph, labels, nbh, restrict=[0, 1], allow_empty_classes=True)
    assert partial.classes == (0,)
    assert partial.values.tolist() == [[1.0]]


def test_single_class_is_rejected(path3):
    with pytest.raises(InputError):
        ccns_matrix(path3, NodeLabels.classification([0, 0, 0]), khop_neighborhoods(path3, 1))


def test_mode_must_match_source(star):
    graph, labels = star
    with pytest.raises(InputError):
        ccns_matrix(graph, labels, graph, mode='discrete')
    assert neighbor_histograms(graph, labels).shape == (3, 2)


def test_histograms_check_label_count(path4):
    short = NodeLabels.classification([0, 1, 0])
    nbh = khop_neighborhoods(path4, 1)
    with pytest.raises(InputError) as err:
        neighbor_histogram(3, nbh, short)
    assert '3 labels' in str(err.value)
    with pytest.raises(InputError):
        neighbor_histograms(nbh, short)


@pytest.mark.parametrize('seed', range(50))
def test_class_relabeling_permutes_the_matrix(seed):
    graph, labels = random_discrete_instance(seed)
    present = np.unique(labels.class_ids)
    if present.size < 2:
        pytest.skip('needs two populated classes')
    permutation = np.random.default_rng(seed).permutation(labels.num_classes)
    relabeled = NodeLabels.classification(permutation[labels.class_ids], num_classes=labels.num_classes)
    nbh = khop_neighborhoods(graph, 1)
    base = ccns_matrix(graph, labels, nbh, allow_empty_classes=True)
    moved = ccns_matrix(graph, relabeled, nbh, allow_empty_classes=True)

    position = {c: i for i, c in enumerate(moved.classes)}
    index = [position[int(permutation[c])] for c in base.classes]
    assert np.allclose(moved.values[np.ix_(index, index)], base.values, rtol=0, atol=1e-12)
    assert ccns_distance(moved) == pytest.approx(ccns_distance(base), abs=1e-12)


def test_distance_grows_as_off_diagonal_entries_leave_zero():
    distances = []
    for t in np.linspace(0.0, 1.0, 11):
        values = np.full((3, 3), t)
        np.fill_diagonal(values, 1.0)
        distances.append(ccns_distance(values))
    assert distances[0] == 0.0
    assert all(later > earlier for earlier, later in zip(distances, distances[1:]))
    assert distances[-1] == pytest.approx(2.0)


@pytest.mark.parametrize('seed', range(20))
def test_distance_grows_with_any_single_off_diagonal_pair(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    values = rng.uniform(0.0, 0.5, size=(n, n))
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 1.0)
    c, d = rng.choice(n, size=2, replace=False)
    raised = values.copy()
    raised[c, d] += 0.25
    raised[d, c] += 0.25
    assert ccns_distance(raised) == pytest.approx(ccns_distance(values) + 0.5 / n, abs=1e-12)
