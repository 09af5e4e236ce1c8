import numpy as np
import pytest

from conftest import (
    brute_neighborhoods,
    brute_node_homophily,
    brute_regression_homophily,
    random_discrete_instance,
    random_weighted_instance,
)
from models.errors import InputError, LabelTypeError
from models.graph import build_discrete_graph, build_weighted_graph
from models.labels import NodeLabels, normalize_regression_labels
from utils.homophily import (
    continuous_homophily,
    continuous_regression_homophily,
    node_homophily,
    regression_homophily,
)
from utils.neighborhood import khop_neighborhoods, ring_neighborhoods


def test_path_node_homophily(path3):
    result = node_homophily(path3, NodeLabels.classification([0, 0, 1]))
    assert result.values.tolist() == [1.0, 0.5, 0.0]
    assert result.mean == 0.5
    assert result.num_excluded == 0


def test_uniform_labels_are_perfectly_homophilous():
    graph, _ = random_discrete_instance(5)
    labels = NodeLabels.classification(np.zeros(graph.num_nodes, dtype=int))
    result = node_homophily(graph, labels)
    if result.mean is not None:
        assert result.mean == 1.0
        assert result.std == 0.0


def test_isolated_nodes_are_excluded():
    graph = build_discrete_graph(4, [(0, 1)])
    result = node_homophily(graph, NodeLabels.classification([0, 1, 0, 1]))
    assert result.node_ids.tolist() == [0, 1]
    assert result.num_excluded == 2
    assert result.mean == 0.0


def test_graph_without_edges_has_undefined_mean():
    graph = build_discrete_graph(3, [])
    result = node_homophily(graph, NodeLabels.classification([0, 1, 0]))
    assert result.mean is None
    assert result.std is None
    assert result.num_excluded == 3


def test_restrict_averages_over_subset_with_full_graph_neighborhoods(path3):
    labels = NodeLabels.classification([0, 0, 1])
    result = node_homophily(path3, labels, restrict=[1, 2])
    assert result.node_ids.tolist() == [1, 2]
    assert result.values.tolist() == [0.5, 0.0]
    mask = np.array([False, True, True])
    assert node_homophily(path3, labels, restrict=mask).values.tolist() == [0.5, 0.0]


def test_empty_restrict_is_an_error(path3):
    with pytest.raises(InputError):
        node_homophily(path3, NodeLabels.classification([0, 0, 1]), restrict=[])


def test_path_regression_homophily(path3):
    labels = normalize_regression_labels([0.0, 0.5, 1.0])
    result = regression_homophily(path3, labels)
    assert result.values.tolist() == [0.5, 0.5, 0.5]
    assert result.mean == 0.5


def test_regression_extremes():
    graph = build_discrete_graph(2, [(0, 1)])
    assert regression_homophily(graph, normalize_regression_labels([0.0, 1.0])).mean == 0.0
    assert regression_homophily(graph, normalize_regression_labels([3.0, 3.0])).mean == 1.0


def test_label_kind_mismatch_is_a_type_error(path3):
    with pytest.raises(LabelTypeError):
        node_homophily(path3, normalize_regression_labels([0.1, 0.2, 0.3]))
    with pytest.raises(LabelTypeError):
        regression_homophily(path3, NodeLabels.classification([0, 1, 0]))


def test_label_count_mismatch(path3):
    with pytest.raises(InputError):
        node_homophily(path3, NodeLabels.classification([0, 1]))


@pytest.mark.parametrize('seed', range(200))
def test_matches_double_loop_reference(seed):
    graph, labels = random_discrete_instance(seed)
    rng = np.random.default_rng(seed + 1000)
    regression = normalize_regression_labels(rng.normal(size=graph.num_nodes))
    for k in (1, 2, 3):
        nbh = khop_neighborhoods(graph, k)
        members = brute_neighborhoods(graph, k)

        expected = brute_node_homophily(members, labels.class_ids)
        result = node_homophily(graph, labels, nbh)
        assert result.node_ids.tolist() == sorted(expected)
        assert np.allclose(result.values, [expected[v] for v in sorted(expected)], rtol=0, atol=1e-12)
        assert result.num_excluded == graph.num_nodes - len(expected)

        expected = brute_regression_homophily(members, regression.normalized_values)
        result = regression_homophily(graph, regression, nbh)
        assert np.allclose(result.values, [expected[v] for v in sorted(expected)], rtol=0, atol=1e-12)


def test_ring_neighborhoods_are_accepted(path4):
    labels = NodeLabels.classification([0, 1, 0, 1])
    result = node_homophily(path4, labels, ring_neighborhoods(path4, 2))
    assert result.values.tolist() == [1.0, 1.0, 1.0, 1.0]


def test_star_continuous_homophily(star):
    graph, labels = star
    result = continuous_homophily(graph, labels)
    assert result.values.tolist() == [0.75, 1.0, 0.0]
    assert result.mean == pytest.approx(0.5833333333, abs=1e-9)


def test_continuous_regression_example():
    # neighbors of node 0 sit 0.2 (w=1) and 0.8 (w=3) away
    labels = normalize_regression_labels([0.0, 0.2, 0.8, 1.0])
    graph = build_weighted_graph(4, [(0, 1, 1.0), (0, 2, 3.0), (1, 3, 1.0)])
    result = continuous_regression_homophily(graph, labels)
    assert result.per_node[0] == pytest.approx(0.35, abs=1e-12)


def test_same_class_neighbors_give_one_for_any_weights():
    graph = build_weighted_graph(3, [(0, 1, 0.1), (0, 2, 7.0)])
    result = continuous_homophily(graph, NodeLabels.classification([1, 1, 1]))
    assert result.values.tolist() == [1.0, 1.0, 1.0]


@pytest.mark.parametrize('seed', range(100))
def test_uniform_weights_reduce_to_discrete_metrics(seed):
    weighted, labels = random_weighted_instance(seed)
    regression = normalize_regression_labels(np.random.default_rng(seed).normal(size=weighted.num_nodes))
    pairs, _ = weighted.edge_pairs()
    discrete = build_discrete_graph(weighted.num_nodes, pairs)
    uniform = weighted.reweighted(np.full(len(pairs), 2.5))

    assert np.allclose(continuous_homophily(uniform, labels).values,
                       node_homophily(discrete, labels).values, rtol=0, atol=1e-12)
    assert np.allclose(continuous_regression_homophily(uniform, regression).values,
                       regression_homophily(discrete, regression).values, rtol=0, atol=1e-12)


@pytest.mark.parametrize('seed', range(20))
@pytest.mark.parametrize('factor', [1e-3, 1.0, 1e3])
def test_scale_invariance(seed, factor):
    graph, labels = random_weighted_instance(seed)
    scaled = graph.scaled(factor)
    assert abs(continuous_homophily(scaled, labels).mean - continuous_homophily(graph, labels).mean) <= 1e-10
    regression = normalize_regression_labels(np.arange(graph.num_nodes, dtype=float) ** 2)
    assert abs(continuous_regression_homophily(scaled, regression).mean
               - continuous_regression_homophily(graph, regression).mean) <= 1e-10


@pytest.mark.parametrize('seed', range(30))
def test_values_stay_in_unit_interval(seed):
    graph, labels = random_weighted_instance(seed)
    regression = normalize_regression_labels(np.random.default_rng(seed).uniform(size=graph.num_nodes))
    for result in (continuous_homophily(graph, labels), continuous_regression_homophily(graph, regression)):
        assert np.all(result.values >= 0.0)
        assert np.all(result.values <= 1.0)


@pytest.mark.parametrize('seed', range(50))
def test_class_relabeling_leaves_homophily_unchanged(seed):
    graph, labels = random_discrete_instance(seed)
    weighted, weighted_labels = random_weighted_instance(seed)
    rng = np.random.default_rng(seed)
    for g, original, metric in ((graph, labels, node_homophily), (weighted, weighted_labels, continuous_homophily)):
        permutation = rng.permutation(original.num_classes)
        relabeled = NodeLabels.classification(permutation[original.class_ids], num_classes=original.num_classes)
        assert metric(g, relabeled).values.tolist() == metric(g, original).values.tolist()


@pytest.mark.parametrize('seed', range(50))
def test_regression_homophily_is_reflection_symmetric(seed):
    graph, _ = random_discrete_instance(seed)
    weighted, _ = random_weighted_instance(seed)
    rng = np.random.default_rng(seed)
    for g, metric in ((graph, regression_homophily), (weighted, continuous_regression_homophily)):
        raw = rng.normal(size=g.num_nodes)
        base = metric(g, normalize_regression_labels(raw))
        reflected = metric(g, normalize_regression_labels(-raw))
        assert np.allclose(reflected.values, base.values, rtol=0, atol=1e-12)


@pytest.mark.parametrize('seed', range(50))
def test_regression_homophily_ignores_positive_affine_maps(seed):
    graph, _ = random_discrete_instance(seed)
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=graph.num_nodes)
    scale, shift = float(rng.uniform(0.1, 10.0)), float(rng.uniform(-10.0, 10.0))
    for k in (1, 2):
        nbh = khop_neighborhoods(graph, k)
        base = regression_homophily(graph, normalize_regression_labels(raw), nbh)
        moved = regression_homophily(graph, normalize_regression_labels(scale * raw + shift), nbh)
        assert np.allclose(moved.values, base.values, rtol=0, atol=1e-12)
