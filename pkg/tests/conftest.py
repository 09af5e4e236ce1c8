"""Shared fixtures and naive reference implementations for the metric tests."""

import itertools

import numpy as np
import pytest

from models.graph import build_discrete_graph, build_weighted_graph
from models.labels import NodeLabels, normalize_regression_labels


def random_edges(rng, n, p):
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]


def random_discrete_instance(seed, max_nodes=30, p=0.2):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, max_nodes + 1))
    num_classes = int(rng.integers(2, 6))
    graph = build_discrete_graph(n, random_edges(rng, n, p))
    labels = NodeLabels.classification(rng.integers(0, num_classes, size=n), num_classes=num_classes)
    return graph, labels


def random_weighted_instance(seed, max_nodes=20, p=0.3, task='classification'):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, max_nodes + 1))
    edges = random_edges(rng, n, p)
    if not edges:
        edges = [(0, 1)]
    triplets = [(u, v, float(rng.uniform(0.5, 2.0))) for u, v in edges]
    graph = build_weighted_graph(n, triplets)
    if task == 'classification':
        labels = NodeLabels.classification(rng.integers(0, 3, size=n), num_classes=3)
    else:
        labels = normalize_regression_labels(rng.normal(size=n))
    return graph, labels


def shortest_paths(graph):
    """Floyd-Warshall hop distances (inf when unreachable)"""
    n = graph.num_nodes
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for u, v in graph.edge_pairs():
        dist[u, v] = dist[v, u] = 1.0
    for m in range(n):
        dist = np.minimum(dist, dist[:, m, None] + dist[None, m, :])
    return dist


def brute_neighborhoods(graph, k, ring=False):
    dist = shortest_paths(graph)
    result = []
    for v in range(graph.num_nodes):
        if ring:
            result.append([u for u in range(graph.num_nodes) if dist[v, u] == k])
        else:
            result.append([u for u in range(graph.num_nodes) if u != v and dist[v, u] <= k])
    return result


def brute_node_homophily(neighborhoods, class_ids):
    values = {}
    for v, members in enumerate(neighborhoods):
        if members:
            values[v] = sum(1 for u in members if class_ids[u] == class_ids[v]) / len(members)
    return values


def brute_regression_homophily(neighborhoods, y):
    values = {}
    for v, members in enumerate(neighborhoods):
        if members:
            values[v] = 1.0 - sum(abs(y[v] - y[u]) for u in members) / len(members)
    return values


def brute_histograms(neighborhoods, class_ids, num_classes, weights=None):
    histograms = np.zeros((len(neighborhoods), num_classes))
    for v, members in enumerate(neighborhoods):
        for u in members:
            histograms[v, class_ids[u]] += 1.0 if weights is None else weights[v, u]
    return histograms


def brute_ccns(histograms, class_ids, num_classes):
    """Double-loop class-pair average of cosine similarities, zero vectors giving cosine 0"""
    matrix = np.zeros((num_classes, num_classes))
    for c, d in itertools.product(range(num_classes), repeat=2):
        total, count = 0.0, 0
        for u in range(len(class_ids)):
            if class_ids[u] != c:
                continue
            for v in range(len(class_ids)):
                if class_ids[v] != d:
                    continue
                a, b = histograms[u], histograms[v]
                norm = np.linalg.norm(a) * np.linalg.norm(b)
                total += float(a @ b) / norm if norm > 0 else 0.0
                count += 1
        matrix[c, d] = total / count
    return matrix


@pytest.fixture
def path3():
    return build_discrete_graph(3, [(0, 1), (1, 2)])


@pytest.fixture
def path4():
    return build_discrete_graph(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def star():
    """Center 0 (class 0) with neighbor 1 (class 0, w=3) and neighbor 2 (class 1, w=1)"""
    graph = build_weighted_graph(3, [(0, 1, 3.0), (0, 2, 1.0)])
    labels = NodeLabels.classification([0, 0, 1])
    return graph, labels


@pytest.fixture
def two_cliques():
    edges = [(u, v) for u, v in itertools.combinations(range(4), 2)]
    edges += [(u + 4, v + 4) for u, v in edges]
    graph = build_discrete_graph(8, edges)
    labels = NodeLabels.classification([0, 0, 0, 0, 1, 1, 1, 1])
    return graph, labels
