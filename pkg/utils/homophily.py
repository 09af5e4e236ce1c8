"""
Node homophily for classification and regression labels, on k-hop
neighborhoods of discrete graphs and on 1-hop continuous adjacency.

Every metric is evaluated over an averaging set (`restrict`, default all
nodes) while neighborhoods always span the full graph, so split-wise
evaluation stays transductive.
"""

import logging

import numpy as np

from models.errors import InputError, LabelTypeError
from models.labels import LabelKind
from models.results import HomophilyResult
from utils.neighborhood import khop_neighborhoods

logger = logging.getLogger(__name__)


def resolve_nodes(num_nodes, restrict):
    """Sorted, unique node ids of the averaging set"""
    if restrict is None:
        return np.arange(num_nodes, dtype=np.int64)
    nodes = np.asarray(restrict)
    if nodes.dtype == bool:
        if nodes.shape != (num_nodes,):
            raise InputError(f'boolean restrict mask must have length {num_nodes}')
        nodes = np.flatnonzero(nodes)
    nodes = np.unique(nodes.astype(np.int64))
    if nodes.size == 0:
        raise InputError('restrict selects no nodes')
    if nodes[0] < 0 or nodes[-1] >= num_nodes:
        raise InputError(f'restrict contains node ids outside [0, {num_nodes})')
    return nodes


def require_kind(labels, kind, num_nodes):
    if labels.kind is not kind:
        raise LabelTypeError(f'this metric needs {kind.value} labels, got {labels.kind.value}')
    if labels.num_nodes != num_nodes:
        raise InputError(f'{labels.num_nodes} labels for a graph with {num_nodes} nodes')


def _normalized(labels):
    values = labels.normalized_values
    if np.any(values < 0) or np.any(values > 1):
        raise InputError('regression labels must be normalized to [0, 1]')
    return values


def _row_slices(matrix, nodes):
    """CSR rows of `nodes`: local row index per entry, neighbor ids, entry data"""
    sub = matrix[nodes]
    sizes = np.diff(sub.indptr)
    rows = np.repeat(np.arange(len(nodes)), sizes)
    return rows, sub.indices, sub.data, sizes


def _resolve_neighborhoods(graph, nbh):
    if nbh is None:
        return khop_neighborhoods(graph, 1)
    if nbh.num_nodes != graph.num_nodes:
        raise InputError(f'neighborhoods cover {nbh.num_nodes} nodes, graph has {graph.num_nodes}')
    return nbh


def _finish(metric, k, nodes, included_values, included):
    excluded = int(np.count_nonzero(~included))
    if excluded:
        logger.debug('%s k=%d: %d of %d nodes excluded (empty neighborhood)', metric, k, excluded, len(nodes))
    values = np.clip(included_values, 0.0, 1.0)
    return HomophilyResult.from_values(metric, k, nodes[included], values, excluded)


def node_homophily(graph, labels, nbh=None, restrict=None):
    """Fraction of each node's k-hop neighbors sharing its class, averaged over the included nodes"""
    require_kind(labels, LabelKind.CLASSIFICATION, graph.num_nodes)
    nbh = _resolve_neighborhoods(graph, nbh)
    nodes = resolve_nodes(graph.num_nodes, restrict)
    y = labels.class_ids

    rows, neighbors, _, sizes = _row_slices(nbh.matrix, nodes)
    same = (y[neighbors] == y[nodes][rows]).astype(np.float64)
    same_counts = np.bincount(rows, weights=same, minlength=len(nodes))

    included = sizes > 0
    values = same_counts[included] / sizes[included]
    return _finish('node_homophily', nbh.k, nodes, values, included)


def regression_homophily(graph, labels, nbh=None, restrict=None):
    """One minus the mean absolute normalized label distance to the k-hop neighbors"""
    require_kind(labels, LabelKind.REGRESSION, graph.num_nodes)
    y = _normalized(labels)
    nbh = _resolve_neighborhoods(graph, nbh)
    nodes = resolve_nodes(graph.num_nodes, restrict)

    rows, neighbors, _, sizes = _row_slices(nbh.matrix, nodes)
    distances = np.abs(y[nodes][rows] - y[neighbors])
    distance_sums = np.bincount(rows, weights=distances, minlength=len(nodes))

    included = sizes > 0
    values = 1.0 - distance_sums[included] / sizes[included]
    return _finish('regression_homophily', nbh.k, nodes, values, included)


def weighted_terms(graph, y, nodes, term):
    """Per-node weight totals and weight-averaged `term(y_v, y_u)` numerators"""
    rows, neighbors, weights, _ = _row_slices(graph.weights, nodes)
    totals = np.bincount(rows, weights=weights, minlength=len(nodes))
    numerators = np.bincount(rows, weights=weights * term(y[nodes][rows], y[neighbors]), minlength=len(nodes))
    return totals, numerators


def continuous_homophily(graph, labels, restrict=None):
    """Share of each node's incident weight that points to same-class neighbors"""
    require_kind(labels, LabelKind.CLASSIFICATION, graph.num_nodes)
    nodes = resolve_nodes(graph.num_nodes, restrict)
    totals, same_weight = weighted_terms(
        graph, labels.class_ids, nodes, lambda own, other: (own == other).astype(np.float64)
    )
    included = totals > 0
    values = same_weight[included] / totals[included]
    return _finish('continuous_homophily', 1, nodes, values, included)


def continuous_regression_homophily(graph, labels, restrict=None):
    """One minus the weight-averaged normalized label distance to the neighbors"""
    require_kind(labels, LabelKind.REGRESSION, graph.num_nodes)
    y = _normalized(labels)
    nodes = resolve_nodes(graph.num_nodes, restrict)
    totals, weighted_distance = weighted_terms(graph, y, nodes, lambda own, other: np.abs(own - other))
    included = totals > 0
    values = 1.0 - weighted_distance[included] / totals[included]
    return _finish('continuous_regression_homophily', 1, nodes, values, included)
