from dataclasses import dataclass
import logging

import numpy as np
import scipy.sparse as sp

from .errors import InputError

logger = logging.getLogger(__name__)


def _freeze(matrix):
    """Mark the CSR buffers read-only so graphs stay immutable after construction"""
    for array in (matrix.data, matrix.indices, matrix.indptr):
        array.flags.writeable = False
    return matrix


def _check_count(num_nodes):
    if isinstance(num_nodes, bool) or int(num_nodes) != num_nodes or num_nodes < 0:
        raise InputError(f'num_nodes must be a nonnegative integer, got {num_nodes!r}')
    return int(num_nodes)


def _check_ids(num_nodes, *columns):
    for column in columns:
        if column.size == 0:
            continue
        bad = (column < 0) | (column >= num_nodes)
        if bad.any():
            raise InputError(
                f'node id {int(column[np.argmax(bad)])} out of range for {num_nodes} nodes'
            )


def _as_id_array(values, name):
    array = np.asarray(values)
    if array.size == 0:
        return np.zeros(0, dtype=np.int64)
    if not np.issubdtype(array.dtype, np.integer):
        if not np.all(np.isfinite(array)) or np.any(array != np.round(array)):
            raise InputError(f'{name} must contain integer node ids')
    return array.astype(np.int64)


@dataclass(frozen=True, eq=False)
class DiscreteGraph:
    """Unweighted undirected graph in canonical CSR form.

    Neighbor lists are sorted, duplicate-free and never contain the node
    itself; u in N(v) iff v in N(u).
    """

    num_nodes: int
    adjacency: sp.csr_matrix

    @property
    def num_edges(self):
        """Number of undirected edges"""
        return int(self.adjacency.nnz // 2)

    @property
    def degrees(self):
        return np.diff(self.adjacency.indptr)

    def neighbors(self, v):
        start, stop = self.adjacency.indptr[v], self.adjacency.indptr[v + 1]
        return self.adjacency.indices[start:stop]

    def edge_pairs(self):
        """Canonical (u, v) pairs with u < v, sorted"""
        coo = self.adjacency.tocoo()
        keep = coo.row < coo.col
        pairs = np.column_stack([coo.row[keep], coo.col[keep]]).astype(np.int64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order]

    def to_dict(self):
        return {
            'num_nodes': self.num_nodes,
            'adjacency': {v: self.neighbors(v).tolist() for v in range(self.num_nodes)},
        }

    def __repr__(self):
        return f'<DiscreteGraph nodes={self.num_nodes} edges={self.num_edges}>'


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph with positive symmetric edge weights (continuous adjacency)"""

    num_nodes: int
    weights: sp.csr_matrix

    @property
    def num_edges(self):
        return int(self.weights.nnz // 2)

    def neighbors(self, v):
        start, stop = self.weights.indptr[v], self.weights.indptr[v + 1]
        return self.weights.indices[start:stop], self.weights.data[start:stop]

    def weight(self, u, v):
        return float(self.weights[u, v])

    def edge_pairs(self):
        """Canonical (u, v) pairs with u < v and their weights, sorted by (u, v)"""
        coo = self.weights.tocoo()
        keep = coo.row < coo.col
        pairs = np.column_stack([coo.row[keep], coo.col[keep]]).astype(np.int64)
        values = coo.data[keep].astype(np.float64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return pairs[order], values[order]

    def reweighted(self, edge_weights):
        """Return a graph with the same edges carrying new undirected weights.

        `edge_weights` is aligned with `edge_pairs()`; every value must stay > 0.
        """
        pairs, _ = self.edge_pairs()
        edge_weights = np.asarray(edge_weights, dtype=np.float64)
        if edge_weights.shape != (len(pairs),):
            raise InputError(f'expected {len(pairs)} edge weights, got {edge_weights.shape}')
        if not np.all(np.isfinite(edge_weights)) or np.any(edge_weights <= 0):
            raise InputError('reweighted edges must keep strictly positive finite weights')
        return _weighted_from_pairs(self.num_nodes, pairs[:, 0], pairs[:, 1], edge_weights)

    def scaled(self, factor):
        if not factor > 0:
            raise InputError(f'scale factor must be positive, got {factor}')
        return WeightedGraph(self.num_nodes, _freeze((self.weights * float(factor)).tocsr()))

    def to_discrete(self):
        """Drop the weights, keeping the edge structure"""
        pattern = self.weights.copy()
        pattern.data = np.ones_like(pattern.data, dtype=np.int64)
        return DiscreteGraph(self.num_nodes, _freeze(pattern.astype(np.int64).tocsr()))

    def __repr__(self):
        return f'<WeightedGraph nodes={self.num_nodes} edges={self.num_edges}>'


def build_discrete_graph(num_nodes, edge_pairs):
    """Symmetrize, deduplicate and drop self-loops from an edge list"""
    num_nodes = _check_count(num_nodes)
    pairs = _as_id_array(edge_pairs, 'edge_pairs')
    if pairs.size and (pairs.ndim != 2 or pairs.shape[1] != 2):
        raise InputError('edge_pairs must be a sequence of (u, v) pairs')
    pairs = pairs.reshape(-1, 2)
    rows, cols = pairs[:, 0], pairs[:, 1]
    _check_ids(num_nodes, rows, cols)

    loops = rows == cols
    if loops.any():
        logger.debug('dropping %d self-loop entries', int(loops.sum()))
    rows, cols = rows[~loops], cols[~loops]

    sym_rows = np.concatenate([rows, cols])
    sym_cols = np.concatenate([cols, rows])
    matrix = sp.csr_matrix(
        (np.ones(len(sym_rows), dtype=np.int64), (sym_rows, sym_cols)),
        shape=(num_nodes, num_nodes),
    )
    matrix.sum_duplicates()
    matrix.data = np.ones_like(matrix.data)
    matrix.sort_indices()
    graph = DiscreteGraph(num_nodes, _freeze(matrix))
    logger.debug('built %r', graph)
    return graph


def _weighted_from_pairs(num_nodes, rows, cols, values):
    sym_rows = np.concatenate([rows, cols])
    sym_cols = np.concatenate([cols, rows])
    sym_values = np.concatenate([values, values])
    matrix = sp.csr_matrix((sym_values, (sym_rows, sym_cols)), shape=(num_nodes, num_nodes))
    matrix.sort_indices()
    return WeightedGraph(num_nodes, _freeze(matrix))


def build_weighted_graph(num_nodes, weighted_pairs):
    """Canonical weighted graph from (u, v, w) triplets.

    If both (u, v, w1) and (v, u, w2) are given the undirected weight is their
    mean. Zero weights are dropped, negative weights and repeated directed
    entries are rejected.
    """
    num_nodes = _check_count(num_nodes)
    entries = list(weighted_pairs)
    if entries and any(len(entry) != 3 for entry in entries):
        raise InputError('weighted_pairs must be a sequence of (u, v, w) triplets')
    rows = _as_id_array([entry[0] for entry in entries], 'weighted_pairs')
    cols = _as_id_array([entry[1] for entry in entries], 'weighted_pairs')
    values = np.asarray([entry[2] for entry in entries], dtype=np.float64)
    _check_ids(num_nodes, rows, cols)

    if not np.all(np.isfinite(values)):
        raise InputError('edge weights must be finite')
    if np.any(values < 0):
        first = int(np.argmax(values < 0))
        raise InputError(
            f'negative weight {values[first]} on edge ({rows[first]}, {cols[first]})'
        )

    directed_keys = rows * num_nodes + cols
    unique_keys, counts = np.unique(directed_keys, return_counts=True)
    if np.any(counts > 1):
        key = int(unique_keys[np.argmax(counts > 1)])
        raise InputError(f'duplicate directed entry ({key // num_nodes}, {key % num_nodes})')

    loops = rows == cols
    if loops.any():
        logger.warning('dropping %d self-loop weights', int(loops.sum()))
    rows, cols, values = rows[~loops], cols[~loops], values[~loops]

    low, high = np.minimum(rows, cols), np.maximum(rows, cols)
    undirected_keys, inverse = np.unique(low * num_nodes + high, return_inverse=True)
    sums = np.bincount(inverse, weights=values, minlength=len(undirected_keys))
    counts = np.bincount(inverse, minlength=len(undirected_keys))
    merged = sums / np.maximum(counts, 1)

    keep = merged > 0
    undirected_keys, merged = undirected_keys[keep], merged[keep]
    graph = _weighted_from_pairs(
        num_nodes, undirected_keys // num_nodes, undirected_keys % num_nodes, merged
    )
    logger.debug('built %r', graph)
    return graph


def weighted_from_dense(matrix, tolerance=1e-9):
    """Canonical weighted graph from a dense symmetric nonnegative matrix"""
    dense = np.asarray(matrix, dtype=np.float64)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise InputError(f'dense adjacency must be square, got shape {dense.shape}')
    if not np.all(np.isfinite(dense)):
        raise InputError('dense adjacency must be finite')
    if np.any(dense < 0):
        row, col = np.argwhere(dense < 0)[0]
        raise InputError(f'negative entry {dense[row, col]} at ({row}, {col})')
    deviation = np.abs(dense - dense.T)
    if np.any(deviation > tolerance):
        row, col = np.unravel_index(np.argmax(deviation), deviation.shape)
        raise InputError(
            f'asymmetric entry at ({row}, {col}): {dense[row, col]} vs {dense[col, row]}'
        )
    if np.any(np.diag(dense) != 0):
        logger.warning('dropping %d nonzero diagonal entries', int(np.count_nonzero(np.diag(dense))))
    upper = np.triu((dense + dense.T) / 2.0, k=1)
    rows, cols = np.nonzero(upper)
    return _weighted_from_pairs(dense.shape[0], rows, cols, upper[rows, cols])
