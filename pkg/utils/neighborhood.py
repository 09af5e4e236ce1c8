"""
Exact k-hop neighborhoods for discrete graphs.

Rows are expanded in blocks of source nodes with sparse boolean products, so a
3-hop expansion of a ~20k node citation graph never materializes an n x n
dense matrix. Blocks are independent and may run in parallel through joblib;
the stacked result is the same for any worker count or block size.
"""

import logging

from joblib import Parallel, delayed
import numpy as np
import scipy.sparse as sp

from models.errors import InputError
from models.neighborhood import KHopNeighborhoods

logger = logging.getLogger(__name__)


def _binarize(matrix):
    matrix.data = np.ones_like(matrix.data)
    return matrix


def _expand_block(adjacency, start, stop, k, ring):
    reach = adjacency[start:stop].astype(np.int64)
    previous = None
    for _ in range(k - 1):
        previous = reach
        reach = _binarize((reach + reach @ adjacency).tocsr())
    if ring:
        if previous is None:
            previous = sp.csr_matrix(reach.shape, dtype=np.int64)
        reach = (reach - previous).tocsr()
        reach.eliminate_zeros()

    coo = reach.tocoo()
    keep = (coo.row + start != coo.col) & (coo.data > 0)
    block = sp.csr_matrix(
        (np.ones(int(keep.sum()), dtype=np.int8), (coo.row[keep], coo.col[keep])),
        shape=reach.shape,
    )
    block.sort_indices()
    return block


def _expand(graph, k, ring, chunk_size, n_jobs):
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InputError(f'hop count k must be an integer >= 1, got {k!r}')
    k = int(k)
    if chunk_size < 1:
        raise InputError(f'chunk_size must be positive, got {chunk_size}')

    adjacency = graph.adjacency
    n = graph.num_nodes
    bounds = [(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]
    if not bounds:
        matrix = sp.csr_matrix((0, 0), dtype=np.int8)
    elif n_jobs == 1 or len(bounds) == 1:
        matrix = sp.vstack([_expand_block(adjacency, a, b, k, ring) for a, b in bounds], format='csr')
    else:
        blocks = Parallel(n_jobs=n_jobs, prefer='threads')(
            delayed(_expand_block)(adjacency, a, b, k, ring) for a, b in bounds
        )
        matrix = sp.vstack(blocks, format='csr')
    matrix.sort_indices()
    logger.debug('%d-hop %s expansion: %d entries over %d nodes',
                 k, 'ring' if ring else 'cumulative', matrix.nnz, n)
    return KHopNeighborhoods(k=k, matrix=matrix, ring=ring)


def khop_neighborhoods(graph, k, chunk_size=1024, n_jobs=1):
    """All u != v with shortest-path distance 1 <= d(v, u) <= k"""
    return _expand(graph, k, False, chunk_size, n_jobs)


def ring_neighborhoods(graph, k, chunk_size=1024, n_jobs=1):
    """All u with shortest-path distance exactly k from v"""
    return _expand(graph, k, True, chunk_size, n_jobs)
