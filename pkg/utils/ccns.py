"""
Cross-class neighbourhood similarity (CCNS) and the CCNS distance.

The class-pair average of cosine similarities is bilinear once every
histogram is scaled to unit length, so the matrix is built from per-class
sums of normalized histograms instead of all node pairs:

    CCNS(c, c') = <S_c, S_c'> / (|V_c| |V_c'|),   S_c = sum_{u in V_c} d(u) / |d(u)|

Zero histograms (isolated nodes) stay zero, i.e. contribute cosine 0.
"""

import logging

import numpy as np

from models.errors import InputError, InvariantViolation
from models.graph import WeightedGraph
from models.labels import LabelKind
from models.neighborhood import KHopNeighborhoods
from models.results import CcnsMatrix, CcnsMode
from utils.homophily import require_kind, resolve_nodes

logger = logging.getLogger(__name__)


def _mode_of(source, mode):
    inferred = CcnsMode.CONTINUOUS if isinstance(source, WeightedGraph) else CcnsMode.DISCRETE
    if mode is not None and CcnsMode(mode) is not inferred:
        raise InputError(f'{CcnsMode(mode).value} mode does not match a {type(source).__name__}')
    if inferred is CcnsMode.DISCRETE and not isinstance(source, KHopNeighborhoods):
        raise InputError('discrete CCNS needs KHopNeighborhoods')
    return inferred


def _source_matrix(source):
    return source.weights if isinstance(source, WeightedGraph) else source.matrix


def neighbor_histogram(v, source, labels, mode=None):
    """Per-class neighbor count (discrete) or incident weight mass (continuous) of node v"""
    mode = _mode_of(source, mode)
    matrix = _source_matrix(source)
    require_kind(labels, LabelKind.CLASSIFICATION, matrix.shape[0])
    if not 0 <= v < matrix.shape[0]:
        raise InputError(f'node {v} out of range')
    start, stop = matrix.indptr[v], matrix.indptr[v + 1]
    neighbors = matrix.indices[start:stop]
    mass = matrix.data[start:stop] if mode is CcnsMode.CONTINUOUS else None
    return np.bincount(labels.class_ids[neighbors], weights=mass, minlength=labels.num_classes).astype(np.float64)


def neighbor_histograms(source, labels, mode=None):
    """Histogram of every node as an (n, num_classes) array"""
    mode = _mode_of(source, mode)
    matrix = _source_matrix(source)
    require_kind(labels, LabelKind.CLASSIFICATION, matrix.shape[0])
    n, num_classes = matrix.shape[0], labels.num_classes
    rows = np.repeat(np.arange(n), np.diff(matrix.indptr))
    keys = rows * num_classes + labels.class_ids[matrix.indices]
    mass = matrix.data.astype(np.float64) if mode is CcnsMode.CONTINUOUS else None
    flat = np.bincount(keys, weights=mass, minlength=n * num_classes)
    return flat.reshape(n, num_classes).astype(np.float64)


def _unit_rows(histograms):
    norms = np.sqrt(np.einsum('ij,ij->i', histograms, histograms))
    nonzero = norms > 0
    unit = np.zeros_like(histograms)
    unit[nonzero] = histograms[nonzero] / norms[nonzero, None]
    return unit, nonzero


def ccns_matrix(graph, labels, source, mode=None, restrict=None,
                exclude_self_pairs=False, allow_empty_classes=False):
    """Class-pair mean cosine similarity of neighbor-label histograms.

    `source` is a KHopNeighborhoods of `graph` (discrete mode) or the
    WeightedGraph itself (continuous mode). Member sets V_c are limited to
    `restrict` when given; histograms always use the full graph.
    """
    require_kind(labels, LabelKind.CLASSIFICATION, graph.num_nodes)
    mode = _mode_of(source, mode)
    if _source_matrix(source).shape[0] != graph.num_nodes:
        raise InputError('neighborhood source does not match the graph size')
    if labels.num_classes < 2:
        raise InputError('CCNS needs at least two classes')

    nodes = resolve_nodes(graph.num_nodes, restrict)
    y = labels.class_ids[nodes]
    counts = np.bincount(y, minlength=labels.num_classes)
    empty = np.flatnonzero(counts == 0)
    if empty.size:
        if not allow_empty_classes:
            raise InputError(f'class {int(empty[0])} has no member nodes')
        logger.warning('classes %s have no members in the evaluated set; dropped from CCNS', empty.tolist())

    unit, nonzero = _unit_rows(neighbor_histograms(source, labels, mode)[nodes])
    num_zero = int(np.count_nonzero(~nonzero))
    if num_zero:
        logger.debug('%d nodes with a zero neighbor histogram count as cosine 0', num_zero)

    classes = np.flatnonzero(counts > 0)
    class_sums = np.stack(
        [np.bincount(y, weights=unit[:, j], minlength=labels.num_classes) for j in range(labels.num_classes)],
        axis=1,
    )[classes]
    members = counts[classes].astype(np.float64)

    pair_sums = class_sums @ class_sums.T
    denominators = np.outer(members, members)
    if exclude_self_pairs:
        self_pairs = np.bincount(y[nonzero], minlength=labels.num_classes)[classes].astype(np.float64)
        np.fill_diagonal(pair_sums, np.diag(pair_sums) - self_pairs)
        np.fill_diagonal(denominators, members * (members - 1))
    with np.errstate(invalid='ignore', divide='ignore'):
        values = np.where(denominators > 0, pair_sums / np.where(denominators > 0, denominators, 1.0), 0.0)

    values = (values + values.T) / 2.0
    if np.any(values < -1e-9) or np.any(values > 1 + 1e-9):
        raise InvariantViolation('CCNS entry outside [0, 1]')
    values = np.clip(values, 0.0, 1.0)
    k = 1 if mode is CcnsMode.CONTINUOUS else source.k
    return CcnsMatrix(
        values=values,
        k=k,
        mode=mode,
        classes=tuple(int(c) for c in classes),
        num_zero_histograms=num_zero,
        exclude_self_pairs=bool(exclude_self_pairs),
    )


def ccns_distance(matrix):
    """Entrywise L1 distance of the CCNS matrix from the identity, divided by the class count"""
    values = matrix.values if isinstance(matrix, CcnsMatrix) else np.asarray(matrix, dtype=np.float64)
    if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] == 0:
        raise InputError(f'CCNS matrix must be square and nonempty, got shape {values.shape}')
    n = values.shape[0]
    return float(np.abs(values - np.eye(n)).sum() / n)
