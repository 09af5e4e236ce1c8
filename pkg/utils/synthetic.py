"""
Synthetic population graphs: Gaussian class clusters (or a linear regression
target) in a feature space with a few informative dimensions, connected by a
Euclidean k-nearest-neighbour graph.
"""

from dataclasses import dataclass, field
import itertools
import logging
from typing import Optional

from marshmallow import Schema, ValidationError, fields, validate, validates_schema
import numpy as np
from sklearn.datasets import make_blobs, make_regression
from sklearn.metrics import pairwise_distances_chunked

from models.errors import InputError, SpecError
from models.graph import build_discrete_graph
from models.labels import LabelKind, NodeLabels, normalize_regression_labels
from utils.dataset_io import Snapshot, SnapshotSequence

logger = logging.getLogger(__name__)

CENTER_OFFSET = 2.0


class SyntheticSpecSchema(Schema):
    num_nodes = fields.Int(required=True, validate=validate.Range(min=2))
    num_features = fields.Int(load_default=50, validate=validate.Range(min=1))
    num_informative = fields.Int(load_default=5, validate=validate.Range(min=1))
    task = fields.Str(load_default='classification', validate=validate.OneOf(['classification', 'regression']))
    num_classes = fields.Int(load_default=2, validate=validate.Range(min=1))
    knn_k = fields.Int(load_default=5, validate=validate.Range(min=1))
    seed = fields.Int(load_default=0, validate=validate.Range(min=0))

    @validates_schema
    def validate_shape(self, data, **kwargs):
        if data['num_informative'] > data['num_features']:
            raise ValidationError('num_informative must not exceed num_features', 'num_informative')
        if data['knn_k'] >= data['num_nodes']:
            raise ValidationError('knn_k must be smaller than num_nodes', 'knn_k')
        if data['task'] == 'classification' and data['num_classes'] > 2 ** data['num_informative']:
            raise ValidationError('at most 2 ** num_informative classes fit on the center hypercube',
                                  'num_classes')


spec_schema = SyntheticSpecSchema()


@dataclass(frozen=True)
class SyntheticSpec:
    num_nodes: int
    num_features: int = 50
    num_informative: int = 5
    task: LabelKind = LabelKind.CLASSIFICATION
    num_classes: int = 2
    knn_k: int = 5
    seed: int = 0

    @classmethod
    def load(cls, data):
        """Validate a plain mapping into a spec"""
        try:
            values = spec_schema.load(data)
        except ValidationError as err:
            raise SpecError(f'invalid synthetic spec: {err.messages}') from err
        values['task'] = LabelKind(values['task'])
        return cls(**values)

    def __post_init__(self):
        try:
            object.__setattr__(self, 'task', LabelKind(self.task))
        except ValueError as err:
            raise SpecError(f'invalid synthetic spec: {err}') from err
        data = {
            'num_nodes': self.num_nodes,
            'num_features': self.num_features,
            'num_informative': self.num_informative,
            'task': self.task.value,
            'num_classes': self.num_classes,
            'knn_k': self.knn_k,
            'seed': self.seed,
        }
        errors = spec_schema.validate(data)
        if errors:
            raise SpecError(f'invalid synthetic spec: {errors}')


@dataclass(frozen=True, eq=False)
class SyntheticDataset:
    features: np.ndarray
    labels: NodeLabels
    graph: object
    spec: Optional[SyntheticSpec] = field(default=None)


def knn_graph(features, k):
    """Union-symmetrized Euclidean kNN graph; ties go to the lower node id"""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise InputError('features must be a 2-d table (nodes x features)')
    n = features.shape[0]
    if isinstance(k, bool) or int(k) != k or k < 1:
        raise InputError(f'k must be a positive integer, got {k!r}')
    if k >= n:
        raise InputError(f'k={k} must be smaller than the number of nodes ({n})')
    if not np.all(np.isfinite(features)):
        raise InputError('features must be finite')

    def nearest(chunk, start):
        chunk = np.array(chunk, dtype=np.float64)
        rows = np.arange(chunk.shape[0])
        chunk[rows, start + rows] = np.inf
        return np.argsort(chunk, axis=1, kind='stable')[:, :k]

    picks = np.vstack(list(pairwise_distances_chunked(features, reduce_func=nearest, metric='euclidean')))
    sources = np.repeat(np.arange(n), k)
    graph = build_discrete_graph(n, np.column_stack([sources, picks.ravel()]))
    logger.info('built %d-NN graph: %r', k, graph)
    return graph


def _hypercube_centers(num_classes, dimensions):
    vertices = itertools.islice(itertools.product((-CENTER_OFFSET, CENTER_OFFSET), repeat=dimensions), num_classes)
    return np.asarray(list(vertices), dtype=np.float64)


def generate_synthetic(spec):
    """Features, labels and kNN graph, fully determined by `spec.seed`"""
    rng = np.random.default_rng(spec.seed)
    noise_width = spec.num_features - spec.num_informative
    if spec.task is LabelKind.CLASSIFICATION:
        informative, class_ids = make_blobs(
            n_samples=spec.num_nodes,
            centers=_hypercube_centers(spec.num_classes, spec.num_informative),
            cluster_std=1.0,
            random_state=spec.seed,
        )
        labels = NodeLabels.classification(class_ids, num_classes=spec.num_classes)
        noise = rng.standard_normal((spec.num_nodes, noise_width))
        features = np.hstack([informative, noise])
    else:
        features, target = make_regression(
            n_samples=spec.num_nodes,
            n_features=spec.num_features,
            n_informative=spec.num_informative,
            noise=0.1,
            shuffle=False,
            random_state=spec.seed,
        )
        labels = normalize_regression_labels(target)
    graph = knn_graph(features, spec.knn_k)
    return SyntheticDataset(features=features, labels=labels, graph=graph, spec=spec)


def rewired_snapshot_sequence(nodes_per_class=20, degree=16, steps=5, base_accuracy=0.5):
    """Two-class regular graphs whose same-class share grows from 1/2 to 1.

    Every node has `degree` neighbors; at each step more of them are in its
    own class, so homophily rises, D_CCNS falls and the planted accuracy rises
    linearly with the same-class share.
    """
    if degree % 4 or degree < 4:
        raise InputError('degree must be a positive multiple of 4')
    half = degree // 2
    if degree >= nodes_per_class:
        raise InputError('nodes_per_class too small for the requested degree')
    if steps < 2:
        raise InputError('a trajectory needs at least two steps')

    offsets = np.unique(np.round(np.linspace(half // 2, half, steps)).astype(int))
    m = nodes_per_class
    labels = NodeLabels.classification(np.repeat([0, 1], m), num_classes=2)
    snapshots = []
    for step, reach in enumerate(offsets):
        same = 2 * reach
        pairs = []
        for base in (0, m):
            for i in range(m):
                for offset in range(1, reach + 1):
                    pairs.append((base + i, base + (i + offset) % m))
        for i in range(m):
            for shift in range(degree - same):
                pairs.append((i, m + (i + shift) % m))
        graph = build_discrete_graph(2 * m, pairs)
        accuracy = base_accuracy + (1.0 - base_accuracy) * (same / degree)
        snapshots.append(Snapshot(step, graph, accuracy))
    return SnapshotSequence(snapshots), labels
