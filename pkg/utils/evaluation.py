"""
Split-wise evaluation of every metric that applies to a graph and its labels.
"""

from collections.abc import Mapping
import logging

from models.errors import InputError, LabelTypeError
from models.graph import WeightedGraph
from models.labels import LabelKind, Split
from models.results import MetricRecord
from utils.ccns import ccns_distance, ccns_matrix
from utils.homophily import (
    continuous_homophily,
    continuous_regression_homophily,
    node_homophily,
    regression_homophily,
)
from utils.neighborhood import khop_neighborhoods

logger = logging.getLogger(__name__)

EVALUATED_SPLITS = (Split.TRAIN, Split.VAL, Split.TEST)


class MetricEvaluator:
    """Computes homophily and CCNS records for k = 1..k_max on every split"""

    def __init__(self, n_jobs=1, chunk_size=1024, exclude_self_pairs=False):
        self.n_jobs = n_jobs
        self.chunk_size = chunk_size
        self.exclude_self_pairs = exclude_self_pairs

    @classmethod
    def from_config(cls, config, **overrides):
        """`config` is the Config class or a Flask config mapping"""
        lookup = config.get if isinstance(config, Mapping) else lambda key, default: getattr(config, key, default)
        settings = {
            'n_jobs': lookup('GAM_WORKERS', 1),
            'chunk_size': lookup('GAM_CHUNK_SIZE', 1024),
        }
        settings.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**settings)

    def split_sets(self, splits, num_nodes):
        """(name, restrict) pairs: the whole graph first, then every nonempty split"""
        sets = [('all', None)]
        if splits is None:
            return sets
        if splits.num_nodes != num_nodes:
            raise InputError(f'{splits.num_nodes} split tags for a graph with {num_nodes} nodes')
        for split in EVALUATED_SPLITS:
            nodes = splits.nodes(split)
            if nodes.size:
                sets.append((split.value, nodes))
            else:
                logger.info('split %s is empty, skipping it', split.value)
        return sets

    def neighborhoods(self, graph, k):
        return khop_neighborhoods(graph, k, chunk_size=self.chunk_size, n_jobs=self.n_jobs)

    def ccns_record(self, graph, labels, source, name, restrict, **extra):
        matrix = ccns_matrix(
            graph,
            labels,
            source,
            restrict=restrict,
            exclude_self_pairs=self.exclude_self_pairs,
            allow_empty_classes=restrict is not None,
        )
        return MetricRecord.from_ccns(matrix, ccns_distance(matrix), name, **extra)

    def evaluate(self, graph, labels, splits=None, k_max=1, task=None):
        """Report records ordered by hop, then split, then metric"""
        if task is not None and LabelKind(task) is not labels.kind:
            raise LabelTypeError(f'{LabelKind(task).value} evaluation got {labels.kind.value} labels')
        if isinstance(k_max, bool) or int(k_max) != k_max or k_max < 1:
            raise InputError(f'k_max must be an integer >= 1, got {k_max!r}')
        sets = self.split_sets(splits, graph.num_nodes)
        if isinstance(graph, WeightedGraph):
            return self._evaluate_weighted(graph, labels, sets, k_max)

        records = []
        for k in range(1, int(k_max) + 1):
            nbh = self.neighborhoods(graph, k)
            for name, restrict in sets:
                if labels.is_classification:
                    result = node_homophily(graph, labels, nbh, restrict=restrict)
                    records.append(MetricRecord.from_homophily(result, name))
                    if labels.num_classes >= 2:
                        records.append(self.ccns_record(graph, labels, nbh, name, restrict))
                else:
                    result = regression_homophily(graph, labels, nbh, restrict=restrict)
                    records.append(MetricRecord.from_homophily(result, name))
            logger.info('evaluated k=%d on %d node sets', k, len(sets))
        return records

    def _evaluate_weighted(self, graph, labels, sets, k_max):
        if k_max > 1:
            raise InputError(
                'k-hop metrics are not defined for weighted graphs (edge weights would have to be '
                'composed along paths); use k_max=1'
            )
        records = []
        for name, restrict in sets:
            if labels.is_classification:
                result = continuous_homophily(graph, labels, restrict=restrict)
                records.append(MetricRecord.from_homophily(result, name))
                if labels.num_classes >= 2:
                    records.append(self.ccns_record(graph, labels, graph, name, restrict))
            else:
                result = continuous_regression_homophily(graph, labels, restrict=restrict)
                records.append(MetricRecord.from_homophily(result, name))
        return records
