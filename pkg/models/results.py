from dataclasses import dataclass, field
import enum
import math
from typing import Dict, List, Optional, Tuple

import numpy as np


class CcnsMode(enum.Enum):
    DISCRETE = 'discrete'
    CONTINUOUS = 'continuous'


class MetricId(enum.Enum):
    HCONT = 'continuous_homophily'
    HREG_CONT = 'continuous_regression_homophily'


def summarize(values):
    """Mean and population std with exactly rounded sums, independent of evaluation order"""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        return None, None
    mean = math.fsum(values.tolist()) / values.size
    variance = math.fsum(((values - mean) ** 2).tolist()) / values.size
    return mean, math.sqrt(variance)


@dataclass(frozen=True, eq=False)
class HomophilyResult:
    """Per-node homophily over the included nodes of the evaluated set.

    `node_ids` and `values` are aligned; nodes with an empty (or zero-weight)
    neighborhood are left out and counted in `num_excluded`. `mean` and `std`
    are None when no node is included.
    """

    metric: str
    k: int
    node_ids: np.ndarray
    values: np.ndarray
    num_excluded: int
    mean: Optional[float]
    std: Optional[float]

    @classmethod
    def from_values(cls, metric, k, node_ids, values, num_excluded):
        mean, std = summarize(values)
        return cls(metric, k, node_ids, values, int(num_excluded), mean, std)

    @property
    def per_node(self):
        return dict(zip(self.node_ids.tolist(), self.values.tolist()))

    def to_dict(self):
        return {
            'metric': self.metric,
            'k': self.k,
            'mean': self.mean,
            'std': self.std,
            'num_excluded': self.num_excluded,
            'per_node': self.per_node,
        }

    def __repr__(self):
        return f'<HomophilyResult {self.metric} k={self.k} mean={self.mean} excluded={self.num_excluded}>'


@dataclass(frozen=True, eq=False)
class CcnsMatrix:
    """Cross-class neighbourhood similarity between the classes listed in `classes`"""

    values: np.ndarray
    k: int
    mode: CcnsMode
    classes: Tuple[int, ...]
    num_zero_histograms: int = 0
    exclude_self_pairs: bool = False

    @property
    def num_classes(self):
        return len(self.classes)

    def __repr__(self):
        return f'<CcnsMatrix {self.mode.value} k={self.k} classes={self.num_classes}>'


@dataclass(frozen=True, eq=False)
class MetricGradient:
    """d metric / d w_uv per undirected edge, aligned with the graph's canonical edge pairs"""

    metric_id: MetricId
    edges: np.ndarray
    values: np.ndarray

    def as_mapping(self):
        return {(int(u), int(v)): float(g) for (u, v), g in zip(self.edges, self.values)}

    def to_dict(self):
        return {
            'metric': self.metric_id.value,
            'gradient': [[int(u), int(v), float(g)] for (u, v), g in zip(self.edges, self.values)],
        }


@dataclass(frozen=True)
class EdgeError:
    u: int
    v: int
    analytic: float
    numeric: float
    relative_error: float


@dataclass(frozen=True)
class GradientCheckReport:
    metric_id: MetricId
    step: float
    max_relative_error: float
    mean_relative_error: float
    max_edge_relative_error: float
    num_edges: int
    num_shrunk_steps: int
    worst_edges: List[EdgeError] = field(default_factory=list)

    def to_dict(self):
        return {
            'metric': self.metric_id.value,
            'step': self.step,
            'num_edges': self.num_edges,
            'max_relative_error': self.max_relative_error,
            'mean_relative_error': self.mean_relative_error,
            'max_edge_relative_error': self.max_edge_relative_error,
            'num_shrunk_steps': self.num_shrunk_steps,
            'worst_edges': [
                {
                    'u': edge.u,
                    'v': edge.v,
                    'analytic': edge.analytic,
                    'numeric': edge.numeric,
                    'relative_error': edge.relative_error,
                }
                for edge in self.worst_edges
            ],
        }


@dataclass(frozen=True)
class MetricRecord:
    """One report row: a metric at hop k on one split, optionally at one snapshot step"""

    metric: str
    k: int
    split: str
    mean: Optional[float] = None
    std: Optional[float] = None
    excluded: Optional[int] = None
    step: Optional[int] = None
    performance: Optional[float] = None
    d_ccns: Optional[float] = None
    pearson: Optional[float] = None
    direction: Optional[int] = None
    mean_nondecreasing: Optional[bool] = None
    mean_nonincreasing: Optional[bool] = None
    std_nonincreasing: Optional[bool] = None
    classes: Optional[List[int]] = None
    matrix: Optional[List[float]] = None

    @classmethod
    def from_homophily(cls, result, split, **extra):
        return cls(
            metric=result.metric,
            k=result.k,
            split=split,
            mean=result.mean,
            std=result.std,
            excluded=result.num_excluded,
            **extra,
        )

    @classmethod
    def from_ccns(cls, matrix, distance, split, **extra):
        metric = 'ccns' if matrix.mode is CcnsMode.DISCRETE else 'continuous_ccns'
        return cls(
            metric=metric,
            k=matrix.k,
            split=split,
            excluded=matrix.num_zero_histograms,
            d_ccns=distance,
            classes=list(matrix.classes),
            matrix=matrix.values.ravel().tolist(),
            **extra,
        )


@dataclass(frozen=True)
class StepMetrics:
    step: int
    performance: Optional[float]
    values: Dict[str, Tuple[Optional[float], Optional[float]]]


@dataclass(frozen=True)
class TrajectoryAnalysis:
    """Per-step metric means/stds and their correlation with the performance series"""

    steps: List[StepMetrics]
    pearson: Dict[str, Optional[float]]
    direction: Dict[str, Optional[int]]
    mean_nondecreasing: Dict[str, bool]
    mean_nonincreasing: Dict[str, bool]
    std_nonincreasing: Dict[str, Optional[bool]]
    lower_is_better: bool = False

    def series(self, metric):
        return [step.values[metric][0] for step in self.steps]
