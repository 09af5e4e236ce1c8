from .errors import (
    DatasetParseError,
    GamError,
    InputError,
    InvariantViolation,
    LabelTypeError,
    SpecError,
)
from .graph import DiscreteGraph, WeightedGraph, build_discrete_graph, build_weighted_graph, weighted_from_dense
from .labels import LabelKind, NodeLabels, Split, SplitMask, normalize_regression_labels

__all__ = [
    'DatasetParseError',
    'GamError',
    'InputError',
    'InvariantViolation',
    'LabelTypeError',
    'SpecError',
    'DiscreteGraph',
    'WeightedGraph',
    'build_discrete_graph',
    'build_weighted_graph',
    'weighted_from_dense',
    'LabelKind',
    'NodeLabels',
    'Split',
    'SplitMask',
    'normalize_regression_labels',
]
