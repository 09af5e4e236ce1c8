from dataclasses import dataclass
import enum
from typing import Optional

import numpy as np

from .errors import InputError


class LabelKind(enum.Enum):
    CLASSIFICATION = 'classification'
    REGRESSION = 'regression'


class Split(enum.Enum):
    TRAIN = 'train'
    VAL = 'val'
    TEST = 'test'
    NONE = 'none'


_SPLIT_CODES = {split: code for code, split in enumerate(Split)}


def _readonly(array):
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class NodeLabels:
    """Per-node targets: class ids, or raw regression values with their [0, 1] view"""

    kind: LabelKind
    class_ids: Optional[np.ndarray] = None
    num_classes: int = 0
    raw_values: Optional[np.ndarray] = None
    normalized_values: Optional[np.ndarray] = None

    @classmethod
    def classification(cls, class_ids, num_classes=None):
        ids = np.asarray(class_ids)
        if ids.ndim != 1:
            raise InputError('class ids must be a flat sequence')
        if ids.size and not np.issubdtype(ids.dtype, np.integer):
            if not np.all(np.isfinite(ids)) or np.any(ids != np.round(ids)):
                raise InputError('class ids must be integers')
        ids = ids.astype(np.int64)
        if np.any(ids < 0):
            raise InputError(f'class id {int(ids[ids < 0][0])} is negative')
        inferred = int(ids.max()) + 1 if ids.size else 1
        if num_classes is None:
            num_classes = inferred
        if num_classes < 1:
            raise InputError('num_classes must be at least 1')
        if inferred > num_classes:
            raise InputError(f'class id {inferred - 1} not below num_classes={num_classes}')
        return cls(LabelKind.CLASSIFICATION, class_ids=_readonly(ids), num_classes=int(num_classes))

    @property
    def num_nodes(self):
        if self.kind is LabelKind.CLASSIFICATION:
            return len(self.class_ids)
        return len(self.raw_values)

    @property
    def is_classification(self):
        return self.kind is LabelKind.CLASSIFICATION

    def to_dict(self):
        if self.is_classification:
            return {
                'kind': self.kind.value,
                'num_classes': self.num_classes,
                'class_ids': self.class_ids.tolist(),
            }
        return {
            'kind': self.kind.value,
            'raw_values': self.raw_values.tolist(),
            'normalized_values': self.normalized_values.tolist(),
        }

    def __repr__(self):
        if self.is_classification:
            return f'<NodeLabels classification nodes={self.num_nodes} classes={self.num_classes}>'
        return f'<NodeLabels regression nodes={self.num_nodes}>'


def normalize_regression_labels(raw):
    """Min-max normalize regression targets over all nodes; constant targets map to 0"""
    values = np.asarray(raw, dtype=np.float64)
    if values.ndim != 1:
        raise InputError('regression labels must be a flat sequence of reals')
    if values.size == 0:
        raise InputError('regression labels need at least one node')
    if not np.all(np.isfinite(values)):
        node = int(np.argmax(~np.isfinite(values)))
        raise InputError(f'regression label of node {node} is not finite')
    low, high = values.min(), values.max()
    if high > low:
        normalized = (values - low) / (high - low)
    else:
        normalized = np.zeros_like(values)
    return NodeLabels(
        LabelKind.REGRESSION,
        raw_values=_readonly(values.copy()),
        normalized_values=_readonly(np.clip(normalized, 0.0, 1.0)),
    )


@dataclass(frozen=True, eq=False)
class SplitMask:
    """Exactly one of train/val/test/none per node"""

    codes: np.ndarray

    @classmethod
    def from_tags(cls, tags):
        try:
            splits = [tag if isinstance(tag, Split) else Split(tag) for tag in tags]
        except ValueError as err:
            raise InputError(str(err)) from err
        codes = np.asarray([_SPLIT_CODES[split] for split in splits], dtype=np.int8)
        return cls(_readonly(codes))

    @property
    def num_nodes(self):
        return len(self.codes)

    def nodes(self, split):
        """Sorted ids of the nodes tagged with `split`"""
        split = split if isinstance(split, Split) else Split(split)
        return np.flatnonzero(self.codes == _SPLIT_CODES[split])

    def counts(self):
        return {split.value: int(np.count_nonzero(self.codes == code)) for split, code in _SPLIT_CODES.items()}

    def __repr__(self):
        return f'<SplitMask {self.counts()}>'
