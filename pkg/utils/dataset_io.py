"""
Line-oriented text formats for graphs, labels, splits, snapshot manifests and
metric reports.

Edge list: node count line, then "u v" per line. Weighted triplets: node
count, then "u v w". Dense: node count, then n rows of n reals. Labels and
splits: one token per line, line i describing node i. Blank lines and lines
starting with '#' are ignored everywhere.
"""

from dataclasses import dataclass
import csv
import json
import logging
import math
import os
from typing import List, Optional, Union

from marshmallow import Schema, fields
import numpy as np

from models.errors import DatasetParseError, InputError, LabelTypeError
from models.graph import DiscreteGraph, WeightedGraph, build_discrete_graph, build_weighted_graph, weighted_from_dense
from models.labels import LabelKind, NodeLabels, Split, SplitMask, normalize_regression_labels

logger = logging.getLogger(__name__)


def _content_lines(stream):
    for number, line in enumerate(stream, start=1):
        text = line.strip()
        if text and not text.startswith('#'):
            yield number, text


def _node_count(lines, path=None):
    try:
        number, text = next(lines)
    except StopIteration:
        raise DatasetParseError('missing node count header', line=1, path=path)
    try:
        count = int(text)
    except ValueError:
        raise DatasetParseError(f'node count must be an integer, got {text!r}', line=number, path=path)
    if count < 0:
        raise DatasetParseError('node count must be nonnegative', line=number, path=path)
    return count


def _parse_id(token, num_nodes, number, path):
    try:
        node = int(token)
    except ValueError:
        raise DatasetParseError(f'node id must be an integer, got {token!r}', line=number, path=path)
    if not 0 <= node < num_nodes:
        raise DatasetParseError(f'node id {node} out of range for {num_nodes} nodes', line=number, path=path)
    return node


def _parse_real(token, number, path):
    try:
        value = float(token)
    except ValueError:
        raise DatasetParseError(f'expected a real number, got {token!r}', line=number, path=path)
    if not math.isfinite(value):
        raise DatasetParseError(f'value {token!r} is not finite', line=number, path=path)
    return value


def parse_edge_list(stream, path=None):
    """Discrete graph from a node-count header and "u v" lines"""
    lines = _content_lines(stream)
    num_nodes = _node_count(lines, path)
    pairs = []
    for number, text in lines:
        tokens = text.split()
        if len(tokens) != 2:
            raise DatasetParseError(f'expected "u v", got {text!r}', line=number, path=path)
        pairs.append((_parse_id(tokens[0], num_nodes, number, path), _parse_id(tokens[1], num_nodes, number, path)))
    graph = build_discrete_graph(num_nodes, pairs)
    logger.info('loaded %r%s', graph, f' from {path}' if path else '')
    return graph


def parse_weighted_matrix(stream, layout='triplets', path=None):
    """Weighted graph from "u v w" triplets or a dense n x n matrix"""
    lines = _content_lines(stream)
    num_nodes = _node_count(lines, path)
    if layout == 'triplets':
        triplets = []
        seen = set()
        for number, text in lines:
            tokens = text.split()
            if len(tokens) != 3:
                raise DatasetParseError(f'expected "u v w", got {text!r}', line=number, path=path)
            u = _parse_id(tokens[0], num_nodes, number, path)
            v = _parse_id(tokens[1], num_nodes, number, path)
            w = _parse_real(tokens[2], number, path)
            if w < 0:
                raise DatasetParseError(f'negative weight {w}', line=number, path=path)
            if (u, v) in seen:
                raise DatasetParseError(f'duplicate entry ({u}, {v})', line=number, path=path)
            seen.add((u, v))
            triplets.append((u, v, w))
        graph = build_weighted_graph(num_nodes, triplets)
    elif layout == 'dense':
        rows = []
        for number, text in lines:
            tokens = text.split()
            if len(tokens) != num_nodes:
                raise DatasetParseError(f'expected {num_nodes} values, got {len(tokens)}', line=number, path=path)
            row = [_parse_real(token, number, path) for token in tokens]
            if any(value < 0 for value in row):
                raise DatasetParseError('negative entry in dense matrix', line=number, path=path)
            rows.append(row)
        if len(rows) != num_nodes:
            raise DatasetParseError(f'expected {num_nodes} rows, got {len(rows)}', path=path)
        try:
            graph = weighted_from_dense(np.asarray(rows, dtype=np.float64).reshape(num_nodes, num_nodes))
        except InputError as err:
            raise DatasetParseError(str(err), path=path) from err
    else:
        raise InputError(f'unknown weighted layout {layout!r}')
    logger.info('loaded %r%s', graph, f' from {path}' if path else '')
    return graph


def _looks_real(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def _check_count(values, num_nodes, what, path):
    if num_nodes is not None and len(values) != num_nodes:
        raise DatasetParseError(f'{len(values)} {what} for a graph with {num_nodes} nodes', path=path)


def parse_labels(stream, kind, num_nodes=None, path=None):
    """One label per line: nonnegative class ids, or reals normalized on load"""
    kind = LabelKind(kind)
    values = []
    for number, text in _content_lines(stream):
        if kind is LabelKind.CLASSIFICATION:
            try:
                value = int(text)
            except ValueError:
                if _looks_real(text):
                    raise LabelTypeError(
                        f'line {number}: real value {text!r} in classification labels (regression labels?)'
                    )
                raise DatasetParseError(f'class id must be a nonnegative integer, got {text!r}', line=number, path=path)
            if value < 0:
                raise DatasetParseError(f'class id {value} is negative', line=number, path=path)
        else:
            value = _parse_real(text, number, path)
        values.append(value)
    _check_count(values, num_nodes, 'labels', path)
    if not values:
        raise DatasetParseError('no labels found', path=path)
    if kind is LabelKind.CLASSIFICATION:
        return NodeLabels.classification(values)
    return normalize_regression_labels(values)


def parse_splits(stream, num_nodes=None, path=None):
    """One split tag per line from train, val, test, none"""
    tags = []
    known = {split.value for split in Split}
    for number, text in _content_lines(stream):
        if text not in known:
            raise DatasetParseError(f'unknown split tag {text!r}', line=number, path=path)
        tags.append(text)
    _check_count(tags, num_nodes, 'split tags', path)
    return SplitMask.from_tags(tags)


def parse_features(stream, path=None):
    """Whitespace feature table, one node per line"""
    rows = []
    for number, text in _content_lines(stream):
        row = [_parse_real(token, number, path) for token in text.split()]
        if rows and len(row) != len(rows[0]):
            raise DatasetParseError(f'expected {len(rows[0])} features, got {len(row)}', line=number, path=path)
        rows.append(row)
    if not rows:
        raise DatasetParseError('no feature rows found', path=path)
    return np.asarray(rows, dtype=np.float64)


@dataclass(frozen=True, eq=False)
class Snapshot:
    step: int
    graph: Union[DiscreteGraph, WeightedGraph]
    performance: Optional[float] = None


@dataclass(frozen=True, eq=False)
class SnapshotSequence:
    snapshots: List[Snapshot]

    @property
    def num_nodes(self):
        return self.snapshots[0].graph.num_nodes if self.snapshots else 0

    @property
    def weighted(self):
        return bool(self.snapshots) and isinstance(self.snapshots[0].graph, WeightedGraph)

    def __len__(self):
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)


def load_graph(path, weighted=False, layout='triplets'):
    if not os.path.exists(path):
        raise InputError(f'graph file not found: {path}')
    with open(path, 'r', encoding='utf-8') as handle:
        if weighted:
            return parse_weighted_matrix(handle, layout=layout, path=path)
        return parse_edge_list(handle, path=path)


def parse_snapshot_sequence(stream, base_dir='.', weighted=False, layout='triplets', path=None):
    """Manifest lines "step <idx> graph <path> [perf <real>]", graph paths relative to `base_dir`"""
    snapshots = []
    for number, text in _content_lines(stream):
        tokens = text.split()
        if len(tokens) not in (4, 6) or tokens[0] != 'step' or tokens[2] != 'graph' or (
                len(tokens) == 6 and tokens[4] != 'perf'):
            raise DatasetParseError(f'expected "step <idx> graph <path> [perf <real>]", got {text!r}',
                                    line=number, path=path)
        try:
            step = int(tokens[1])
        except ValueError:
            raise DatasetParseError(f'step index must be an integer, got {tokens[1]!r}', line=number, path=path)
        if snapshots and step <= snapshots[-1].step:
            raise DatasetParseError(f'step {step} does not follow step {snapshots[-1].step}', line=number, path=path)
        performance = _parse_real(tokens[5], number, path) if len(tokens) == 6 else None
        graph_path = tokens[3] if os.path.isabs(tokens[3]) else os.path.join(base_dir, tokens[3])
        if not os.path.exists(graph_path):
            raise DatasetParseError(f'graph file not found: {graph_path}', line=number, path=path)
        graph = load_graph(graph_path, weighted=weighted, layout=layout)
        if snapshots and graph.num_nodes != snapshots[0].graph.num_nodes:
            raise DatasetParseError(
                f'snapshot has {graph.num_nodes} nodes, expected {snapshots[0].graph.num_nodes}',
                line=number, path=path,
            )
        snapshots.append(Snapshot(step, graph, performance))
    if not snapshots:
        raise DatasetParseError('manifest lists no snapshots', path=path)
    return SnapshotSequence(snapshots)


def write_edge_list(graph, stream):
    stream.write(f'{graph.num_nodes}\n')
    for u, v in graph.edge_pairs():
        stream.write(f'{u} {v}\n')


def write_weighted_triplets(graph, stream):
    stream.write(f'{graph.num_nodes}\n')
    pairs, weights = graph.edge_pairs()
    for (u, v), w in zip(pairs, weights):
        stream.write(f'{u} {v} {float(w)!r}\n')


def write_features(features, stream):
    for row in np.asarray(features, dtype=np.float64):
        stream.write(' '.join(repr(float(value)) for value in row) + '\n')


def write_values(values, stream):
    for value in values:
        stream.write(f'{value!r}\n' if isinstance(value, float) else f'{value}\n')


# Reports

def round_significant(value, digits=6):
    """Round to `digits` significant digits; non-finite values become None"""
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f'{value:.{digits}g}')


class RoundedFloat(fields.Float):
    def _serialize(self, value, attr, obj, **kwargs):
        return round_significant(value)


class MetricRecordSchema(Schema):
    class Meta:
        ordered = True

    metric = fields.Str(required=True)
    k = fields.Int(required=True)
    split = fields.Str(required=True)
    mean = RoundedFloat(allow_none=True)
    std = RoundedFloat(allow_none=True)
    excluded = fields.Int(allow_none=True)
    step = fields.Int(allow_none=True)
    performance = RoundedFloat(allow_none=True)
    d_ccns = RoundedFloat(allow_none=True)
    pearson = RoundedFloat(allow_none=True)
    direction = fields.Int(allow_none=True)
    mean_nondecreasing = fields.Bool(allow_none=True)
    mean_nonincreasing = fields.Bool(allow_none=True)
    std_nonincreasing = fields.Bool(allow_none=True)
    classes = fields.List(fields.Int(), allow_none=True)
    matrix = fields.List(RoundedFloat(), allow_none=True)


REQUIRED_KEYS = ('metric', 'k', 'split', 'mean', 'std', 'excluded')
record_schema = MetricRecordSchema()


def format_cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, list):
        return ' '.join(format_cell(item) for item in value)
    if isinstance(value, float):
        return f'{value:.6g}'
    return str(value)


def write_report(records, stream, fmt='jsonl'):
    """One line per record; JSON keeps the six core keys and drops absent optional ones"""
    rows = [record_schema.dump(record) for record in records]
    if fmt == 'jsonl':
        for row in rows:
            row = {key: value for key, value in row.items() if key in REQUIRED_KEYS or value is not None}
            stream.write(json.dumps(row) + '\n')
    elif fmt == 'csv':
        columns = list(record_schema.fields)
        writer = csv.writer(stream, lineterminator='\n')
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(row.get(column)) for column in columns])
    else:
        raise InputError(f'unknown report format {fmt!r}')
