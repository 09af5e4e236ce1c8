"""
Metric trajectories over snapshot sequences and their correlation with an
externally supplied performance series.
"""

import logging
import math

import numpy as np
from scipy.stats import pearsonr

from models.errors import InputError
from models.labels import LabelKind
from models.results import MetricRecord, StepMetrics, TrajectoryAnalysis
from utils.ccns import ccns_distance, ccns_matrix
from utils.homophily import (
    continuous_homophily,
    continuous_regression_homophily,
    node_homophily,
    regression_homophily,
)
from utils.neighborhood import khop_neighborhoods

logger = logging.getLogger(__name__)

MIN_POINTS = 3


def available_metrics(weighted, kind):
    if kind is LabelKind.CLASSIFICATION:
        if weighted:
            return ('continuous_homophily', 'continuous_ccns_distance')
        return ('node_homophily', 'ccns_distance')
    if weighted:
        return ('continuous_regression_homophily',)
    return ('regression_homophily',)


def pearson_correlation(x, y):
    """Pearson coefficient, or None for fewer than three points or a constant series"""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise InputError('correlated series must have the same length')
    if x.size < MIN_POINTS or np.all(x == x[0]) or np.all(y == y[0]):
        return None
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        return None
    coefficient = float(pearsonr(x, y)[0])
    if math.isnan(coefficient):
        return None
    return min(1.0, max(-1.0, coefficient))


def _monotone(series, increasing):
    # undefined steps break monotonicity
    if any(value is None for value in series):
        return False
    pairs = zip(series, series[1:])
    if increasing:
        return all(b >= a for a, b in pairs)
    return all(b <= a for a, b in pairs)


def _step_values(graph, labels, names, k, restrict, n_jobs, exclude_self_pairs):
    """(mean, std) per metric plus the report records of one snapshot"""
    values, results = {}, {}
    nbh = None
    for name in names:
        if name == 'node_homophily':
            nbh = nbh or khop_neighborhoods(graph, k, n_jobs=n_jobs)
            result = node_homophily(graph, labels, nbh, restrict=restrict)
        elif name == 'regression_homophily':
            nbh = nbh or khop_neighborhoods(graph, k, n_jobs=n_jobs)
            result = regression_homophily(graph, labels, nbh, restrict=restrict)
        elif name == 'continuous_homophily':
            result = continuous_homophily(graph, labels, restrict=restrict)
        elif name == 'continuous_regression_homophily':
            result = continuous_regression_homophily(graph, labels, restrict=restrict)
        else:
            if name == 'ccns_distance':
                nbh = nbh or khop_neighborhoods(graph, k, n_jobs=n_jobs)
                source = nbh
            else:
                source = graph
            result = ccns_matrix(graph, labels, source, restrict=restrict,
                                 exclude_self_pairs=exclude_self_pairs,
                                 allow_empty_classes=restrict is not None)
            values[name] = (ccns_distance(result), None)
            results[name] = result
            continue
        values[name] = (result.mean, result.std)
        results[name] = result
    return values, results


def analyze_trajectory(sequence, labels, metrics=None, k=1, restrict=None, split='all',
                       lower_is_better=False, n_jobs=1, exclude_self_pairs=False):
    """Per-step metric summaries and metric-vs-performance correlations.

    With `lower_is_better` (error-like performance such as MAE) the series is
    negated before correlating, so improving graphs give a positive sign for
    homophily. Returns the analysis and its report records.
    """
    if labels.num_nodes != sequence.num_nodes:
        raise InputError(f'{labels.num_nodes} labels for snapshots with {sequence.num_nodes} nodes')
    if sequence.weighted and k != 1:
        raise InputError('weighted snapshots only support k=1')
    allowed = available_metrics(sequence.weighted, labels.kind)
    names = tuple(metrics) if metrics else allowed
    unknown = [name for name in names if name not in allowed]
    if unknown:
        raise InputError(f'metrics {unknown} do not apply here; choose from {list(allowed)}')

    steps, records = [], []
    for snapshot in sequence:
        values, results = _step_values(snapshot.graph, labels, names, k, restrict, n_jobs, exclude_self_pairs)
        steps.append(StepMetrics(snapshot.step, snapshot.performance, values))
        extra = {'step': snapshot.step, 'performance': snapshot.performance}
        for name in names:
            result = results[name]
            if name.endswith('ccns_distance'):
                records.append(MetricRecord.from_ccns(result, values[name][0], split, **extra))
            else:
                records.append(MetricRecord.from_homophily(result, split, **extra))

    timed = [step for step in steps if step.performance is not None]
    performance = [step.performance for step in timed]
    if lower_is_better:
        performance = [-value for value in performance]

    pearson, direction = {}, {}
    rising, falling, narrowing = {}, {}, {}
    for name in names:
        means = [step.values[name][0] for step in timed]
        if any(mean is None for mean in means):
            coefficient = None
        else:
            coefficient = pearson_correlation(means, performance) if timed else None
        if coefficient is None:
            logger.info('correlation of %s with performance is undefined (%d usable steps)', name, len(timed))
        pearson[name] = coefficient
        direction[name] = None if coefficient is None else int(np.sign(coefficient))

        series = [step.values[name][0] for step in steps]
        spread = [step.values[name][1] for step in steps]
        rising[name] = _monotone(series, increasing=True)
        falling[name] = _monotone(series, increasing=False)
        narrowing[name] = _monotone(spread, increasing=False) if any(s is not None for s in spread) else None
        records.append(MetricRecord(
            metric=name,
            k=k,
            split=split,
            pearson=coefficient,
            direction=direction[name],
            mean_nondecreasing=rising[name],
            mean_nonincreasing=falling[name],
            std_nonincreasing=narrowing[name],
        ))

    analysis = TrajectoryAnalysis(
        steps=steps,
        pearson=pearson,
        direction=direction,
        mean_nondecreasing=rising,
        mean_nonincreasing=falling,
        std_nonincreasing=narrowing,
        lower_is_better=lower_is_better,
    )
    return analysis, records
