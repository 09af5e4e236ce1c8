"""
Analytic edge-weight gradients of the continuous homophily metrics.

For an included node v with incident weight D_v and ratio r_v = N_v / D_v the
quotient rule gives d r_v / d w_uv = (t_uv - r_v) / D_v, where t_uv is the
pair term (same-class indicator, or the label distance for regression). An
undirected weight appears in the ratios of both endpoints, so its gradient
sums the two contributions and scales by 1 / |included|.
"""

import logging

import numpy as np

from models.errors import InputError
from models.labels import LabelKind
from models.results import EdgeError, GradientCheckReport, MetricGradient, MetricId
from utils.homophily import (
    continuous_homophily,
    continuous_regression_homophily,
    require_kind,
    resolve_nodes,
    weighted_terms,
)

logger = logging.getLogger(__name__)

WORST_EDGES = 5


def _pair_term(metric_id):
    if metric_id is MetricId.HCONT:
        return lambda own, other: (own == other).astype(np.float64)
    return lambda own, other: np.abs(own - other)


def _label_vector(labels, metric_id, num_nodes):
    if metric_id is MetricId.HCONT:
        require_kind(labels, LabelKind.CLASSIFICATION, num_nodes)
        return labels.class_ids
    require_kind(labels, LabelKind.REGRESSION, num_nodes)
    return labels.normalized_values


def metric_value(graph, labels, metric_id, restrict=None):
    """Mean of the continuous metric, the scalar the gradients differentiate"""
    metric_id = MetricId(metric_id)
    if metric_id is MetricId.HCONT:
        result = continuous_homophily(graph, labels, restrict=restrict)
    else:
        result = continuous_regression_homophily(graph, labels, restrict=restrict)
    return result.mean if result.mean is not None else 0.0


def _gradient(graph, labels, metric_id, restrict):
    y = _label_vector(labels, metric_id, graph.num_nodes)
    term = _pair_term(metric_id)
    everyone = np.arange(graph.num_nodes)
    totals, numerators = weighted_terms(graph, y, everyone, term)

    in_set = np.zeros(graph.num_nodes, dtype=bool)
    in_set[resolve_nodes(graph.num_nodes, restrict)] = True
    included = in_set & (totals > 0)
    ratios = np.divide(numerators, totals, out=np.zeros_like(totals), where=totals > 0)

    pairs, _ = graph.edge_pairs()
    if not included.any() or len(pairs) == 0:
        return MetricGradient(metric_id, pairs, np.zeros(len(pairs)))

    u, v = pairs[:, 0], pairs[:, 1]
    t = term(y[u], y[v])
    safe_totals = np.where(totals > 0, totals, 1.0)
    from_u = np.where(included[u], (t - ratios[u]) / safe_totals[u], 0.0)
    from_v = np.where(included[v], (t - ratios[v]) / safe_totals[v], 0.0)
    values = (from_u + from_v) / np.count_nonzero(included)
    if metric_id is MetricId.HREG_CONT:
        # metric is 1 - mean ratio
        values = -values
    return MetricGradient(metric_id, pairs, values)


def grad_continuous_homophily(graph, labels, restrict=None):
    """Gradient of the mean continuous homophily w.r.t. each undirected edge weight"""
    return _gradient(graph, labels, MetricId.HCONT, restrict)


def grad_continuous_regression_homophily(graph, labels, restrict=None):
    """Gradient of the mean continuous regression homophily w.r.t. each undirected edge weight"""
    return _gradient(graph, labels, MetricId.HREG_CONT, restrict)


def metric_gradient(graph, labels, metric_id, restrict=None):
    return _gradient(graph, labels, MetricId(metric_id), restrict)


def euler_residual(gradient, graph):
    """sum_e w_e * dM/dw_e; zero for metrics invariant to global weight scaling"""
    _, weights = graph.edge_pairs()
    return float(np.dot(weights, gradient.values))


def _relative_errors(analytic, numeric):
    """Per-edge |a - fd| / max(|a|, |fd|), and the same with the denominator
    floored at the largest |a|. Tolerances apply to the floored form.
    """
    difference = np.abs(analytic - numeric)
    own = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-12)
    scale = float(np.max(np.abs(analytic))) if analytic.size else 0.0
    return difference / own, difference / np.maximum(own, scale)


def finite_difference_check(graph, labels, metric_id, step=1e-6, gradient=None, restrict=None):
    """Compare the analytic gradient with per-edge central differences.

    The step of an edge whose weight is not larger than `step` shrinks to half
    that weight so every perturbed weight stays positive. `gradient` overrides
    the analytic gradient under test.
    """
    if not step > 0:
        raise InputError(f'finite-difference step must be positive, got {step}')
    metric_id = MetricId(metric_id)
    if gradient is None:
        gradient = _gradient(graph, labels, metric_id, restrict)
    pairs, weights = graph.edge_pairs()
    analytic = np.asarray(gradient.values, dtype=np.float64)
    if analytic.shape != weights.shape:
        raise InputError(f'gradient has {analytic.size} entries for {weights.size} edges')

    steps = np.where(weights > step, step, weights / 2.0)
    shrunk = int(np.count_nonzero(weights <= step))
    if shrunk:
        logger.info('shrank the finite-difference step on %d edges with weight <= %g', shrunk, step)

    numeric = np.zeros_like(weights)
    for e, h in enumerate(steps):
        plus, minus = weights.copy(), weights.copy()
        plus[e] += h
        minus[e] -= h
        upper = metric_value(graph.reweighted(plus), labels, metric_id, restrict)
        lower = metric_value(graph.reweighted(minus), labels, metric_id, restrict)
        numeric[e] = (upper - lower) / (2.0 * h)

    per_edge, errors = _relative_errors(analytic, numeric)
    worst = np.argsort(-errors, kind='stable')[:WORST_EDGES]
    report = GradientCheckReport(
        metric_id=metric_id,
        step=float(step),
        max_relative_error=float(errors.max()) if errors.size else 0.0,
        mean_relative_error=float(errors.mean()) if errors.size else 0.0,
        max_edge_relative_error=float(per_edge.max()) if per_edge.size else 0.0,
        num_edges=int(weights.size),
        num_shrunk_steps=shrunk,
        worst_edges=[
            EdgeError(int(pairs[e, 0]), int(pairs[e, 1]), float(analytic[e]), float(numeric[e]), float(errors[e]))
            for e in worst
        ],
    )
    logger.info('%s gradient check: max relative error %.3g over %d edges',
                metric_id.value, report.max_relative_error, report.num_edges)
    return report


def directional_derivative_check(graph, labels, metric_id, direction, eps=1e-6, restrict=None):
    """Return (<grad, d>, central difference of the metric along d)"""
    metric_id = MetricId(metric_id)
    _, weights = graph.edge_pairs()
    direction = np.asarray(direction, dtype=np.float64)
    if direction.shape != weights.shape:
        raise InputError(f'direction has {direction.size} entries for {weights.size} edges')
    gradient = _gradient(graph, labels, metric_id, restrict)
    upper = metric_value(graph.reweighted(weights + eps * direction), labels, metric_id, restrict)
    lower = metric_value(graph.reweighted(weights - eps * direction), labels, metric_id, restrict)
    return float(np.dot(gradient.values, direction)), (upper - lower) / (2.0 * eps)
