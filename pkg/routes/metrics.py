from dataclasses import asdict
from functools import wraps

from flask import Blueprint, current_app, jsonify, request
from marshmallow import Schema, ValidationError, fields, validate, validates_schema
import numpy as np

from models.errors import InputError, InvariantViolation, LabelTypeError
from models.graph import build_discrete_graph, build_weighted_graph
from models.labels import LabelKind, NodeLabels, SplitMask, normalize_regression_labels
from models.results import MetricId
from utils.dataset_io import record_schema
from utils.evaluation import MetricEvaluator
from utils.gradients import finite_difference_check, metric_gradient
from utils.synthetic import SyntheticSpec, generate_synthetic

metrics_bp = Blueprint('metrics', __name__, url_prefix='/api/metrics')

TASKS = [kind.value for kind in LabelKind]


class GraphRequestSchema(Schema):
    num_nodes = fields.Int(required=True, validate=validate.Range(min=1))
    edges = fields.List(fields.List(fields.Int(), validate=validate.Length(equal=2)))
    weighted_edges = fields.List(fields.List(fields.Float(allow_nan=False), validate=validate.Length(equal=3)))
    labels = fields.List(fields.Float(allow_nan=False), required=True)
    task = fields.Str(required=True, validate=validate.OneOf(TASKS))

    @validates_schema
    def validate_graph(self, data, **kwargs):
        if ('edges' in data) == ('weighted_edges' in data):
            raise ValidationError('give exactly one of edges or weighted_edges', 'edges')
        if len(data['labels']) != data['num_nodes']:
            raise ValidationError(f"{len(data['labels'])} labels for {data['num_nodes']} nodes", 'labels')


class EvaluateRequestSchema(GraphRequestSchema):
    splits = fields.List(fields.Str(validate=validate.OneOf(['train', 'val', 'test', 'none'])))
    k_max = fields.Int(load_default=1, validate=validate.Range(min=1))
    exclude_self_pairs = fields.Bool(load_default=False)


class GradcheckRequestSchema(GraphRequestSchema):
    step = fields.Float(load_default=1e-6, validate=validate.Range(min=0, min_inclusive=False))

    @validates_schema
    def validate_weighted(self, data, **kwargs):
        if 'weighted_edges' not in data:
            raise ValidationError('gradient checks need weighted_edges', 'weighted_edges')


evaluate_schema = EvaluateRequestSchema()
gradcheck_schema = GradcheckRequestSchema()


def labels_from_request(values, task):
    if LabelKind(task) is LabelKind.REGRESSION:
        return normalize_regression_labels(values)
    values = np.asarray(values, dtype=np.float64)
    if np.any(values != np.round(values)):
        raise LabelTypeError('real-valued labels sent with task=classification (regression labels?)')
    return NodeLabels.classification(values.astype(np.int64))


def graph_from_request(data):
    if 'weighted_edges' in data:
        return build_weighted_graph(data['num_nodes'], [tuple(edge) for edge in data['weighted_edges']])
    return build_discrete_graph(data['num_nodes'], data['edges'])


def check_size(num_nodes):
    limit = current_app.config.get('GAM_MAX_NODES', 50000)
    if num_nodes > limit:
        raise InputError(f'num_nodes={num_nodes} exceeds the service limit of {limit}')


def metric_endpoint(f):
    """Turn validation and engine errors into JSON error responses"""
    @wraps(f)
    def decorated(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except ValidationError as err:
            return jsonify({
                'success': False,
                'message': 'Validation error',
                'errors': err.messages
            }), 400
        except InputError as err:
            return jsonify({
                'success': False,
                'message': str(err),
                'errors': {'type': type(err).__name__}
            }), 400
        except InvariantViolation as err:
            current_app.logger.error('invariant violation: %s', err)
            return jsonify({
                'success': False,
                'message': 'Internal invariant violated',
                'errors': {'type': type(err).__name__, 'detail': str(err)}
            }), 500
    return decorated


@metrics_bp.route('/evaluate', methods=['POST'])
@metric_endpoint
def evaluate():
    """Homophily and CCNS records for every split and hop"""
    data = evaluate_schema.load(request.get_json(silent=True) or {})
    check_size(data['num_nodes'])
    graph = graph_from_request(data)
    labels = labels_from_request(data['labels'], data['task'])
    splits = SplitMask.from_tags(data['splits']) if data.get('splits') else None

    evaluator = MetricEvaluator.from_config(current_app.config, exclude_self_pairs=data['exclude_self_pairs'])
    records = evaluator.evaluate(graph, labels, splits=splits, k_max=data['k_max'], task=data['task'])
    current_app.logger.info('evaluated %r: %d records', graph, len(records))
    return jsonify({
        'success': True,
        'message': f'{len(records)} metric records computed',
        'data': {'records': record_schema.dump(records, many=True)}
    }), 200


@metrics_bp.route('/gradcheck', methods=['POST'])
@metric_endpoint
def gradcheck():
    """Analytic edge gradient of the continuous metric checked by central differences"""
    data = gradcheck_schema.load(request.get_json(silent=True) or {})
    check_size(data['num_nodes'])
    graph = graph_from_request(data)
    labels = labels_from_request(data['labels'], data['task'])
    metric_id = MetricId.HCONT if labels.is_classification else MetricId.HREG_CONT

    gradient = metric_gradient(graph, labels, metric_id)
    report = finite_difference_check(graph, labels, metric_id, step=data['step'], gradient=gradient)
    return jsonify({
        'success': True,
        'message': f'max relative error {report.max_relative_error:.3g}',
        'data': {'report': report.to_dict(), 'gradient': gradient.to_dict()['gradient']}
    }), 200


@metrics_bp.route('/synthetic', methods=['POST'])
@metric_endpoint
def synthetic():
    """Generate a synthetic population graph"""
    payload = dict(request.get_json(silent=True) or {})
    include_features = bool(payload.pop('include_features', False))
    spec = SyntheticSpec.load(payload)
    check_size(spec.num_nodes)
    dataset = generate_synthetic(spec)

    result = {
        'spec': {**asdict(spec), 'task': spec.task.value},
        'labels': dataset.labels.to_dict(),
        'num_nodes': dataset.graph.num_nodes,
        'edges': dataset.graph.edge_pairs().tolist(),
        'feature_shape': list(dataset.features.shape),
    }
    if include_features:
        result['features'] = dataset.features.tolist()
    return jsonify({
        'success': True,
        'message': 'Synthetic dataset generated',
        'data': result
    }), 200
