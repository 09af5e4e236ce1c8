"""
Command-line entry point: split-wise evaluation, snapshot trajectories,
synthetic population graphs, kNN construction and gradient checks.

Exit codes: 0 success, 1 input error, 2 internal invariant violation or any
other unexpected failure.
"""

from functools import wraps
import json
import logging
import os

import click

from config import Config
from models.errors import InputError, InvariantViolation
from models.labels import LabelKind
from models.results import MetricId
from utils.dataset_io import (
    load_graph,
    parse_features,
    parse_labels,
    parse_snapshot_sequence,
    parse_splits,
    write_edge_list,
    write_features,
    write_report,
    write_values,
)
from utils.evaluation import MetricEvaluator
from utils.gradients import euler_residual, finite_difference_check, metric_gradient
from utils.pdf_generator import pdf_generator
from utils.synthetic import SyntheticSpec, generate_synthetic, knn_graph
from utils.trajectory import analyze_trajectory

logger = logging.getLogger(__name__)

TASKS = click.Choice([kind.value for kind in LabelKind])
FORMATS = click.Choice(['jsonl', 'csv'])
LAYOUTS = click.Choice(['triplets', 'dense'])
SPLITS = click.Choice(['all', 'train', 'val', 'test'])


class ClickEchoHandler(logging.Handler):
    """Log records to whatever stderr click currently writes to"""

    def emit(self, record):
        try:
            click.echo(self.format(record), err=True)
        except Exception:
            self.handleError(record)


def setup_logging(level):
    root = logging.getLogger()
    for handler in [h for h in root.handlers if isinstance(h, ClickEchoHandler)]:
        root.removeHandler(handler)
    handler = ClickEchoHandler()
    handler.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    root.addHandler(handler)
    root.setLevel(level)


def handle_errors(f):
    """Map engine errors to exit codes with an `error: ...` line on stderr"""
    @wraps(f)
    def decorated(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return f(*args, **kwargs)
        except (click.ClickException, click.exceptions.Exit, click.Abort):
            raise
        except InputError as err:
            click.echo(f'error: {err}', err=True)
            ctx.exit(1)
        except OSError as err:
            click.echo(f'error: {err}', err=True)
            ctx.exit(1)
        except InvariantViolation as err:
            click.echo(f'error: internal invariant violated: {err}', err=True)
            ctx.exit(2)
        except Exception as err:
            logger.debug('unexpected failure in %s', ctx.info_name, exc_info=True)
            click.echo(f'error: internal failure: {type(err).__name__}: {err}', err=True)
            ctx.exit(2)
    return decorated


def read_input(path, parser, **kwargs):
    if not os.path.exists(path):
        raise InputError(f'file not found: {path}')
    with open(path, 'r', encoding='utf-8') as handle:
        return parser(handle, path=path, **kwargs)


def read_labels_and_splits(labels_path, task, splits_path, num_nodes):
    labels = read_input(labels_path, parse_labels, kind=task, num_nodes=num_nodes)
    splits = read_input(splits_path, parse_splits, num_nodes=num_nodes) if splits_path else None
    return labels, splits


@click.group()
@click.option('-v', '--verbose', is_flag=True, help='Log at DEBUG level.')
@click.pass_context
def cli(ctx, verbose):
    """Graph assessment metrics: homophily, CCNS and their gradients"""
    ctx.obj = Config
    setup_logging(logging.DEBUG if verbose else Config.GAM_LOG_LEVEL)


@cli.command()
@click.option('--graph', 'graph_path', required=True, help='Edge list, or weighted graph with --weighted.')
@click.option('--weighted', is_flag=True, help='Read a weighted graph.')
@click.option('--layout', type=LAYOUTS, default='triplets', show_default=True)
@click.option('--labels', 'labels_path', required=True)
@click.option('--task', type=TASKS, default='classification', show_default=True)
@click.option('--splits', 'splits_path', default=None)
@click.option('--k-max', type=int, default=1, show_default=True)
@click.option('--format', 'fmt', type=FORMATS, default='jsonl', show_default=True)
@click.option('--out', default='-', help='Report path, stdout by default.')
@click.option('--pdf', 'pdf_path', default=None, help='Also render the report as PDF.')
@click.option('--exclude-self-pairs', is_flag=True, help='Leave u = v out of CCNS diagonal averages.')
@click.option('--workers', type=int, default=None, help='Threads for k-hop expansion.')
@click.pass_obj
@handle_errors
def evaluate(config, graph_path, weighted, layout, labels_path, task, splits_path, k_max, fmt, out,
             pdf_path, exclude_self_pairs, workers):
    """Homophily and D_CCNS for k = 1..k_max, overall and per split"""
    graph = load_graph(graph_path, weighted=weighted, layout=layout)
    labels, splits = read_labels_and_splits(labels_path, task, splits_path, graph.num_nodes)
    evaluator = MetricEvaluator.from_config(config, n_jobs=workers, exclude_self_pairs=exclude_self_pairs)
    records = evaluator.evaluate(graph, labels, splits=splits, k_max=k_max, task=task)
    with click.open_file(out, 'w') as stream:
        write_report(records, stream, fmt=fmt)
    if pdf_path:
        pdf_generator.write_report_pdf(records, pdf_path, source=graph_path)


@cli.command()
@click.option('--manifest', 'manifest_path', required=True, help='Lines "step <idx> graph <path> [perf <real>]".')
@click.option('--weighted', is_flag=True)
@click.option('--layout', type=LAYOUTS, default='triplets', show_default=True)
@click.option('--labels', 'labels_path', required=True)
@click.option('--task', type=TASKS, default='classification', show_default=True)
@click.option('--splits', 'splits_path', default=None)
@click.option('--split', type=SPLITS, default='all', show_default=True, help='Average over this split only.')
@click.option('--metric', 'metrics', multiple=True, help='Metric to track; repeatable.')
@click.option('--k', type=int, default=1, show_default=True)
@click.option('--lower-is-better', is_flag=True, help='Performance is an error measure such as MAE.')
@click.option('--format', 'fmt', type=FORMATS, default='jsonl', show_default=True)
@click.option('--out', default='-')
@click.option('--exclude-self-pairs', is_flag=True)
@click.option('--workers', type=int, default=None)
@click.pass_obj
@handle_errors
def trajectory(config, manifest_path, weighted, layout, labels_path, task, splits_path, split, metrics, k,
               lower_is_better, fmt, out, exclude_self_pairs, workers):
    """Per-snapshot metrics and their correlation with performance"""
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    sequence = read_input(manifest_path, parse_snapshot_sequence, base_dir=base_dir, weighted=weighted, layout=layout)
    labels, splits = read_labels_and_splits(labels_path, task, splits_path, sequence.num_nodes)

    restrict = None
    if split != 'all':
        if splits is None:
            raise InputError(f'--split {split} needs --splits')
        restrict = splits.nodes(split)
        if restrict.size == 0:
            raise InputError(f'split {split} has no nodes')

    _, records = analyze_trajectory(
        sequence,
        labels,
        metrics=metrics or None,
        k=k,
        restrict=restrict,
        split=split,
        lower_is_better=lower_is_better,
        n_jobs=workers if workers is not None else config.GAM_WORKERS,
        exclude_self_pairs=exclude_self_pairs,
    )
    with click.open_file(out, 'w') as stream:
        write_report(records, stream, fmt=fmt)


@cli.command()
@click.option('--nodes', type=int, required=True)
@click.option('--features', type=int, default=50, show_default=True)
@click.option('--informative', type=int, default=5, show_default=True)
@click.option('--task', type=TASKS, default='classification', show_default=True)
@click.option('--classes', type=int, default=2, show_default=True)
@click.option('--knn-k', type=int, default=5, show_default=True)
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out-dir', required=True, type=click.Path(file_okay=False))
@handle_errors
def synth(nodes, features, informative, task, classes, knn_k, seed, out_dir):
    """Write features.txt, labels.txt and graph.txt for a synthetic population"""
    spec = SyntheticSpec.load({
        'num_nodes': nodes,
        'num_features': features,
        'num_informative': informative,
        'task': task,
        'num_classes': classes,
        'knn_k': knn_k,
        'seed': seed,
    })
    dataset = generate_synthetic(spec)
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, 'features.txt'), 'w', encoding='utf-8') as stream:
        write_features(dataset.features, stream)
    with open(os.path.join(out_dir, 'labels.txt'), 'w', encoding='utf-8') as stream:
        if dataset.labels.is_classification:
            write_values(dataset.labels.class_ids.tolist(), stream)
        else:
            write_values(dataset.labels.raw_values.tolist(), stream)
    with open(os.path.join(out_dir, 'graph.txt'), 'w', encoding='utf-8') as stream:
        write_edge_list(dataset.graph, stream)
    click.echo(f'{dataset.graph.num_nodes} nodes, {dataset.graph.num_edges} edges written to {out_dir}')


@cli.command()
@click.option('--features', 'features_path', required=True, help='Whitespace feature table, one node per line.')
@click.option('--k', type=int, default=5, show_default=True)
@click.option('--out', default='-')
@handle_errors
def knn(features_path, k, out):
    """Union-symmetrized Euclidean kNN edge list"""
    graph = knn_graph(read_input(features_path, parse_features), k)
    with click.open_file(out, 'w') as stream:
        write_edge_list(graph, stream)


@cli.command()
@click.option('--graph', 'graph_path', required=True, help='Weighted graph.')
@click.option('--layout', type=LAYOUTS, default='triplets', show_default=True)
@click.option('--labels', 'labels_path', required=True)
@click.option('--task', type=TASKS, default='classification', show_default=True)
@click.option('--splits', 'splits_path', default=None)
@click.option('--split', type=SPLITS, default='all', show_default=True)
@click.option('--step', type=float, default=1e-6, show_default=True)
@click.option('--tolerance', type=float, default=None, help='Fail with exit code 2 above this relative error.')
@click.option('--out', default='-')
@handle_errors
def gradcheck(graph_path, layout, labels_path, task, splits_path, split, step, tolerance, out):
    """Check analytic edge gradients of the continuous metric by central differences"""
    graph = load_graph(graph_path, weighted=True, layout=layout)
    labels, splits = read_labels_and_splits(labels_path, task, splits_path, graph.num_nodes)
    restrict = None
    if split != 'all':
        if splits is None:
            raise InputError(f'--split {split} needs --splits')
        restrict = splits.nodes(split)

    metric_id = MetricId.HCONT if labels.is_classification else MetricId.HREG_CONT
    gradient = metric_gradient(graph, labels, metric_id, restrict=restrict)
    report = finite_difference_check(graph, labels, metric_id, step=step, gradient=gradient, restrict=restrict)
    result = report.to_dict()
    result['split'] = split
    result['euler_residual'] = euler_residual(gradient, graph)
    with click.open_file(out, 'w') as stream:
        stream.write(json.dumps(result) + '\n')
    if tolerance is not None and report.max_relative_error > tolerance:
        raise InvariantViolation(
            f'max relative gradient error {report.max_relative_error:.3g} exceeds {tolerance:.3g}'
        )


if __name__ == '__main__':
    cli()
