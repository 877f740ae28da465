"""``treelike`` command line: analyze, synth, cluster, exact-delta, exact-ultra, compare, table."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import NoReturn, Sequence

from pydantic import ValidationError
from tabulate import tabulate

from treelike_geometry import __version__
from treelike_geometry.analysis import (
    analyze_distance_matrix,
    analyze_embeddings,
    cluster_embeddings,
    synthetic_table,
)
from treelike_geometry.callbacks import (
    AnalysisCallbackHandler,
    CapturingCallbackHandler,
    LoggingCallbackHandler,
)
from treelike_geometry.cli_io import (
    FILE_FORMATS,
    load_distance_matrix,
    load_embeddings,
    write_distance_matrix,
    write_embeddings,
)
from treelike_geometry.config import AnalysisSettings, ClusterSettings, SynthSettings
from treelike_geometry.core_types import DistanceMatrix
from treelike_geometry.distances import METRIC_KINDS
from treelike_geometry.errors import GeometryError, InputParseError
from treelike_geometry.report import (
    ComparisonReport,
    GeometryReport,
    InputDescriptor,
    SyntheticTable,
    write_report,
)
from treelike_geometry.synthetic import SyntheticSpec, generate

logger = logging.getLogger(__name__)

SYNTH_KINDS = {
    "sphere": "sphere",
    "graph": "dense_graph",
    "disk": "poincare_disk",
    "tree": "tree_metric",
    "ultra": "ultrametric",
}

_ANALYSIS_DEFAULTS = AnalysisSettings(workers=1)
_SYNTH_DEFAULTS = SynthSettings()
_CLUSTER_DEFAULTS = ClusterSettings()


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors surface as :class:`InputParseError` instead of a usage dump."""

    def error(self, message: str) -> NoReturn:
        raise InputParseError(f"{self.prog}: {message}")


def _csv_list(value: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in value.split(",") if part.strip())


def _add_input_args(parser: argparse.ArgumentParser, *, multiple: bool = False) -> None:
    if multiple:
        parser.add_argument("--input", type=Path, action="append", required=True, help="input file (repeatable)")
    else:
        parser.add_argument("--input", type=Path, required=True, help="input file")
    parser.add_argument("--format", choices=FILE_FORMATS, default="csv")
    parser.add_argument("--header", action="store_true", help="CSV input has a header row")
    parser.add_argument("--id-column", action="store_true", help="first CSV column holds ids")
    parser.add_argument("--label-column", action="store_true", help="next CSV column holds labels")
    parser.add_argument("--pad", action="store_true", help="zero-pad rows of unequal length")


def _add_preprocess_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pca", type=float, metavar="VAR", help="keep components explaining VAR of the variance")
    parser.add_argument("--ball-norm", type=float, default=_ANALYSIS_DEFAULTS.ball_norm)


def _add_run_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=_ANALYSIS_DEFAULTS.seed)
    parser.add_argument("--workers", type=int, default=None, help="threads (default: all CPUs)")
    parser.add_argument("--timings", action="store_true", help="record wall-clock seconds per analysis")
    parser.add_argument("--events-out", type=Path, help="write the analysis event log as JSON")


def _add_analysis_args(parser: argparse.ArgumentParser, *, fixed: str | None = None) -> None:
    parser.add_argument("--distance-matrix", action="store_true", help="input is a distance matrix")
    parser.add_argument("--force", action="store_true", help="symmetrize an asymmetric matrix")
    _add_preprocess_args(parser)
    parser.add_argument("--formula", choices=("four_point", "paper_slack"), default="four_point")
    parser.add_argument("--epsilon", type=float, default=_ANALYSIS_DEFAULTS.epsilon)
    if fixed is None:
        parser.add_argument("--analyses", type=_csv_list, default=_ANALYSIS_DEFAULTS.analyses)
        parser.add_argument("--samples", type=int, default=_ANALYSIS_DEFAULTS.samples)
        parser.add_argument("--exact", action="store_true", help="enumerate every quadruple/triple")
    else:
        parser.set_defaults(analyses=(fixed,), samples=_ANALYSIS_DEFAULTS.samples, exact=True)
    _add_run_args(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = ArgumentParser(prog="treelike", description="Tree-likeness of metric spaces")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="δ-hyperbolicity, ultrametricity and NJ scores")
    _add_input_args(analyze)
    analyze.add_argument("--metric", choices=METRIC_KINDS, default=_ANALYSIS_DEFAULTS.metric)
    _add_analysis_args(analyze)
    analyze.add_argument("--out", type=Path, required=True)

    for name, analysis in (("exact-delta", "delta"), ("exact-ultra", "ultra")):
        alias = commands.add_parser(name, help=f"exhaustive {analysis} statistics for small inputs")
        _add_input_args(alias)
        alias.add_argument("--metric", choices=METRIC_KINDS, default=_ANALYSIS_DEFAULTS.metric)
        _add_analysis_args(alias, fixed=analysis)
        alias.add_argument("--out", type=Path, required=True)

    compare = commands.add_parser("compare", help="analyze several inputs under several metrics")
    _add_input_args(compare, multiple=True)
    compare.add_argument("--metric", type=_csv_list, default=(_ANALYSIS_DEFAULTS.metric,))
    _add_analysis_args(compare)
    compare.add_argument("--out", type=Path, required=True)

    synth = commands.add_parser("synth", help="write a synthetic metric space")
    synth.add_argument("kind", choices=tuple(SYNTH_KINDS))
    synth.add_argument("--n", type=int, default=_SYNTH_DEFAULTS.n)
    synth.add_argument("--dim", type=int, default=_SYNTH_DEFAULTS.dim)
    synth.add_argument("--p", type=float, default=_SYNTH_DEFAULTS.p)
    synth.add_argument("--seed", type=int, default=_SYNTH_DEFAULTS.seed)
    synth.add_argument("--format", choices=FILE_FORMATS, default="csv")
    synth.add_argument("--out", type=Path, required=True)

    cluster = commands.add_parser("cluster", help="k-means with validity indices")
    _add_input_args(cluster)
    cluster.add_argument("--k", type=int, default=_CLUSTER_DEFAULTS.k)
    cluster.add_argument("--metric", choices=METRIC_KINDS, default=_ANALYSIS_DEFAULTS.metric)
    cluster.add_argument("--max-iter", type=int, default=_CLUSTER_DEFAULTS.max_iter)
    cluster.add_argument("--tol", type=float, default=_CLUSTER_DEFAULTS.tol)
    _add_preprocess_args(cluster)
    _add_run_args(cluster)
    cluster.add_argument("--out", type=Path, required=True)

    table = commands.add_parser("table", help="δ of sphere, dense-graph and Poincaré-disk spaces")
    table.add_argument("--n", type=int, default=_SYNTH_DEFAULTS.n)
    table.add_argument("--dim", type=int, default=_SYNTH_DEFAULTS.dim)
    table.add_argument("--p", type=float, default=_SYNTH_DEFAULTS.p)
    table.add_argument("--seeds", type=int, default=_SYNTH_DEFAULTS.seeds)
    table.add_argument("--seed", type=int, default=_SYNTH_DEFAULTS.seed)
    table.add_argument("--workers", type=int, default=None)
    table.add_argument("--out", type=Path, required=True)
    return parser


def _analysis_settings(args: argparse.Namespace, metric: str) -> AnalysisSettings:
    values = dict(
        samples=args.samples,
        epsilon=args.epsilon,
        seed=args.seed,
        metric=metric,
        analyses=args.analyses,
        formula=args.formula,
        exact=args.exact,
        ball_norm=args.ball_norm,
        pca_variance=args.pca,
    )
    if args.workers is not None:
        values["workers"] = args.workers
    return AnalysisSettings(**values)


def _handlers(args: argparse.Namespace) -> tuple[list[AnalysisCallbackHandler], CapturingCallbackHandler]:
    capture = CapturingCallbackHandler()
    handlers: list[AnalysisCallbackHandler] = [capture]
    if args.verbose:
        handlers.append(LoggingCallbackHandler())
    return handlers, capture


def _analyze_input(
    path: Path,
    args: argparse.Namespace,
    settings: AnalysisSettings,
    handlers: list[AnalysisCallbackHandler],
) -> GeometryReport:
    if args.distance_matrix:
        matrix, symmetrized = load_distance_matrix(
            path, args.format, force=args.force, tol=settings.validation_tol
        )
        descriptor = InputDescriptor(
            path=str(path), format=args.format, kind="distance_matrix", n=matrix.n, symmetrized=symmetrized
        )
        return analyze_distance_matrix(matrix, descriptor, settings, handlers)

    embeddings = load_embeddings(
        path,
        args.format,
        header=args.header,
        id_column=args.id_column,
        label_column=args.label_column,
        pad=args.pad,
    )
    descriptor = InputDescriptor(path=str(path), format=args.format, n=embeddings.n, dim=embeddings.dim)
    return analyze_embeddings(embeddings, descriptor, settings, pad=args.pad, callbacks=handlers)


def _finish(
    report: GeometryReport, args: argparse.Namespace, capture: CapturingCallbackHandler
) -> GeometryReport:
    if args.timings:
        report = report.model_copy(update={"timings": capture.timings()})
    if args.events_out:
        capture.dump_records_to_file(str(args.events_out))
    return report


def _summary_row(report: GeometryReport) -> list[object]:
    row: list[object] = [Path(report.input.path).name, report.metric]
    for stats, fields in (
        (report.delta, ("delta_max", "delta_avg", "delta_std")),
        (report.ultra, ("max_violation", "avg_violation", "std_violation")),
        (report.nj, ("nj_max", "nj_avg", "nj_std")),
    ):
        row.extend(getattr(stats, field) if stats is not None else "" for field in fields)
    return row


_SUMMARY_HEADERS = [
    "input", "metric", "δ max", "δ avg", "δ std",
    "ν max", "ν avg", "ν std", "|Q| max", "|Q| avg", "|Q| std",
]


def _print_summary(reports: Sequence[GeometryReport]) -> None:
    print(tabulate([_summary_row(report) for report in reports], headers=_SUMMARY_HEADERS, floatfmt=".6g"))


def cmd_analyze(args: argparse.Namespace) -> None:
    handlers, capture = _handlers(args)
    report = _analyze_input(args.input, args, _analysis_settings(args, args.metric), handlers)
    report = _finish(report, args, capture)
    write_report(report, args.out)
    _print_summary([report])


def cmd_compare(args: argparse.Namespace) -> None:
    # Matrices carry their own metric, so each is analyzed once.
    metrics = ("euclidean",) if args.distance_matrix else args.metric
    rows = []
    records = []
    for path in args.input:
        for metric in metrics:
            handlers, capture = _handlers(args)
            report = _analyze_input(path, args, _analysis_settings(args, metric), handlers)
            if args.timings:
                report = report.model_copy(update={"timings": capture.timings()})
            rows.append(report)
            records.extend(capture.records)
    if args.events_out:
        args.events_out.write_text(json.dumps(records, indent=1), encoding="utf-8")
    write_report(ComparisonReport(rows=rows), args.out)
    _print_summary(rows)


def cmd_synth(args: argparse.Namespace) -> None:
    spec = SyntheticSpec(kind=SYNTH_KINDS[args.kind], n=args.n, dim=args.dim, p=args.p, seed=args.seed)
    space = generate(spec)
    if isinstance(space, DistanceMatrix):
        write_distance_matrix(space, args.out, args.format)
        print(f"wrote {space.n}x{space.n} {spec.kind} distance matrix to {args.out}")
    else:
        write_embeddings(space, args.out, args.format)
        print(f"wrote {space.n} {spec.kind} embeddings of dim {space.dim} to {args.out}")


def cmd_cluster(args: argparse.Namespace) -> None:
    handlers, capture = _handlers(args)
    values = dict(seed=args.seed, metric=args.metric, ball_norm=args.ball_norm, pca_variance=args.pca)
    if args.workers is not None:
        values["workers"] = args.workers
    settings = AnalysisSettings(**values)
    cluster_settings = ClusterSettings(k=args.k, max_iter=args.max_iter, tol=args.tol, seed=args.seed)
    embeddings = load_embeddings(
        args.input,
        args.format,
        header=args.header,
        id_column=args.id_column,
        label_column=args.label_column,
        pad=args.pad,
    )
    descriptor = InputDescriptor(path=str(args.input), format=args.format, n=embeddings.n, dim=embeddings.dim)
    report = cluster_embeddings(
        embeddings, descriptor, settings, cluster_settings, pad=args.pad, callbacks=handlers
    )
    report = _finish(report, args, capture)
    write_report(report, args.out)
    result = report.cluster
    print(
        tabulate(
            [[result.k, result.iterations, result.inertia, result.silhouette, result.calinski_harabasz, result.davies_bouldin]],
            headers=["k", "iterations", "inertia", "silhouette", "Calinski-Harabasz", "Davies-Bouldin"],
            floatfmt=".6g",
            missingval="undefined",
        )
    )


def cmd_table(args: argparse.Namespace) -> None:
    settings = SynthSettings(n=args.n, dim=args.dim, p=args.p, seeds=args.seeds, seed=args.seed)
    workers = args.workers if args.workers is not None else AnalysisSettings().workers
    handlers: list[AnalysisCallbackHandler] = [LoggingCallbackHandler()] if args.verbose else []
    table: SyntheticTable = synthetic_table(settings, workers=workers, callbacks=handlers)
    write_report(table, args.out)
    print(
        tabulate(
            [[s.space, f"{s.delta_avg_mean:.4f} ± {s.delta_avg_std:.4f}"] for s in table.spaces],
            headers=["space", "δ avg"],
        )
    )
    print(f"poincare_smallest: {table.poincare_smallest}")


COMMANDS = {
    "analyze": cmd_analyze,
    "exact-delta": cmd_analyze,
    "exact-ultra": cmd_analyze,
    "compare": cmd_compare,
    "synth": cmd_synth,
    "cluster": cmd_cluster,
    "table": cmd_table,
}


def _fail(error: GeometryError) -> int:
    print(f"error: {error.category}: {error}", file=sys.stderr)
    return error.exit_code


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except InputParseError as error:
        return _fail(error)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        COMMANDS[args.command](args)
    except GeometryError as error:
        return _fail(error)
    except ValidationError as error:
        first = error.errors()[0]
        location = ".".join(str(part) for part in first["loc"])
        print(f"error: validation_error: {location}: {first['msg']}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
