"""Command-line surface: train, eval, predict, bands, bench.

Exit codes: 0 success, 1 usage or configuration problem, 2 unusable input
data, 3 model-file parse or integrity failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
import time
from pathlib import Path

from .bands import DEFAULT_EPSILON, build_graph, render_band_report
from .bench import parse_manifest, render_bench_delimited, render_bench_table, run_bench
from .core import DEFAULT_MAX_ITERS, DEFAULT_TOL
from .dataset import IngestOptions, load_table, normalize_feature_rows, parse_delimited
from .errors import ConfigError, IngestError, IntegrityError, ModelFormatError
from .evaluation import render_report_kv, render_report_table
from .forest import BranchLimits
from .model import TrainSettings, train_model
from . import persist

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INGEST = 2
EXIT_INTEGRITY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestError as exc:
        print(f"ingest error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except (ModelFormatError, IntegrityError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY


def _build_parser() -> _Parser:
    parser = _Parser(prog="batchband", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_train = sub.add_parser("train", help="train a model from a delimited file")
    _ingest_args(p_train)
    _train_args(p_train)
    p_train.add_argument("--model", required=True, help="where to write the model file")
    p_train.add_argument("--format", choices=("table", "kv"), default="table")
    p_train.add_argument("--no-timing", action="store_true", help="suppress timing lines")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a model on a delimited file")
    p_eval.add_argument("model", help="model file")
    p_eval.add_argument("data", help="delimited data file")
    _ingest_args(p_eval, positional_data=True)
    p_eval.add_argument("--format", choices=("table", "kv"), default="table")
    p_eval.set_defaults(func=cmd_eval)

    p_pred = sub.add_parser("predict", help="classify rows with a trained model")
    p_pred.add_argument("model", help="model file")
    p_pred.add_argument("data", help="delimited file of feature rows")
    p_pred.add_argument("--delimiter", default=",")
    p_pred.add_argument("--header", action="store_true")
    p_pred.add_argument(
        "--label-column",
        default=None,
        help="drop this column before prediction (for files that still carry labels)",
    )
    p_pred.set_defaults(func=cmd_predict)

    p_bands = sub.add_parser("bands", help="build and inspect value bands")
    _ingest_args(p_bands)
    p_bands.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p_bands.add_argument("--out", help="also write the band table as delimited text")
    p_bands.add_argument("--plot", help="render the band layout to this image file")
    p_bands.set_defaults(func=cmd_bands)

    p_bench = sub.add_parser("bench", help="run the benchmark suite from a manifest")
    p_bench.add_argument("manifest", help="manifest file: name,train,label[,test] per line")
    p_bench.add_argument("--delimiter", default=",", help="delimiter of the data files")
    p_bench.add_argument("--header", action="store_true", help="data files carry a header row")
    _train_args(p_bench)
    p_bench.add_argument("--out-dir", help="write models, reports, results.tsv and figures here")
    p_bench.add_argument("--no-timing", action="store_true", help="suppress timing lines")
    p_bench.set_defaults(func=cmd_bench)
    return parser


def _ingest_args(p, positional_data: bool = False):
    if not positional_data:
        p.add_argument("data", help="delimited training file")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--header", action="store_true", help="first row is a header")
    p.add_argument("--label-column", default="-1", help="label column index or header name")
    p.add_argument(
        "--categories",
        default=None,
        help="comma-separated category order to pin label ids",
    )


def _train_args(p):
    p.add_argument("--scheme", choices=("spread", "centred"), default="centred")
    p.add_argument("--bands", action="store_true", help="build bands and classify through them first")
    p.add_argument(
        "--full-training",
        action="store_true",
        help="with --bands, keep band-decided rows in the classifier training set",
    )
    p.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    p.add_argument("--max-iters", type=int, default=DEFAULT_MAX_ITERS)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument(
        "--max-depth",
        default="50",
        help="branching depth limit, or 'none' for unbounded",
    )


def _ingest_options(args) -> IngestOptions:
    label: int | str = args.label_column
    try:
        label = int(args.label_column)
    except (ValueError, TypeError):
        pass
    categories = None
    if getattr(args, "categories", None):
        categories = tuple(c.strip() for c in args.categories.split(","))
    return IngestOptions(
        delimiter=args.delimiter,
        header=args.header,
        label_column=label,
        category_order=categories,
    )


def _train_settings(args) -> TrainSettings:
    if args.max_depth.lower() == "none":
        depth = None
    else:
        try:
            depth = int(args.max_depth)
        except ValueError:
            raise ConfigError(f"--max-depth must be an integer or 'none', got {args.max_depth!r}")
    return TrainSettings(
        scheme=args.scheme,
        bands_enabled=args.bands,
        residual_training=not args.full_training,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        tol=args.tol,
        limits=BranchLimits(max_depth=depth),
    )


def cmd_train(args) -> int:
    started = time.perf_counter()
    options = _ingest_options(args)
    settings = _train_settings(args)
    table = load_table(args.data, options)
    model, split = train_model(table, settings, source=Path(args.data).name)
    with open(args.model, "wb") as fh:
        persist.save(model, fh)

    print(f"trained on {table.n_rows} rows, {table.n_columns} columns, "
          f"{table.n_categories} categories")
    print(f"nodes {model.forest.node_count}, max depth {model.forest.max_depth}")
    if model.graph is not None:
        print(f"bands {model.graph.n_bands}, links {len(model.graph.links)}")
        if split is not None:
            print(f"band-decided rows {split.decided.size} "
                  f"({split.wrong} wrong), residual rows {split.residual.size}")
        print(render_band_report(model.graph, model.categories, model.stats))
    report = model.evaluate(table)
    print(_render(report, model.categories, args.format))
    print(f"model written to {args.model}")
    if not args.no_timing:
        print(f"[time] {time.perf_counter() - started:.2f}s")
    return EXIT_OK


def cmd_eval(args) -> int:
    model = _load_model(args.model)
    options = _ingest_options(args)
    table = model.load_test_table(args.data, options)
    report = model.evaluate(table)
    print(_render(report, model.categories, args.format))
    return EXIT_OK


def cmd_predict(args) -> int:
    model = _load_model(args.model)
    try:
        with open(args.data, newline="", encoding="utf-8") as fh:
            rows = [tuple(c.strip() for c in r) for r in csv.reader(fh, delimiter=args.delimiter) if r]
    except OSError as exc:
        raise IngestError(f"cannot read {args.data}: {exc}") from exc
    if args.header:
        rows = rows[1:]
    if args.label_column is not None:
        drop = int(args.label_column)
        rows = [tuple(c for j, c in enumerate(r) if j != drop % len(r)) for r in rows]
    features = normalize_feature_rows(rows, model.stats, model.encoders)
    for i in range(features.shape[0]):
        p = model.predict_row(features[i])
        name = model.categories[p.category]
        extra = ""
        if p.tied:
            ties = ",".join(model.categories[c] for c in sorted(p.tie_set))
            extra = f" tied[{ties}]"
        print(f"row {i} {name} error {p.error!r} source {p.source}{extra}")
    return EXIT_OK


def cmd_bands(args) -> int:
    options = _ingest_options(args)
    table = load_table(args.data, options)
    graph = build_graph(table, args.epsilon)
    print(render_band_report(graph, table.category_names, table.stats))
    if args.out:
        _write_band_delimited(graph, table.category_names, args.out)
        print(f"band table written to {args.out}")
    if args.plot:
        from .plots import save_band_figure

        save_band_figure(graph, args.plot, table.category_names)
        print(f"band figure written to {args.plot}")
    return EXIT_OK


def cmd_bench(args) -> int:
    started = time.perf_counter()
    entries = parse_manifest(args.manifest)
    settings = _train_settings(args)
    ingest = IngestOptions(delimiter=args.delimiter, header=args.header)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    rows = run_bench(
        entries,
        settings,
        ingest,
        out_dir,
        warn=lambda msg: print(f"warning: {msg}", file=sys.stderr),
    )
    print(render_bench_table(rows))
    if out_dir is not None:
        (out_dir / "results.tsv").write_text(render_bench_delimited(rows), encoding="utf-8")
        plotted = [r for r in rows if r.report is not None]
        if plotted:
            from .plots import save_bench_figure

            save_bench_figure(rows, out_dir / "accuracy.png")
        print(f"results written to {out_dir}")
    if not args.no_timing:
        print(f"[time] {time.perf_counter() - started:.2f}s")
    return EXIT_OK


def _load_model(path):
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise ConfigError(f"cannot read model file {path}: {exc}") from exc
    with fh:
        return persist.load(fh)


def _render(report, categories, fmt: str) -> str:
    if fmt == "kv":
        return render_report_kv(report, categories)
    return render_report_table(report, categories)


def _write_band_delimited(graph, categories, path):
    lines = ["column\tband\tlow\thigh\tcategories"]
    for j, bands in enumerate(graph.columns):
        for i, b in enumerate(bands):
            cats = ",".join(categories[c] for c in sorted(b.categories))
            lines.append(f"{j}\t{i}\t{b.low!r}\t{b.high!r}\t{cats}")
    for j, a, b in sorted(graph.links):
        lines.append(f"link\t{j}\t{a}\t{b}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


if __name__ == "__main__":
    sys.exit(main())
