"""Benchmark harness: train and evaluate every manifest dataset in both
modes (branch-only and bands+branch) and lay the measured numbers next to
the recorded reference results for the same benchmarks.

The manifest is a delimited text file, one dataset per line:

    name, train path, label column[, test path]

Paths are resolved relative to the manifest's directory.  Missing files
skip the dataset with a warning; the suite continues.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .dataset import IngestOptions, load_table
from .errors import BatchBandError, ConfigError
from .evaluation import EvalReport
from .model import Model, TrainSettings, train_model
from . import persist

MODES = ("branch", "bands")


@dataclass(frozen=True)
class Reference:
    """Recorded reference result for one dataset/mode pair."""

    avg_error: float
    correct: int
    total: int
    percent: float


# Recorded reference results for these benchmarks (train-only sets first,
# then train/test sets), per mode.
REFERENCE_RESULTS: dict[tuple[str, str], Reference] = {
    ("wine", "branch"): Reference(0.03, 178, 178, 100.0),
    ("iris", "branch"): Reference(0.05, 150, 150, 100.0),
    ("zoo", "branch"): Reference(0.02, 85, 101, 84.0),
    ("abalone", "branch"): Reference(0.002, 4093, 4177, 98.0),
    ("hayes_roth", "branch"): Reference(0.09, 130, 132, 99.0),
    ("liver", "branch"): Reference(0.04, 345, 345, 100.0),
    ("wine", "bands"): Reference(0.003, 178, 178, 100.0),
    ("iris", "bands"): Reference(0.03, 150, 150, 100.0),
    ("zoo", "bands"): Reference(0.005, 96, 101, 96.0),
    ("abalone", "bands"): Reference(0.001, 4165, 4177, 99.0),
    ("hayes_roth", "bands"): Reference(0.0, 132, 132, 100.0),
    ("liver", "bands"): Reference(0.03, 345, 345, 100.0),
    ("um", "branch"): Reference(0.05, 138, 145, 95.0),
    ("banknotes", "branch"): Reference(0.05, 100, 100, 100.0),
    ("heart", "branch"): Reference(0.08, 187, 187, 100.0),
    ("letters", "branch"): Reference(0.009, 1207, 4000, 30.0),
    ("monks1", "branch"): Reference(0.11, 432, 432, 100.0),
    ("solar", "branch"): Reference(0.01, 908, 1066, 85.0),
    ("um", "bands"): Reference(0.05, 126, 145, 87.0),
    ("banknotes", "bands"): Reference(0.004, 85, 100, 85.0),
    ("heart", "bands"): Reference(0.1, 187, 187, 100.0),
    ("letters", "bands"): Reference(0.007, 1238, 4000, 31.0),
    ("monks1", "bands"): Reference(0.11, 432, 432, 100.0),
    ("solar", "bands"): Reference(0.01, 984, 1066, 92.5),
}


@dataclass(frozen=True)
class ManifestEntry:
    name: str
    train_path: Path
    label_column: int | str
    test_path: Path | None = None


@dataclass
class BenchRow:
    dataset: str
    mode: str
    report: EvalReport | None
    reference: Reference | None
    note: str = ""


def parse_manifest(path, delimiter: str = ",") -> list[ManifestEntry]:
    """Read the dataset manifest; blank lines and #-comments are skipped."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    return manifest_from_text(text, path.parent, delimiter)


def run_bench(
    entries: list[ManifestEntry],
    settings: TrainSettings = TrainSettings(),
    ingest: IngestOptions = IngestOptions(),
    out_dir: Path | None = None,
    warn=lambda msg: None,
) -> list[BenchRow]:
    """Train and evaluate every dataset in both modes, in manifest order."""
    rows: list[BenchRow] = []
    if out_dir is not None:
        (out_dir / "models").mkdir(parents=True, exist_ok=True)
        (out_dir / "reports").mkdir(parents=True, exist_ok=True)
    for entry in entries:
        for mode in MODES:
            ref = REFERENCE_RESULTS.get((entry.name, mode))
            try:
                report, model = _run_one(entry, mode, settings, ingest)
            except BatchBandError as exc:
                warn(f"skipping {entry.name} ({mode}): {exc}")
                rows.append(BenchRow(entry.name, mode, None, ref, note=str(exc)))
                continue
            rows.append(BenchRow(entry.name, mode, report, ref))
            if out_dir is not None:
                _write_outputs(out_dir, entry.name, mode, model, report)
    return rows


def render_bench_table(rows: list[BenchRow]) -> str:
    header = (
        f"{'dataset':<12}{'mode':<8}{'avg error':>10}{'correct':>14}"
        f"{'% correct':>10}  {'ref err':>8}{'ref correct':>13}{'ref %':>7}"
    )
    lines = [header, "-" * len(header)]
    for r in rows:
        if r.report is None:
            lines.append(f"{r.dataset:<12}{r.mode:<8}{'skipped: ' + r.note}")
            continue
        ref = ("", "", "")
        if r.reference is not None:
            ref = (
                f"{r.reference.avg_error:g}",
                f"{r.reference.correct} from {r.reference.total}",
                f"{r.reference.percent:g}",
            )
        lines.append(
            f"{r.dataset:<12}{r.mode:<8}{r.report.avg_error:>10.4f}"
            f"{f'{r.report.correct} from {r.report.total}':>14}"
            f"{r.report.percent_correct:>10.2f}  {ref[0]:>8}{ref[1]:>13}{ref[2]:>7}"
        )
    return "\n".join(lines)


def render_bench_delimited(rows: list[BenchRow], delimiter: str = "\t") -> str:
    cols = [
        "dataset", "mode", "avg_error", "correct", "total", "percent_correct",
        "ref_avg_error", "ref_correct", "ref_total", "ref_percent", "note",
    ]
    out = [delimiter.join(cols)]
    for r in rows:
        rep = r.report
        ref = r.reference
        out.append(delimiter.join([
            r.dataset,
            r.mode,
            repr(rep.avg_error) if rep else "",
            str(rep.correct) if rep else "",
            str(rep.total) if rep else "",
            repr(rep.percent_correct) if rep else "",
            repr(ref.avg_error) if ref else "",
            str(ref.correct) if ref else "",
            str(ref.total) if ref else "",
            repr(ref.percent) if ref else "",
            r.note,
        ]))
    return "\n".join(out) + "\n"


def _run_one(
    entry: ManifestEntry,
    mode: str,
    settings: TrainSettings,
    ingest: IngestOptions,
) -> tuple[EvalReport, Model]:
    options = IngestOptions(
        delimiter=ingest.delimiter,
        header=ingest.header,
        label_column=entry.label_column,
        category_order=ingest.category_order,
    )
    table = load_table(entry.train_path, options)
    run_settings = TrainSettings(
        scheme=settings.scheme,
        bands_enabled=(mode == "bands"),
        residual_training=settings.residual_training,
        epsilon=settings.epsilon,
        max_iters=settings.max_iters,
        tol=settings.tol,
        limits=settings.limits,
    )
    model, _ = train_model(table, run_settings, source=entry.train_path.name)
    if entry.test_path is not None:
        eval_table = model.load_test_table(entry.test_path, options)
    else:
        eval_table = table
    return model.evaluate(eval_table), model


def _write_outputs(out_dir: Path, name: str, mode: str, model: Model, report: EvalReport):
    from .evaluation import render_report_kv

    with open(out_dir / "models" / f"{name}-{mode}.model", "wb") as fh:
        persist.save(model, fh)
    kv = render_report_kv(report, model.categories)
    (out_dir / "reports" / f"{name}-{mode}.kv").write_text(kv + "\n", encoding="utf-8")


def manifest_from_text(text: str, base: Path, delimiter: str = ",") -> list[ManifestEntry]:
    """parse_manifest over an in-memory string."""
    entries = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(delimiter)]
        if len(fields) not in (3, 4):
            raise ConfigError(
                f"manifest line {lineno}: expected 3 or 4 fields, got {len(fields)}"
            )
        label: int | str = fields[2]
        try:
            label = int(fields[2])
        except ValueError:
            pass
        entries.append(
            ManifestEntry(
                name=fields[0],
                train_path=base / fields[1],
                label_column=label,
                test_path=(base / fields[3]) if len(fields) == 4 else None,
            )
        )
    return entries
