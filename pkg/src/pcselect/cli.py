"""Command-line surface: simulate, cv, bench, report.

Exit codes: 0 success, 1 usage error (bad flags or arguments), 2 data
error (unreadable files, malformed content or configuration, model
failures).
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .bench import BenchRecord, BenchSummary, CampaignConfig, run_campaign, summarize
from .crossval import Method, latin_square_plan, random_plan, run_cv
from .datagen import DatasetSpec, generate
from .errors import PcselectError, ConfigError, DataError
from .linalg import DataMatrix
from .matrixio import MatrixFile, format_matrix, read_matrix, write_matrix

_CONFIG_KEYS = ("types", "noise_levels", "reps", "methods", "folds", "seed")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse terminates with status 2 on usage problems; the contract
    here reserves 2 for data errors, so usage failures are re-routed."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _parse_plan(text: str):
    """Plan spec: 'random' or 'latin:GRIDxREPS' (e.g. latin:16x5)."""
    if text == "random":
        return ("random",)
    if text.startswith("latin:"):
        try:
            grid, _, reps = text[len("latin:"):].partition("x")
            return ("latin", int(grid), int(reps))
        except ValueError:
            pass
    raise argparse.ArgumentTypeError(
        f"expected 'random' or 'latin:GRIDxREPS', got {text!r}"
    )


def _build_parser() -> _Parser:
    shared = _Parser(add_help=False)
    shared.add_argument("--seed", type=int, default=None, help="RNG seed (unsigned 64-bit)")
    shared.add_argument("--threads", type=int, default=1, help="worker process count")
    shared.add_argument("--output", default=None, help="output path (default: stdout or a command-specific name)")

    parser = _Parser(prog="pcselect", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    sim = commands.add_parser("simulate", parents=[shared], help="write one simulated data set")
    sim.add_argument("--type", type=int, required=True, dest="set_type", help="data set type 1..4")
    sim.add_argument("--noise", type=int, required=True, dest="noise_level", help="noise level 1..6")
    sim.add_argument("--rep", type=int, default=1, dest="repetition", help="repetition index")
    sim.add_argument("--n-samples", type=int, default=1024, help="rows to generate")
    sim.set_defaults(run=_cmd_simulate)

    cv = commands.add_parser("cv", parents=[shared], help="cross-validate one matrix file")
    cv.add_argument("matrix", help="input matrix CSV")
    cv.add_argument("--method", required=True, choices=[m.value for m in Method])
    cv.add_argument("--folds", type=int, default=16)
    cv.add_argument("--plan", type=_parse_plan, default=("random",),
                    help="fold plan: random | latin:GRIDxREPS")
    cv.add_argument("--no-center", action="store_true",
                    help="skip mean centering (simulated-data pipeline)")
    cv.add_argument("--header", action="store_true",
                    help="treat the first line as column labels even if numeric")
    cv.set_defaults(run=_cmd_cv)

    bench = commands.add_parser("bench", parents=[shared], help="run a benchmark campaign")
    bench.add_argument("--config", required=True, help="key=value campaign settings file")
    bench.add_argument("--summary", default=None,
                       help="summary CSV path (default: derived from the records path)")
    bench.set_defaults(run=_cmd_bench)

    report = commands.add_parser("report", parents=[shared], help="aggregate a records CSV into plot-ready tables")
    report.add_argument("records", help="records CSV produced by bench")
    report.set_defaults(run=_cmd_report)
    return parser


def parse_campaign_config(text: str, seed: int | None = None, threads: int = 1) -> CampaignConfig:
    """Build campaign settings from key=value lines.

    Recognized keys: types, noise_levels, reps, methods, folds, seed.
    Blank lines and '#' comments are skipped; unknown or repeated keys are
    rejected.  ``seed`` (from the command line) overrides the file.
    """
    settings: dict[str, str] = {}
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"config line {lineno}: expected key=value, got {raw!r}")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if key in settings:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        settings[key] = value

    def ints(name):
        try:
            return tuple(int(x) for x in settings[name].split(","))
        except ValueError as exc:
            raise ConfigError(f"config key {name!r}: {exc}") from exc

    def single_int(name):
        try:
            return int(settings[name])
        except ValueError as exc:
            raise ConfigError(f"config key {name!r}: {exc}") from exc

    kwargs = {"threads": threads}
    if "types" in settings:
        kwargs["set_types"] = ints("types")
    if "noise_levels" in settings:
        kwargs["noise_levels"] = ints("noise_levels")
    if "reps" in settings:
        kwargs["n_repetitions"] = single_int("reps")
    if "folds" in settings:
        kwargs["n_folds"] = single_int("folds")
    if "seed" in settings:
        kwargs["seed"] = single_int("seed")
    if "methods" in settings:
        try:
            kwargs["methods"] = tuple(
                Method(m.strip()) for m in settings["methods"].split(",")
            )
        except ValueError as exc:
            raise ConfigError(f"config key 'methods': {exc}") from exc
    if seed is not None:
        kwargs["seed"] = seed
    return CampaignConfig(**kwargs)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _cmd_simulate(args) -> int:
    spec = DatasetSpec(
        set_type=args.set_type,
        noise_level=args.noise_level,
        repetition=args.repetition,
        n_samples=args.n_samples,
        seed=args.seed if args.seed is not None else 0,
    )
    data = generate(spec)
    _emit(format_matrix(MatrixFile(values=data.values)), args.output)
    return 0


def _cmd_cv(args) -> int:
    matrix = read_matrix(args.matrix, header=True if args.header else "auto")
    data = DataMatrix(matrix.values)
    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    if args.plan[0] == "random":
        plan = random_plan(data.n_rows, args.folds, rng)
    else:
        plan = latin_square_plan(args.plan[1], args.plan[2], rng)
    curve = run_cv(data, args.method, plan, centering=not args.no_center)
    lines = ["k,criterion,selected"]
    for k, value in zip(curve.k_values, curve.criterion):
        marker = 1 if int(k) == curve.selected_k else 0
        lines.append(f"{int(k)},{repr(float(value))},{marker}")
    _emit("\n".join(lines) + "\n", args.output)
    return 0


def records_to_csv(records: list[BenchRecord]) -> str:
    lines = ["set_type,noise_level,repetition,method,selected_k,runtime_seconds,error"]
    for r in records:
        selected = "" if r.selected_k is None else str(r.selected_k)
        error = "" if r.error is None else r.error.replace(",", ";").replace("\n", " ")
        lines.append(
            f"{r.set_type},{r.noise_level},{r.repetition},{r.method.value},"
            f"{selected},{repr(float(r.runtime_seconds))},{error}"
        )
    return "\n".join(lines) + "\n"


def read_records_csv(path) -> list[BenchRecord]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    records = []
    for i, row in enumerate(rows, start=2):
        try:
            records.append(
                BenchRecord(
                    set_type=int(row["set_type"]),
                    noise_level=int(row["noise_level"]),
                    repetition=int(row["repetition"]),
                    method=Method(row["method"]),
                    selected_k=int(row["selected_k"]) if row["selected_k"] else None,
                    runtime_seconds=float(row["runtime_seconds"]),
                    error=row["error"] or None,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: line {i}: {exc}") from exc
    if not records:
        raise DataError(f"{path}: no records")
    return records


def _sorted_cells(summary: BenchSummary):
    return sorted(summary.accuracy, key=lambda c: (c[0], c[1], c[2].value))


def _summary_to_csv(summary: BenchSummary) -> str:
    lines = ["set_type,noise_level,method,accuracy,mean_runtime_seconds,n_records"]
    for cell in _sorted_cells(summary):
        s, e, method = cell
        lines.append(
            f"{s},{e},{method.value},{repr(float(summary.accuracy[cell]))},"
            f"{repr(float(summary.mean_runtime[cell]))},{summary.n_records[cell]}"
        )
    return "\n".join(lines) + "\n"


def _histogram_to_csv(summary: BenchSummary) -> str:
    lines = ["set_type,noise_level,method,k,count"]
    for cell in _sorted_cells(summary):
        s, e, method = cell
        for k in sorted(summary.k_histogram[cell]):
            lines.append(f"{s},{e},{method.value},{k},{summary.k_histogram[cell][k]}")
    return "\n".join(lines) + "\n"


def _runtime_to_csv(summary: BenchSummary) -> str:
    lines = ["set_type,noise_level,method,mean_runtime_seconds"]
    for cell in _sorted_cells(summary):
        s, e, method = cell
        lines.append(f"{s},{e},{method.value},{repr(float(summary.mean_runtime[cell]))}")
    return "\n".join(lines) + "\n"


def _accuracy_to_csv(summary: BenchSummary) -> str:
    lines = ["set_type,noise_level,method,accuracy"]
    for cell in _sorted_cells(summary):
        s, e, method = cell
        lines.append(f"{s},{e},{method.value},{repr(float(summary.accuracy[cell]))}")
    return "\n".join(lines) + "\n"


def _cmd_bench(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read {args.config}: {exc}") from exc
    config = parse_campaign_config(text, seed=args.seed, threads=args.threads)
    records = run_campaign(config)
    records_path = args.output or "bench_records.csv"
    _emit(records_to_csv(records), records_path)
    summary_path = args.summary or records_path.removesuffix(".csv") + "_summary.csv"
    _emit(_summary_to_csv(summarize(records)), summary_path)
    return 0


def _cmd_report(args) -> int:
    summary = summarize(read_records_csv(args.records))
    prefix = args.output or "report"
    _emit(_accuracy_to_csv(summary), f"{prefix}_accuracy.csv")
    _emit(_histogram_to_csv(summary), f"{prefix}_histogram.csv")
    _emit(_runtime_to_csv(summary), f"{prefix}_runtime.csv")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return args.run(args)
    except PcselectError as exc:
        print(f"pcselect: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"pcselect: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
