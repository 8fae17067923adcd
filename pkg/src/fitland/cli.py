"""Command-line front end: run experiments, sweep model accuracy,
enumerate optima, trace landscape tours, and build comparison reports.

Exit codes: 0 success, 2 config error, 3 budget/contract violation,
4 I/O error (including refusal to overwrite without --force).
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .config import (
    SCHEMA_VERSION,
    DEFAULT_Y_TAU,
    build_landscape,
    load_config,
    validate_landscape_spec,
)
from .errors import BudgetExceededError, ConfigError, ContractViolationError
from .harness import RunLog, run_experiment, sweep_alpha
from .landscapes import LocalOptimaSet, enumerate_local_optima, path_tour
from .reporting import (
    run_summary,
    write_metrics_csv,
    write_report,
    write_sweep_csv,
    write_tour_csv,
)
from .seqs import Sequence

OUT_ENV_VAR = "FITLAND_OUT"


def _out_dir(args, config_path) -> Path:
    if args.out:
        return Path(args.out)
    root = os.environ.get(OUT_ENV_VAR, "runs")
    return Path(root) / Path(config_path).stem


def _refuse(path: Path, force: bool):
    if path.exists() and not force:
        raise FileExistsError(f"refusing to overwrite {path}; pass --force to replace")


def _load_landscape_doc(path):
    """Read just the landscape block (and thresholds) from a config file.

    Accepts both full run configs and minimal documents containing only
    schema_version + landscape.
    """
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ConfigError("config root must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"config.schema_version: expected {SCHEMA_VERSION}, got {version}")
    if "landscape" not in doc or not isinstance(doc["landscape"], dict):
        raise ConfigError("config.landscape: missing required key")
    spec = validate_landscape_spec(doc["landscape"])
    y_tau = doc.get("y_tau", list(DEFAULT_Y_TAU))
    if not isinstance(y_tau, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in y_tau
    ):
        raise ConfigError("config.y_tau: must be a list of numbers")
    return spec, [float(v) for v in y_tau]


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    out = _out_dir(args, args.config)
    runlog_path = out / "runlog.json"
    _refuse(runlog_path, args.force)

    log = run_experiment(config)

    out.mkdir(parents=True, exist_ok=True)
    log.save(runlog_path)
    write_metrics_csv(log, out / "metrics.csv")
    summary = run_summary(log)
    (out / "summary.txt").write_text(summary)
    sys.stdout.write(summary)
    sys.stdout.write(f"wrote {runlog_path}\n")
    return 0


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)
    if config.sweep is None:
        raise ConfigError("config.sweep: missing required block for the sweep command")
    out = _out_dir(args, args.config)
    sweep_path = out / "sweep.csv"
    _refuse(sweep_path, args.force)

    rows = sweep_alpha(config, jobs=args.jobs)

    out.mkdir(parents=True, exist_ok=True)
    write_sweep_csv(rows, config.echo(), sweep_path)
    sys.stdout.write(f"wrote {sweep_path} ({len(rows)} cells)\n")
    return 0


def cmd_enumerate(args) -> int:
    spec, y_taus = _load_landscape_doc(args.config)
    if args.y_tau:
        y_taus = [float(v) for v in args.y_tau]
    landscape = build_landscape(spec)
    out = _out_dir(args, args.config)
    optima_path = out / "optima.csv"
    summary_path = out / "optima_summary.csv"
    _refuse(optima_path, args.force)
    _refuse(summary_path, args.force)

    base = min(y_taus) if y_taus else 0.0
    if base == 1.0:
        base = 1.0 - 1e-9  # keep top-of-scale optima in the CSV for "= 1" rows
    optima = enumerate_local_optima(landscape, base)

    out.mkdir(parents=True, exist_ok=True)
    optima.save_csv(optima_path)
    with open(summary_path, "w", newline="") as fh:
        fh.write("# config: " + json.dumps({"landscape": spec}, sort_keys=True, separators=(",", ":")) + "\n")
        fh.write("y_tau,optima_count\n")
        for y in y_taus:
            fh.write(f"{y:g},{optima.count_above(y)}\n")
    sys.stdout.write(
        f"wrote {optima_path} ({len(optima)} optima above {base:g} on {landscape.name})\n"
    )
    return 0


def cmd_tour(args) -> int:
    spec, _ = _load_landscape_doc(args.config)
    landscape = build_landscape(spec)
    named = []
    for item in args.seq:
        if "=" not in item:
            raise ConfigError(f"--seq expects NAME=SEQUENCE, got {item!r}")
        name, raw = item.split("=", 1)
        try:
            seq = Sequence.from_string(raw.strip().upper(), landscape.alphabet)
        except ValueError as exc:
            raise ConfigError(f"--seq {name}: {exc}") from None
        if len(seq) != landscape.length:
            raise ConfigError(
                f"--seq {name}: length {len(seq)}, landscape needs {landscape.length}"
            )
        named.append((name, seq))
    if len(named) < 2:
        raise ConfigError("tour needs at least two --seq endpoints")

    out = _out_dir(args, args.config)
    tour_path = out / "tour.csv"
    _refuse(tour_path, args.force)

    rng = np.random.default_rng(args.seed if args.seed is not None else 0)
    profiles = {}
    for i in range(len(named)):
        for j in range(i + 1, len(named)):
            (na, sa), (nb, sb) = named[i], named[j]
            profiles[f"{na}-{nb}"] = path_tour(landscape, sa, sb, n_walks=args.walks, rng=rng)

    out.mkdir(parents=True, exist_ok=True)
    echo = {"landscape": spec, "walks": args.walks, "seed": args.seed or 0,
            "endpoints": {n: str(s) for n, s in named}}
    write_tour_csv(profiles, echo, tour_path)
    sys.stdout.write(f"wrote {tour_path} ({len(profiles)} pairs x {args.walks} walks)\n")
    return 0


def cmd_report(args) -> int:
    logs = [RunLog.load(p) for p in args.runlogs]
    optima_map = {}
    for item in args.optima or []:
        if "=" not in item:
            raise ConfigError(f"--optima expects LANDSCAPE=path, got {item!r}")
        name, path = item.split("=", 1)
        alphabet = None
        for log in logs:
            if log.landscape_name == name:
                alphabet = log.alphabet
                break
        if alphabet is None:
            raise ConfigError(f"--optima: no runlog for landscape {name!r}")
        optima_map[name] = LocalOptimaSet.load_csv(path, alphabet)

    out = args.out or os.path.join(os.environ.get(OUT_ENV_VAR, "runs"), "report")
    warnings, written = write_report(logs, out, optima_map, force=args.force)
    for wmsg in warnings:
        sys.stderr.write(f"warning: {wmsg}\n")
    for path in written:
        sys.stdout.write(f"wrote {path}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fitland",
        description="Benchmark model-guided sequence design on simulated fitness landscapes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help=f"output directory (default: ${OUT_ENV_VAR}/<config stem>)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")

    p = sub.add_parser("run", help="execute one experiment")
    common(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run the alpha x replicate grid")
    common(p)
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("enumerate-optima", help="brute-force local optima")
    common(p)
    p.add_argument("--y-tau", type=float, nargs="*", help="override threshold list")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("tour", help="fitness profiles along shortest mutational paths")
    common(p)
    p.add_argument("--seq", action="append", default=[], help="NAME=SEQUENCE endpoint (repeat)")
    p.add_argument("--walks", type=int, default=30, help="walks per endpoint pair")
    p.set_defaults(func=cmd_tour)

    p = sub.add_parser("report", help="comparison tables and charts from runlogs")
    p.add_argument("runlogs", nargs="+", help="runlog.json files")
    p.add_argument("--out", help="output directory")
    p.add_argument("--optima", action="append", help="LANDSCAPE=optima.csv (repeat)")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except (BudgetExceededError, ContractViolationError) as exc:
        sys.stderr.write(f"contract violation: {exc}\n")
        return 3
    except OSError as exc:
        sys.stderr.write(f"i/o error: {exc}\n")
        return 4
    except ValueError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
