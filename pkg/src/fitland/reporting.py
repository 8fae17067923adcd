"""Report emission: metric CSVs, comparison tables across explorers, and
standalone SVG line charts of cumulative-maximum trajectories.

Every file starts with `#`-prefixed header lines echoing the source
config, so outputs are self-describing; all writers are deterministic.
"""

import csv
import json

import numpy as np

from .harness import (
    RunLog,
    metric_count_above,
    metric_count_above_series,
    metric_cummax,
    metric_max_hits,
    metric_optima_found,
)
from .landscapes import LocalOptimaSet

__all__ = [
    "model_label",
    "explorer_label",
    "write_metrics_csv",
    "write_sweep_csv",
    "write_tour_csv",
    "run_summary",
    "write_report",
    "render_line_chart_svg",
]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _header_lines(fh, echo: dict):
    fh.write("# config: " + json.dumps(echo, sort_keys=True, separators=(",", ":")) + "\n")


def model_label(model_spec: dict) -> str:
    kind = model_spec["type"]
    if kind == "abstract":
        return f"abstract(alpha={model_spec['alpha']:g})"
    if kind == "ensemble":
        inner = ",".join(m["type"] for m in model_spec["members"])
        return f"ensemble[{inner}]"
    return kind


def explorer_label(explorer_spec: dict) -> str:
    return explorer_spec["type"]


def write_metrics_csv(log: RunLog, path):
    """Long-format per-round series: round,metric,value."""
    y_taus = log.config.get("y_tau", [])
    with open(path, "w", newline="") as fh:
        _header_lines(fh, log.config)
        w = csv.writer(fh)
        w.writerow(["round", "metric", "value"])
        cm = metric_cummax(log)
        for rec, v in zip(log.records, cm):
            w.writerow([rec.round, "cummax", _fmt(float(v))])
        for rec in log.records:
            w.writerow([rec.round, "round_max", _fmt(float(rec.fitnesses.max()))])
        for y in y_taus:
            series = metric_count_above_series(log, float(y))
            for rec, v in zip(log.records, series):
                w.writerow([rec.round, f"count_above_{y:g}", int(v)])
        for rec in log.records:
            w.writerow([rec.round, "model_queries", rec.model_queries])
        for rec in log.records:
            w.writerow([rec.round, "oracle_queries", rec.oracle_queries])


def write_sweep_csv(rows, echo: dict, path):
    if not rows:
        raise ValueError("no sweep rows to write")
    with open(path, "w", newline="") as fh:
        _header_lines(fh, echo)
        w = csv.writer(fh)
        cols = list(rows[0].keys())
        w.writerow(cols)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in cols])


def write_tour_csv(profiles_by_pair: dict, echo: dict, path):
    """Long format: pair,walk,step,fitness."""
    with open(path, "w", newline="") as fh:
        _header_lines(fh, echo)
        w = csv.writer(fh)
        w.writerow(["pair", "walk", "step", "fitness"])
        for pair, profiles in profiles_by_pair.items():
            for walk, profile in enumerate(profiles):
                for step, fit in enumerate(profile):
                    w.writerow([pair, walk, step, _fmt(float(fit))])


def run_summary(log: RunLog) -> str:
    cm = metric_cummax(log)
    totals = log.to_json_dict()["totals"]
    lines = [
        f"landscape: {log.landscape_name}",
        f"explorer:  {explorer_label(log.config['explorer'])}",
        f"model:     {model_label(log.config['model'])}",
        f"rounds:    {log.rounds()}",
        f"oracle queries: {totals['oracle_queries']} "
        f"({totals['oracle_queries_after_round0']} after round 0)",
        f"model queries:  {totals['model_queries']}",
        f"round-0 max fitness: {cm[0]:.6g}",
        f"final cumulative max: {cm[-1]:.6g}",
        "wall time per round (s): "
        + " ".join(f"{r.wall_time:.3f}" for r in log.records),
    ]
    for y in log.config.get("y_tau", []):
        n = metric_max_hits(log) if y == 1.0 else metric_count_above(log, float(y))
        lines.append(f"measured sequences above {y:g}: {n}")
    return "\n".join(lines) + "\n"


def _filtered_count(log: RunLog, optima: LocalOptimaSet, y_tau: float) -> int:
    if y_tau == 1.0:
        keep = optima.fitnesses >= 1.0 - 1e-9
    else:
        keep = optima.fitnesses > y_tau
    subset = LocalOptimaSet(
        threshold=y_tau,
        sequences=[s for s, k in zip(optima.sequences, keep) if k],
        fitnesses=optima.fitnesses[keep],
    )
    return metric_optima_found(log, subset)


def write_report(logs, out_dir, optima_by_landscape=None, force=False):
    """Group logs by landscape and emit per-group comparison files.

    Returns a list of warning strings (e.g. when logs mix landscapes).
    For each group: a cummax-by-round CSV (mean and sd per explorer), a
    threshold table with explorers as columns, and an SVG chart.
    """
    from pathlib import Path

    optima_by_landscape = optima_by_landscape or {}
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    warnings = []

    groups = {}
    for log in logs:
        groups.setdefault(log.landscape_name, []).append(log)
    if len(groups) > 1:
        warnings.append(
            f"logs span {len(groups)} landscapes; reporting each separately: "
            + ", ".join(sorted(groups))
        )

    written = []
    for name in sorted(groups):
        group = groups[name]
        by_cell = {}
        for log in group:
            key = (explorer_label(log.config["explorer"]), model_label(log.config["model"]))
            by_cell.setdefault(key, []).append(log)
        explorers = sorted({k[0] for k in by_cell})
        models = sorted({k[1] for k in by_cell})
        slug = name.replace("/", "_")

        path = out_dir / f"cummax_by_round_{slug}.csv"
        _refuse_overwrite(path, force)
        with open(path, "w", newline="") as fh:
            fh.write(f"# landscape: {name}\n")
            w = csv.writer(fh)
            w.writerow(["round", "explorer", "model", "mean_cummax", "sd_cummax", "n"])
            for (ex, mo), cell_logs in sorted(by_cell.items()):
                curves = np.array([metric_cummax(x) for x in cell_logs])
                for t in range(curves.shape[1]):
                    w.writerow([
                        t, ex, mo,
                        _fmt(float(curves[:, t].mean())),
                        _fmt(float(curves[:, t].std())),
                        curves.shape[0],
                    ])
        written.append(path)

        y_taus = sorted({float(y) for log in group for y in log.config.get("y_tau", [])})
        optima = optima_by_landscape.get(name)
        if optima is None and optima_by_landscape:
            warnings.append(f"no optima set supplied for landscape {name}")
        path = out_dir / f"table_{slug}.csv"
        _refuse_overwrite(path, force)
        with open(path, "w", newline="") as fh:
            fh.write(f"# landscape: {name}\n")
            w = csv.writer(fh)
            w.writerow(["landscape", "y_tau", "model", "metric"] + explorers)
            for y in y_taus:
                for mo in models:
                    metric = "optima_found" if optima is not None else "count_above"
                    row = [name, f"{y:g}", mo, metric]
                    for ex in explorers:
                        cell_logs = by_cell.get((ex, mo))
                        if not cell_logs:
                            row.append("")
                            continue
                        if optima is not None:
                            vals = [_filtered_count(x, optima, y) for x in cell_logs]
                        elif y == 1.0:
                            vals = [metric_max_hits(x) for x in cell_logs]
                        else:
                            vals = [metric_count_above(x, y) for x in cell_logs]
                        vals = np.array(vals, dtype=np.float64)
                        row.append(f"{vals.mean():.4g}±{vals.std():.4g}")
                    w.writerow(row)
        written.append(path)

        path = out_dir / f"cummax_{slug}.svg"
        _refuse_overwrite(path, force)
        series = {}
        for (ex, mo), cell_logs in sorted(by_cell.items()):
            curves = np.array([metric_cummax(x) for x in cell_logs])
            series[f"{ex} | {mo}"] = curves.mean(axis=0)
        render_line_chart_svg(series, path, title=f"cumulative max on {name}")
        written.append(path)
    return warnings, written


def _refuse_overwrite(path, force):
    if path.exists() and not force:
        raise FileExistsError(f"refusing to overwrite {path}; pass --force to replace")


_PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
]


def render_line_chart_svg(series: dict, path, title: str = "", width=640, height=400):
    """Minimal deterministic SVG line chart; y is fixed to [0, 1]."""
    left, right, top, bottom = 60, 20, 40, 50
    plot_w = width - left - right
    plot_h = height - top - bottom
    n_rounds = max((len(v) for v in series.values()), default=2)
    x_max = max(n_rounds - 1, 1)

    def sx(t):
        return left + plot_w * t / x_max

    def sy(v):
        return top + plot_h * (1.0 - min(max(v, 0.0), 1.0))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]
    # axes and ticks
    parts.append(
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + plot_h}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{left}" y1="{top + plot_h}" x2="{left + plot_w}" y2="{top + plot_h}" stroke="black"/>'
    )
    for i in range(6):
        v = i / 5
        y = sy(v)
        parts.append(f'<line x1="{left - 4}" y1="{y:.1f}" x2="{left}" y2="{y:.1f}" stroke="black"/>')
        parts.append(
            f'<text x="{left - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{v:.1f}</text>'
        )
    for t in range(n_rounds):
        x = sx(t)
        parts.append(
            f'<line x1="{x:.1f}" y1="{top + plot_h}" x2="{x:.1f}" y2="{top + plot_h + 4}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{top + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{t}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">round</text>'
    )
    for i, (label, values) in enumerate(sorted(series.items())):
        color = _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{sx(t):.2f},{sy(float(v)):.2f}" for t, v in enumerate(values))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>'
        )
        ly = top + 14 * i
        parts.append(
            f'<line x1="{left + plot_w - 130}" y1="{ly:.1f}" x2="{left + plot_w - 110}" '
            f'y2="{ly:.1f}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{left + plot_w - 105}" y="{ly + 4:.1f}" '
            f'font-family="sans-serif" font-size="10">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
