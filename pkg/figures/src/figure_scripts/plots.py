"""Line charts of selection-strategy performance from experiment CSV files.

One figure per (p, metric) group: x is the seed-set size K, y is the mean
objective with 95% confidence-interval error bars, one series per strategy.
Rendering is deliberately pinned (fixed style table, figure geometry, dpi,
no encoder metadata) so that repeated runs on the same input produce
byte-identical images.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

#: columns the renderer reads; anything else in the file is ignored
REQUIRED_COLUMNS = (
    "strategy", "p", "metric", "K",
    "mean", "ci_low", "ci_high", "includes_seed_set",
)

#: fixed per-strategy styling so figures from different runs are comparable
STRATEGY_STYLE = {
    "greedy": {"color": "#1f77b4", "marker": "o"},
    "high_degree": {"color": "#d62728", "marker": "s"},
    "random": {"color": "#2ca02c", "marker": "^"},
    "dynamic_greedy": {"color": "#9467bd", "marker": "D"},
}
_FALLBACK_STYLE = {"color": "#7f7f7f", "marker": "x"}

_FIGSIZE = (6.0, 4.0)
_DPI = 100


@dataclass(frozen=True)
class PlotSpec:
    """What to plot and where to put it."""

    csv_path: str
    out_dir: str
    group_by: tuple = ("p", "metric")
    series_column: str = "strategy"
    logy: bool = False


def load_rows(spec: PlotSpec) -> list[dict]:
    """Read and validate the CSV; returns the plottable rows.

    Raises ValueError listing every missing column, or complaining about an
    empty body.  Only rows whose mean counts the seed set itself are kept;
    the complementary rows differ from them by the constant K and would
    plot the same shapes.
    """
    with open(spec.csv_path, newline="") as f:
        reader = csv.DictReader(f)
        header = reader.fieldnames or []
        referenced = set(REQUIRED_COLUMNS) | set(spec.group_by) | {spec.series_column}
        missing = sorted(c for c in referenced if c not in header)
        if missing:
            raise ValueError(f"missing columns: {', '.join(missing)}")
        rows = []
        for record in reader:
            if record["includes_seed_set"].strip().lower() != "true":
                continue
            rows.append({
                "strategy": record["strategy"],
                "p": record["p"],
                "metric": record["metric"],
                "K": int(record["K"]),
                "mean": float(record["mean"]),
                "ci_low": float(record["ci_low"]),
                "ci_high": float(record["ci_high"]),
            })
    if not rows:
        raise ValueError("no plottable data rows")
    return rows


def group_rows(rows: list[dict], spec: PlotSpec) -> dict:
    """(group key) -> {series name -> [(K, mean, ci_low, ci_high)] sorted by K}."""
    groups: dict = {}
    for row in rows:
        key = tuple(row[c] for c in spec.group_by)
        series = groups.setdefault(key, {}).setdefault(row[spec.series_column], [])
        series.append((row["K"], row["mean"], row["ci_low"], row["ci_high"]))
    for series_map in groups.values():
        for points in series_map.values():
            points.sort()
    return groups


def _series_order(names) -> list:
    known = [s for s in STRATEGY_STYLE if s in names]
    return known + sorted(n for n in names if n not in STRATEGY_STYLE)


def _group_sort_key(key: tuple):
    p_text, metric = key
    return (float(p_text), metric)


def render(spec: PlotSpec) -> list[str]:
    """Write one PNG per (p, metric) group; returns the paths written.

    The input file is only ever opened for reading.
    """
    rows = load_rows(spec)
    groups = group_rows(rows, spec)
    os.makedirs(spec.out_dir, exist_ok=True)

    written = []
    for key in sorted(groups, key=_group_sort_key):
        p_text, metric = key
        series_map = groups[key]
        with plt.rc_context(rc=matplotlib.rcParamsDefault):
            fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
            for name in _series_order(series_map):
                points = series_map[name]
                ks = [pt[0] for pt in points]
                means = [pt[1] for pt in points]
                err_low = [max(pt[1] - pt[2], 0.0) for pt in points]
                err_high = [max(pt[3] - pt[1], 0.0) for pt in points]
                style = STRATEGY_STYLE.get(name, _FALLBACK_STYLE)
                ax.errorbar(ks, means, yerr=[err_low, err_high], label=name,
                            capsize=3, **style)
            if spec.logy:
                ax.set_yscale("log")
            ax.set_xlabel("K (number of followings)")
            ax.set_ylabel(f"mean {metric}")
            ax.set_title(f"p = {p_text}")
            ax.legend()
            fig.tight_layout()
            path = os.path.join(spec.out_dir, f"fig_p{p_text}_{metric}.png")
            fig.savefig(path, dpi=_DPI, metadata={"Software": None})
            plt.close(fig)
        written.append(path)
    return written
