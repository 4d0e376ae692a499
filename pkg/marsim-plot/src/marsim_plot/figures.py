"""Render simulator result CSVs as grouped bar charts.

The input contract is the simulator's CSV schema (see ``CSV_HEADER``). Each
figure kind groups rows by one key, draws one bar per algorithm with the
mean over seeds, and adds one-standard-deviation error bars. Rendering is a
pure function of the CSV content and the spec: fixed figure size, DPI and
fonts, no timestamps, so re-rendering the same inputs produces a
pixel-identical image on the same platform.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

CSV_HEADER = ("scenario_id", "seed", "algorithm", "K", "T", "M",
              "users_total", "users_served", "rbs_used", "bits_served",
              "runtime_ms")

FIGURE_KINDS = ("rician_k", "time_slot", "scenarios", "fast_channel",
                "rb_utilization")

# group key, value column, algorithms drawn, axis labels
_FIGURES = {
    "rician_k": ("K", "users_served", ("mars", "upper_bound"),
                 "Rician factor K", "users served"),
    "time_slot": ("T", "users_served", ("mars", "upper_bound"),
                  "slicing window T (TTIs)", "users served"),
    "scenarios": ("scenario_id", "users_served", ("mars", "upper_bound"),
                  "scenario", "users served"),
    "fast_channel": ("T", "users_served", ("mars", "upper_bound"),
                     "slicing window T (TTIs)", "users served"),
    "rb_utilization": ("scenario_id", "rbs_used",
                       ("mars", "max_mcs", "avg_mcs", "low_mcs"),
                       "scenario", "resource blocks used"),
}

_LABELS = {
    "mars": "greedy",
    "upper_bound": "upper bound",
    "max_mcs": "max MCS",
    "avg_mcs": "avg MCS",
    "low_mcs": "low MCS",
}


class SchemaError(ValueError):
    """The CSV file does not carry the expected result columns."""


class EmptyDataError(ValueError):
    """The CSV parsed but holds no rows for the requested figure."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    figure: str
    output: str
    group_key: str | None = None
    dpi: int = 120

    def __post_init__(self):
        if self.figure not in FIGURE_KINDS:
            raise ValueError(f"unknown figure {self.figure!r}; "
                             f"choose from {FIGURE_KINDS}")


def load_rows(path) -> list[dict]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header "
                              f"{','.join(CSV_HEADER)}") from None
        missing = [c for c in CSV_HEADER if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing columns {missing}")
        idx = {c: header.index(c) for c in CSV_HEADER}
        rows = []
        for rec in reader:
            rows.append({c: rec[idx[c]] for c in CSV_HEADER})
    return rows


def _group_label(row: dict, key: str) -> str:
    val = row[key]
    if key == "K":
        return f"K={float(val):g}" if val else "K=?"
    if key == "T":
        return f"T={int(val)}"
    return val


def _sort_key(label: str):
    if "=" in label:
        tail = label.split("=", 1)[1]
        try:
            return (0, float(tail), label)
        except ValueError:
            return (1, 0.0, label)
    return (1, 0.0, label)


def render(spec: PlotSpec) -> None:
    """Write the grouped bar chart for one figure kind.

    Raises SchemaError when columns are missing and EmptyDataError when no
    row matches the figure's algorithms; the empty-data chart is still
    written (annotated) before the error is raised.
    """
    group_key, value_col, algos, xlabel, ylabel = _FIGURES[spec.figure]
    if spec.group_key:
        group_key = spec.group_key
    rows = load_rows(spec.input_csv)

    samples: dict[tuple[str, str], list[float]] = {}
    for row in rows:
        algo = row["algorithm"]
        if algo not in algos:
            continue
        label = _group_label(row, group_key)
        samples.setdefault((label, algo), []).append(float(row[value_col]))

    groups = sorted({label for label, _ in samples}, key=_sort_key)

    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    try:
        if not groups:
            ax.text(0.5, 0.5, "no matching data", ha="center", va="center",
                    transform=ax.transAxes)
            ax.set_axis_off()
            fig.savefig(spec.output, dpi=spec.dpi, metadata={"Software": None})
            raise EmptyDataError(f"{spec.input_csv}: no rows for figure "
                                 f"{spec.figure!r}")
        width = 0.8 / len(algos)
        x = np.arange(len(groups), dtype=float)
        for j, algo in enumerate(algos):
            means = [float(np.mean(samples.get((g, algo), [np.nan]))) for g in groups]
            stds = [float(np.std(samples[(g, algo)])) if (g, algo) in samples else 0.0
                    for g in groups]
            ax.bar(x + (j - (len(algos) - 1) / 2) * width, means, width,
                   yerr=stds, capsize=3, label=_LABELS.get(algo, algo))
        ax.set_xticks(x)
        ax.set_xticklabels(groups, rotation=15 if group_key == "scenario_id" else 0)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(f"{ylabel} (mean over seeds, +/- std)")
        ax.legend()
        ax.grid(axis="y", alpha=0.3)
        fig.tight_layout()
        fig.savefig(spec.output, dpi=spec.dpi, metadata={"Software": None})
    finally:
        plt.close(fig)
