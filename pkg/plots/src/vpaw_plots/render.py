"""Render paper-style log-log convergence figures from benchmark CSV files.

The input is the CSV emitted by the `vpaw1d` sweep commands (columns
method, N, d, eta, M, eig_index, E_computed, E_reference, abs_error, ...).
A figure spec selects the x-axis column, the columns whose distinct value
combinations define curves, and optional reference-slope guide lines.

Each rendered curve carries a fitted slope, computed by ordinary least
squares on (log x, log y) -- the same formula the benchmark summaries use,
re-implemented here so this package depends only on the CSV interface.  The
slopes are duplicated into a JSON annotation file: figure correctness is
testable without image diffing, and the JSON is a pure function of the CSV.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


class MissingColumn(Exception):
    """A referenced column is absent from the CSV header."""


class EmptyGroup(Exception):
    """A curve group matched no usable rows."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: tuple
    output_image: str
    x_axis: str = "eta"
    y_column: str = "abs_error"
    group_by: tuple = ("N", "d", "M")
    output_annotations: Optional[str] = None
    reference_slopes: tuple = ()
    title: str = ""

    @staticmethod
    def from_json(path: str) -> "FigureSpec":
        with open(path) as fh:
            raw = json.load(fh)
        inputs = raw["input_csv"]
        if isinstance(inputs, str):
            inputs = [inputs]
        return FigureSpec(
            input_csv=tuple(inputs),
            output_image=raw["output_image"],
            x_axis=raw.get("x_axis", "eta"),
            y_column=raw.get("y_column", "abs_error"),
            group_by=tuple(raw.get("group_by", ["N", "d", "M"])),
            output_annotations=raw.get("output_annotations"),
            reference_slopes=tuple(tuple(p) for p in raw.get("reference_slopes", [])),
            title=raw.get("title", ""),
        )

    def annotations_path(self) -> str:
        if self.output_annotations:
            return self.output_annotations
        stem = self.output_image.rsplit(".", 1)[0]
        return stem + ".json"


def fit_loglog(xs: Sequence[float], ys: Sequence[float]):
    """OLS slope and r^2 on (log x, log y); needs >= 4 positive points."""
    if len(xs) < 4:
        raise ValueError("need at least 4 points per curve")
    if any(y <= 0 for y in ys) or any(x <= 0 for x in xs):
        raise ValueError("log-log fit needs strictly positive data")
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    pred = A @ coef
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(coef[0]), r2


def _read_rows(spec: FigureSpec) -> list:
    rows = []
    for path in spec.input_csv:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            for col in (spec.x_axis, spec.y_column, *spec.group_by):
                if col not in header:
                    raise MissingColumn(f"column {col!r} not in {path} header")
            rows.extend(reader)
    return rows


def _usable(row: dict, spec: FigureSpec) -> bool:
    if row.get("error"):
        return False
    try:
        x = float(row[spec.x_axis])
        y = float(row[spec.y_column])
    except (TypeError, ValueError):
        return False
    return x > 0 and y != 0


def render(spec: FigureSpec) -> dict:
    """Produce the figure and its annotation JSON; returns the annotations."""
    rows = [r for r in _read_rows(spec) if _usable(r, spec)]
    if not rows:
        raise EmptyGroup("no usable rows in the input CSV")
    groups: dict = {}
    # log-log figures plot magnitudes; signed columns (e.g. raw jump
    # values) enter through their absolute value
    for r in rows:
        key = tuple(r[c] for c in spec.group_by)
        groups.setdefault(key, []).append(
            (float(r[spec.x_axis]), abs(float(r[spec.y_column]))))

    curves = []
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for key in sorted(groups):
        pts = sorted(groups[key])
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        slope, r2 = fit_loglog(xs, ys)
        label = ", ".join(f"{c}={v}" for c, v in zip(spec.group_by, key))
        ax.loglog(xs, ys, marker="o", label=f"{label} (slope {slope:.2f})")
        curves.append({
            "key": {c: v for c, v in zip(spec.group_by, key)},
            "slope": round(slope, 12),
            "r2": round(r2, 12),
            "n_points": len(pts),
        })
    all_x = sorted({p[0] for pts in groups.values() for p in pts})
    all_y = [p[1] for pts in groups.values() for p in pts]
    for ref in spec.reference_slopes:
        s = float(ref[0])
        label = str(ref[1]) if len(ref) > 1 else f"slope {s:g}"
        x0, x1 = all_x[0], all_x[-1]
        y0 = min(all_y)
        ax.loglog([x0, x1], [y0, y0 * (x1 / x0) ** s], "k--", alpha=0.5, label=label)
    ax.set_xlabel(spec.x_axis)
    ax.set_ylabel(spec.y_column)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(spec.output_image)
    plt.close(fig)

    annotations = {
        "x_axis": spec.x_axis,
        "y_column": spec.y_column,
        "group_by": list(spec.group_by),
        "curves": curves,
    }
    with open(spec.annotations_path(), "w") as fh:
        json.dump(annotations, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return annotations
