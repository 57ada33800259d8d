"""Render variance and gap figures from lattice-sampling curve CSV files.

Two styles, paneled by dimension: ``variance`` plots each lattice's
normalized error variance together with the universal lower bound; ``gap``
plots the distance to the bound on a log axis with the two threshold rates
of each lattice marked by dashed vertical lines.

The tool is decoupled from the numerical package: it consumes only the CSV
schema and a static table of the closed-form thresholds.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

EXPECTED_HEADER = ["lattice", "dim", "rate", "sigma_e2", "sigma_lb2", "gap", "stderr"]

#: Closed-form threshold rates (low, high) per sampling lattice: the
#: reciprocal covering and packing radius of its unit-volume dual.
THRESHOLDS = {
    "Z1": (2.0, 2.0),
    "Z2": (math.sqrt(2.0), 2.0),
    "A2": (3.0**0.75 / math.sqrt(2.0), 3.0**0.25 * math.sqrt(2.0)),
    "A2_dual": (3.0**0.75 / math.sqrt(2.0), 3.0**0.25 * math.sqrt(2.0)),
    "Z3": (2.0 / math.sqrt(3.0), 2.0),
    "A3": (2.0 ** (5.0 / 3.0) / math.sqrt(5.0), 2.0 ** (5.0 / 3.0) / math.sqrt(3.0)),
    "A3_dual": (2.0 ** (1.0 / 3.0), 2.0 ** (5.0 / 6.0)),
    "Z4": (1.0, 2.0),
    "D4": (2.0**0.25, 2.0**0.75),
    "D4_dual": (2.0**0.25, 2.0**0.75),
    "A4": (5.0**0.375 / math.sqrt(2.0), 5.0**0.375),
    "A4_dual": (5.0**0.375 / math.sqrt(2.0), 5.0**0.375),
    "Z8": (1.0 / math.sqrt(2.0), 2.0),
    "E8": (1.0, math.sqrt(2.0)),
    "A8": (3.0**1.375 / math.sqrt(20.0), 3.0**0.875 / math.sqrt(2.0)),
    "A8_dual": (3.0**1.375 / math.sqrt(20.0), 3.0**0.875 / math.sqrt(2.0)),
}

_LOG_FLOOR = 1e-6


class SchemaError(ValueError):
    """CSV does not match the curve-file schema."""


class EmptySelectionError(ValueError):
    """No lattice in the CSV matches the requested panel dimensions."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: str | Path
    panel_dims: tuple[int, ...]
    style: str  # "variance" | "gap"
    output_path: str | Path

    def __post_init__(self):
        if self.style not in ("variance", "gap"):
            raise ValueError(f"unknown style {self.style!r}")
        if not self.panel_dims:
            raise ValueError("need at least one panel dimension")


@dataclass
class Curve:
    lattice: str
    dim: int
    rate: list[float] = field(default_factory=list)
    sigma_e2: list[float] = field(default_factory=list)
    sigma_lb2: list[float] = field(default_factory=list)
    gap: list[float] = field(default_factory=list)
    stderr: list[float] = field(default_factory=list)


def read_curves(path: str | Path) -> dict[str, Curve]:
    """Parse a curve CSV into per-lattice arrays, validating the schema."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        if header != EXPECTED_HEADER:
            raise SchemaError(
                f"{path}: header {header!r} does not match {EXPECTED_HEADER!r}"
            )
        curves: dict[str, Curve] = {}
        for i, row in enumerate(reader, start=2):
            if len(row) != len(EXPECTED_HEADER):
                raise SchemaError(f"{path}:{i}: expected {len(EXPECTED_HEADER)} fields")
            try:
                name = row[0]
                dim = int(row[1])
                values = [float(v) for v in row[2:]]
            except ValueError as exc:
                raise SchemaError(f"{path}:{i}: {exc}") from None
            curve = curves.setdefault(name, Curve(lattice=name, dim=dim))
            if curve.dim != dim:
                raise SchemaError(f"{path}:{i}: lattice {name} changes dimension")
            curve.rate.append(values[0])
            curve.sigma_e2.append(values[1])
            curve.sigma_lb2.append(values[2])
            curve.gap.append(values[3])
            curve.stderr.append(values[4])
    if not curves:
        raise SchemaError(f"{path}: no data rows")
    return curves


def _panel_curves(curves: dict[str, Curve], dims: tuple[int, ...]) -> dict[int, list[Curve]]:
    panels = {d: [] for d in dims}
    for name in sorted(curves):
        c = curves[name]
        if c.dim in panels:
            panels[c.dim].append(c)
    if not any(panels.values()):
        raise EmptySelectionError(
            f"no lattice with dimension in {sorted(dims)} present in the CSV"
        )
    return panels


def _grid_shape(n: int) -> tuple[int, int]:
    if n <= 1:
        return 1, 1
    if n == 2:
        return 1, 2
    return (n + 1) // 2, 2


def build_figure(spec: FigureSpec) -> "plt.Figure":
    """Assemble the figure without writing it (separated for tests)."""
    curves = read_curves(spec.input_csv)
    panels = _panel_curves(curves, spec.panel_dims)
    shown = [d for d in spec.panel_dims if panels[d]]
    rows, cols = _grid_shape(len(shown))
    fig, axes = plt.subplots(rows, cols, figsize=(6.0 * cols, 4.5 * rows), squeeze=False)
    for ax in axes.ravel()[len(shown):]:
        ax.set_visible(False)
    for ax, d in zip(axes.ravel(), shown):
        if spec.style == "variance":
            _draw_variance_panel(ax, panels[d], d)
        else:
            _draw_gap_panel(ax, panels[d], d)
    fig.tight_layout()
    return fig


def _panel_limits(members: list[Curve]) -> tuple[float, float]:
    lows = [THRESHOLDS[c.lattice][0] for c in members if c.lattice in THRESHOLDS]
    highs = [THRESHOLDS[c.lattice][1] for c in members if c.lattice in THRESHOLDS]
    if not lows:
        rates = np.concatenate([c.rate for c in members])
        return float(rates.min()), float(rates.max())
    return min(lows) - 0.1, max(highs) + 0.1


def _draw_variance_panel(ax, members: list[Curve], dim: int) -> None:
    for c in members:
        ax.plot(c.rate, c.sigma_e2, label=c.lattice)
    ref = members[0]
    ax.plot(ref.rate, ref.sigma_lb2, "k--", linewidth=1.0, label="lower bound")
    ax.set_xlim(*_panel_limits(members))
    ax.set_ylim(0.0, 1.0)
    ax.set_xlabel("rate / bandwidth")
    ax.set_ylabel("normalized error variance")
    ax.set_title(f"d = {dim}")
    ax.legend()


def _draw_gap_panel(ax, members: list[Curve], dim: int) -> None:
    for c in members:
        gap = np.asarray(c.gap)
        floor = np.maximum(_LOG_FLOOR, 3.0 * np.asarray(c.stderr))
        line, = ax.semilogy(c.rate, np.maximum(gap, floor), label=c.lattice)
        if c.lattice in THRESHOLDS:
            low, high = THRESHOLDS[c.lattice]
            for x in (low, high):
                ax.axvline(x, color=line.get_color(), linestyle="--", linewidth=0.8)
    ax.set_xlim(*_panel_limits(members))
    ax.set_xlabel("rate / bandwidth")
    ax.set_ylabel("gap to lower bound")
    ax.set_title(f"d = {dim}")
    ax.legend()


def render(spec: FigureSpec) -> Path:
    """Build and write the figure; repeated runs are byte-identical."""
    with plt.rc_context({"svg.hashsalt": "plotgen"}):
        fig = build_figure(spec)
        out = Path(spec.output_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        metadata = {"Date": None} if out.suffix.lower() == ".svg" else None
        fig.savefig(out, metadata=metadata)
        plt.close(fig)
    return out
