"""Figure rendering from solver CSV outputs.

Four plot kinds, each tied to one documented CSV interface:

    phase       trajectory files (step,t,y1,...) -> y2 against y1
    strobe      strobed samples (f,k,x,y) -> scatter colored per f
    runtime     timing tables (n_steps,workers,mode,...) -> seconds vs N
                per worker count
    divergence  dual-precision reports (step,t,divergence,cumulative_max)
                -> running max vs step on a log axis

Inputs are validated before any figure state exists, so a bad file never
leaves a partial image behind.  Rendering is read-only and deterministic:
fixed input and spec give byte-identical output.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import HeaderMismatchError, PlotError

__all__ = ["KINDS", "PlotSpec", "render"]

KINDS = ("phase", "strobe", "runtime", "divergence")

_FIXED_HEADERS = {
    "strobe": ("f", "k", "x", "y"),
    "runtime": ("n_steps", "workers", "mode", "seconds_median",
                "seconds_min", "repeats"),
    "divergence": ("step", "t", "divergence", "cumulative_max"),
}

_DEFAULT_LABELS = {
    "phase": ("y1", "y2"),
    "strobe": ("x", "y"),
    "runtime": ("N (steps)", "wall time (s)"),
    "divergence": ("step", "cumulative max divergence"),
}


@dataclass(frozen=True)
class PlotSpec:
    """One figure: input CSV file(s), the kind, axis labels, output path."""

    kind: str
    inputs: tuple[str, ...]
    out: str
    xlabel: str | None = None
    ylabel: str | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown plot kind {self.kind!r}; choose from {KINDS}")
        object.__setattr__(self, "inputs", tuple(str(p) for p in self.inputs))
        if not self.inputs:
            raise PlotError("at least one input CSV is required")


def _read_table(path: str, kind: str):
    """Header-checked read of one CSV; returns (columns, structured rows)."""
    try:
        with open(path, newline="") as fh:
            header = next(csv.reader(fh), None)
    except OSError as exc:
        raise PlotError(f"cannot read {path}: {exc}") from exc
    if header is None:
        raise PlotError(f"{path}: file is empty, expected a header row")
    header = tuple(name.strip() for name in header)
    if kind == "phase":
        state_names = tuple(f"y{i}" for i in range(1, max(len(header) - 2, 0) + 1))
        expected = ("step", "t") + state_names[: len(header) - 2]
        if header[:2] != ("step", "t") or header != expected or len(header) < 4:
            wanted = ("step", "t", "y1", "y2", "...")
            missing = [c for c in ("step", "t", "y1", "y2") if c not in header]
            unexpected = [c for c in header if c not in expected]
            raise HeaderMismatchError(
                f"{path}: phase input must carry columns {', '.join(wanted)}; "
                f"missing: {missing or 'none'}; unexpected: {unexpected or 'none'}; "
                f"found: {', '.join(header)}",
                missing=missing,
                unexpected=unexpected,
            )
    else:
        expected = _FIXED_HEADERS[kind]
        if header != expected:
            missing = [c for c in expected if c not in header]
            unexpected = [c for c in header if c not in expected]
            raise HeaderMismatchError(
                f"{path}: {kind} input must carry columns {', '.join(expected)}; "
                f"missing: {missing or 'none'}; unexpected: {unexpected or 'none'}; "
                f"found: {', '.join(header)}",
                missing=missing,
                unexpected=unexpected,
            )
    data = np.genfromtxt(path, delimiter=",", names=True, dtype=None,
                         encoding="utf-8")
    if data.size == 0:
        raise PlotError(f"{path}: no data rows below the header")
    return header, np.atleast_1d(data)


def _stem(path: str) -> str:
    return Path(path).stem


def _draw_phase(ax, tables):
    for path, (header, data) in tables:
        ax.plot(data["y1"], data["y2"], lw=0.6, label=_stem(path))
    if len(tables) > 1:
        ax.legend(fontsize=8)


def _draw_strobe(ax, tables):
    f_all = np.concatenate([data["f"] for _, (_, data) in tables])
    x_all = np.concatenate([data["x"] for _, (_, data) in tables])
    y_all = np.concatenate([data["y"] for _, (_, data) in tables])
    levels = np.unique(f_all)
    cmap = plt.get_cmap("viridis")
    for i, f in enumerate(levels):
        pick = f_all == f
        shade = cmap(0.5) if len(levels) == 1 else cmap(i / (len(levels) - 1))
        ax.scatter(x_all[pick], y_all[pick], s=6, color=shade, label=f"f={f:g}")
    if len(levels) > 1:
        ax.legend(fontsize=8, markerscale=2)


def _draw_runtime(ax, tables):
    rows = np.concatenate([data for _, (_, data) in tables])
    modes = np.unique(rows["mode"])
    for workers in np.unique(rows["workers"]):
        for mode in modes:
            pick = (rows["workers"] == workers) & (rows["mode"] == mode)
            if not np.any(pick):
                continue
            order = np.argsort(rows["n_steps"][pick])
            label = f"{workers} worker{'s' if workers != 1 else ''}"
            if len(modes) > 1:
                label += f" ({mode})"
            ax.plot(rows["n_steps"][pick][order],
                    rows["seconds_median"][pick][order],
                    marker="o", ms=4, label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.legend(fontsize=8)


def _draw_divergence(ax, tables):
    positive_seen = False
    for path, (header, data) in tables:
        ax.plot(data["step"], data["cumulative_max"], lw=1.0, label=_stem(path))
        positive_seen = positive_seen or bool(np.any(data["cumulative_max"] > 0))
    # an all-zero report (identical widths) has no log-scale image
    if positive_seen:
        ax.set_yscale("log")
    if len(tables) > 1:
        ax.legend(fontsize=8)


_DRAW = {
    "phase": _draw_phase,
    "strobe": _draw_strobe,
    "runtime": _draw_runtime,
    "divergence": _draw_divergence,
}


def render(spec: PlotSpec) -> str:
    """Validate every input, draw the figure, write spec.out.

    Returns the output path.  All inputs are read and checked first; any
    header mismatch or empty file aborts before the output is touched.

    Raises:
        HeaderMismatchError: a CSV header differs from the documented
            interface (message names the offending columns).
        PlotError: unreadable input, no data rows, unknown kind.
    """
    tables = [(path, _read_table(path, spec.kind)) for path in spec.inputs]
    fig, ax = plt.subplots(figsize=(6.4, 4.8), dpi=150)
    try:
        _DRAW[spec.kind](ax, tables)
        xlabel, ylabel = _DEFAULT_LABELS[spec.kind]
        ax.set_xlabel(spec.xlabel if spec.xlabel is not None else xlabel)
        ax.set_ylabel(spec.ylabel if spec.ylabel is not None else ylabel)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        # strip writer metadata so identical inputs give identical bytes
        fig.savefig(spec.out, metadata={"Software": None})
    finally:
        plt.close(fig)
    return spec.out
