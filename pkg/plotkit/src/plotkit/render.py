"""Rendering jobs over the supcar-lab CSV contracts.

Three figure kinds: field heatmaps / line plots from grid CSVs,
covariance overlays (analytic curve over empirical points with error
bars), and log-log scaling fits with the slope annotated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

KINDS = ("heatmap", "covariance_overlay", "scaling_fit")


class SchemaError(ValueError):
    """Input file does not follow the expected CSV contract."""


@dataclass(frozen=True)
class PlotJob:
    kind: str
    inputs: tuple[str, ...]
    output: str
    title: str = ""
    labels: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise SchemaError(f"unknown plot kind {self.kind!r}; choose from {KINDS}")
        if not self.inputs:
            raise SchemaError("job needs at least one input CSV")

    @staticmethod
    def from_json(path: str | Path) -> "PlotJob":
        payload = json.loads(Path(path).read_text())
        try:
            return PlotJob(
                kind=payload["kind"],
                inputs=tuple(payload["inputs"]),
                output=payload["output"],
                title=payload.get("title", ""),
                labels=payload.get("labels", {}),
            )
        except KeyError as exc:
            raise SchemaError(f"job file missing key {exc}") from exc


def read_grid_csv(path: str | Path):
    """Parse the `# supcar-lab grid` CSV contract -> (d, n, h, values)."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input not found: {path}")
    with path.open() as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith("# supcar-lab grid "):
            raise SchemaError(f"{path}: not a supcar-lab grid file")
        fields = dict(tok.split("=", 1) for tok in header[2:].split()[2:])
        d, n, h = int(fields["d"]), int(fields["n"]), float(fields["h"])
        cols = fh.readline().strip()
        expected = "x,value" if d == 1 else "x,y,value"
        if cols != expected:
            raise SchemaError(f"{path}: expected columns {expected!r}, got {cols!r}")
        data = np.loadtxt(fh, delimiter=",")
    if data.size == 0:
        raise SchemaError(f"{path}: no rows")
    values = data[:, -1]
    if values.size != n**d:
        raise SchemaError(f"{path}: expected {n ** d} rows, found {values.size}")
    if d == 2:
        values = values.reshape(n, n)
    return d, n, h, values


def read_table_csv(path: str | Path, min_cols: int) -> np.ndarray:
    """Numeric table with a single header line and comma separation."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input not found: {path}")
    lines = path.read_text().strip().splitlines()
    if len(lines) < 2:
        raise SchemaError(f"{path}: empty table")
    body = [ln for ln in lines[1:] if ln.strip()]
    try:
        data = np.array([[float(tok) for tok in ln.split(",")] for ln in body])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric row ({exc})") from exc
    if data.ndim != 2 or data.shape[1] < min_cols:
        raise SchemaError(f"{path}: expected at least {min_cols} columns")
    return data


def _render_heatmap(job: PlotJob, ax) -> None:
    d, n, h, values = read_grid_csv(job.inputs[0])
    extent = n * h / 2.0
    if d == 2:
        im = ax.imshow(
            values.T,
            origin="lower",
            extent=(-extent, extent, -extent, extent),
            cmap=job.labels.get("cmap", "viridis"),
        )
        ax.figure.colorbar(im, ax=ax, shrink=0.85)
        ax.set_ylabel(job.labels.get("y", "y"))
    else:
        x = -extent + (np.arange(n) + 0.5) * h
        ax.plot(x, values, lw=0.7, color="#1f4e79")
    ax.set_xlabel(job.labels.get("x", "x"))


def _render_covariance_overlay(job: PlotJob, ax) -> None:
    if len(job.inputs) < 2:
        raise SchemaError("covariance_overlay needs [analytic_csv, empirical_csv]")
    analytic = read_table_csv(job.inputs[0], 2)
    empirical = read_table_csv(job.inputs[1], 3)
    order = np.argsort(analytic[:, 0])
    ax.plot(
        analytic[order, 0],
        analytic[order, 1],
        "-",
        color="#902020",
        label=job.labels.get("analytic", "analytic"),
    )
    ax.errorbar(
        empirical[:, 0],
        empirical[:, 1],
        yerr=empirical[:, 2],
        fmt="o",
        ms=4,
        capsize=3,
        color="#1f4e79",
        label=job.labels.get("empirical", "empirical"),
    )
    ax.set_xlabel(job.labels.get("x", "lag"))
    ax.set_ylabel(job.labels.get("y", "covariance"))
    ax.legend()


def _render_scaling_fit(job: PlotJob, ax) -> None:
    data = read_table_csv(job.inputs[0], 2)
    x, y = data[:, 0], data[:, 1]
    if np.any(x <= 0) or np.any(y <= 0):
        raise SchemaError("scaling_fit needs positive x and y for the log-log fit")
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    ax.loglog(x, y, "o", ms=6, color="#1f4e79")
    xs = np.geomspace(x.min(), x.max(), 50)
    ax.loglog(xs, np.exp(intercept) * xs**slope, "-", color="#902020")
    ax.annotate(
        f"slope = {slope:.3f}",
        xy=(0.05, 0.9),
        xycoords="axes fraction",
        fontsize=11,
    )
    ax.set_xlabel(job.labels.get("x", "T"))
    ax.set_ylabel(job.labels.get("y", "statistic"))


def render(job: PlotJob) -> Path:
    """Render one job; returns the output path.

    Inputs are never modified; output is deterministic up to the
    rasterizer.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.2), dpi=120)
    try:
        if job.kind == "heatmap":
            _render_heatmap(job, ax)
        elif job.kind == "covariance_overlay":
            _render_covariance_overlay(job, ax)
        else:
            _render_scaling_fit(job, ax)
        if job.title:
            ax.set_title(job.title)
        out = Path(job.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.tight_layout()
        fig.savefig(out)
    finally:
        plt.close(fig)
    if not out.exists() or out.stat().st_size == 0:
        raise RuntimeError(f"rendering produced no file at {out}")
    return out
