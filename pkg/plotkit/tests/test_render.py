"""Structural rendering checks over the supcar-lab CSV contracts.

When the numerical toolkit's acceptance artifacts are present (produced
by its own test run), the renders consume those; otherwise synthetic
fixtures with identical schemas are used.  Checks are structural only:
file produced, nonzero size, axis ranges covering the data.
"""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from plotkit import PlotJob, render
from plotkit.render import SchemaError, read_grid_csv, read_table_csv

ACCEPT_DIR = Path(__file__).resolve().parents[2] / "acceptance_out"


def synth_grid_csv(path: Path, d: int = 2, n: int = 32, h: float = 0.25, seed: int = 5):
    rng = np.random.default_rng(seed)
    lines = [f"# supcar-lab grid d={d} n={n} h={h!r} seed={seed}"]
    ax = -0.5 * n * h + (np.arange(n) + 0.5) * h
    if d == 1:
        lines.append("x,value")
        vals = np.cumsum(rng.normal(size=n)) * 0.1
        for x, v in zip(ax, vals):
            lines.append(f"{x:.17g},{v:.17g}")
    else:
        lines.append("x,y,value")
        vals = rng.normal(size=(n, n))
        for i in range(n):
            for j in range(n):
                lines.append(f"{ax[i]:.17g},{ax[j]:.17g},{vals[i, j]:.17g}")
    path.write_text("\n".join(lines) + "\n")
    return path


def synth_covariance_tables(tmp: Path):
    lags = np.linspace(0.0, 4.0, 17)
    analytic = tmp / "analytic.csv"
    with analytic.open("w") as fh:
        fh.write("lag,value,est_error\n")
        for lag in lags:
            fh.write(f"{lag},{math.exp(-lag) * 0.25},{1e-10}\n")
    empirical = tmp / "empirical.csv"
    rng = np.random.default_rng(3)
    with empirical.open("w") as fh:
        fh.write("lag,estimate,se\n")
        for lag in lags[::2]:
            v = math.exp(-lag) * 0.25
            fh.write(f"{lag},{v * (1 + 0.05 * rng.normal())},{0.05 * v + 1e-4}\n")
    return analytic, empirical


def synth_scaling_table(tmp: Path):
    path = tmp / "scaling.csv"
    with path.open("w") as fh:
        fh.write("T,variance\n")
        for T in (64.0, 128.0, 256.0, 512.0):
            fh.write(f"{T},{0.37 * T ** 1.02}\n")
    return path


def grid_input(tmp: Path) -> Path:
    real = ACCEPT_DIR / "crit6_supcar_d2_grid.csv"
    return real if real.exists() else synth_grid_csv(tmp / "grid.csv")


def covariance_inputs(tmp: Path):
    a = ACCEPT_DIR / "crit6_car_covariance_analytic.csv"
    e = ACCEPT_DIR / "crit6_car_covariance_empirical.csv"
    if a.exists() and e.exists():
        return a, e
    return synth_covariance_tables(tmp)


def scaling_input(tmp: Path) -> Path:
    real = ACCEPT_DIR / "crit7_variance_scaling.csv"
    return real if real.exists() else synth_scaling_table(tmp)


class TestRenderKinds:
    def test_heatmap_d2(self, tmp_path):
        src = grid_input(tmp_path)
        out = render(PlotJob("heatmap", (str(src),), str(tmp_path / "heat.png"), "field"))
        assert out.exists() and out.stat().st_size > 1000

    def test_line_plot_d1(self, tmp_path):
        src = synth_grid_csv(tmp_path / "g1.csv", d=1, n=256, h=0.1)
        out = render(PlotJob("heatmap", (str(src),), str(tmp_path / "line.png")))
        assert out.exists() and out.stat().st_size > 1000

    def test_covariance_overlay(self, tmp_path):
        a, e = covariance_inputs(tmp_path)
        out = render(
            PlotJob(
                "covariance_overlay",
                (str(a), str(e)),
                str(tmp_path / "overlay.png"),
                "covariance",
            )
        )
        assert out.exists() and out.stat().st_size > 1000

    def test_scaling_fit(self, tmp_path):
        src = scaling_input(tmp_path)
        out = render(PlotJob("scaling_fit", (str(src),), str(tmp_path / "fit.png")))
        assert out.exists() and out.stat().st_size > 1000


class TestAxisRanges:
    def test_heatmap_extent_matches_grid(self, tmp_path):
        import matplotlib.pyplot as plt
        from plotkit.render import _render_heatmap

        src = grid_input(tmp_path)
        d, n, h, _ = read_grid_csv(src)
        fig, ax = plt.subplots()
        try:
            _render_heatmap(PlotJob("heatmap", (str(src),), "unused.png"), ax)
            lo, hi = ax.get_xlim()
            assert lo <= -0.5 * n * h + h and hi >= 0.5 * n * h - h
        finally:
            plt.close(fig)

    def test_overlay_covers_data_range(self, tmp_path):
        import matplotlib.pyplot as plt
        from plotkit.render import _render_covariance_overlay

        a, e = covariance_inputs(tmp_path)
        emp = read_table_csv(e, 3)
        fig, ax = plt.subplots()
        try:
            _render_covariance_overlay(
                PlotJob("covariance_overlay", (str(a), str(e)), "unused.png"), ax
            )
            lo, hi = ax.get_xlim()
            assert lo <= emp[:, 0].min() and hi >= emp[:, 0].max()
        finally:
            plt.close(fig)


class TestSchemaRejection:
    def test_empty_csv_rejected(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(SchemaError):
            render(PlotJob("scaling_fit", (str(p),), str(tmp_path / "x.png")))

    def test_foreign_grid_rejected(self, tmp_path):
        p = tmp_path / "foreign.csv"
        p.write_text("x,value\n0,1\n")
        with pytest.raises(SchemaError):
            render(PlotJob("heatmap", (str(p),), str(tmp_path / "x.png")))

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            PlotJob("pie", ("a.csv",), "x.png")

    def test_missing_input_rejected(self, tmp_path):
        with pytest.raises(SchemaError):
            render(PlotJob("heatmap", (str(tmp_path / "nope.csv"),), str(tmp_path / "x.png")))

    def test_inputs_never_modified(self, tmp_path):
        src = synth_grid_csv(tmp_path / "g.csv")
        before = src.read_bytes()
        render(PlotJob("heatmap", (str(src),), str(tmp_path / "h.png")))
        assert src.read_bytes() == before


class TestCli:
    def test_render_via_job_file(self, tmp_path):
        from plotkit.cli import main

        src = synth_grid_csv(tmp_path / "g.csv")
        job = tmp_path / "job.json"
        job.write_text(
            json.dumps(
                {
                    "kind": "heatmap",
                    "inputs": [str(src)],
                    "output": str(tmp_path / "out.png"),
                    "title": "demo",
                }
            )
        )
        assert main(["render", "--job", str(job)]) == 0
        assert (tmp_path / "out.png").exists()

    def test_bad_job_nonzero_exit(self, tmp_path):
        from plotkit.cli import main

        job = tmp_path / "job.json"
        job.write_text(json.dumps({"kind": "heatmap", "inputs": [str(tmp_path / "no.csv")],
                                   "output": str(tmp_path / "o.png")}))
        assert main(["render", "--job", str(job)]) == 1
