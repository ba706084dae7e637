"""Command-line front end: configuration, orchestration, and file I/O.

JSON configs in, CSV numbers out; every run writes a manifest with the
config digest and seed so results can be reproduced bit for bit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytics, levy, limitlab, mixing, regime, simulate, specfun
from .levy import CharacteristicQuadruple
from .windows import WindowSpec


class ConfigError(ValueError):
    """Configuration file errors: reported with exit code 2."""


# ---------------------------------------------------------------------------
# config parsing


def _require(d: dict, key: str, ctx: str):
    if key not in d:
        raise ConfigError(f"missing key {key!r} in {ctx}")
    return d[key]


def parse_levy(cfg: dict | None) -> levy.LevyMeasure | None:
    if cfg is None:
        return None
    family = _require(cfg, "family", "levy")
    try:
        if family == "gamma_subordinator":
            return levy.GammaSubordinator(float(cfg["shape"]), float(cfg["rate"]))
        if family == "inverse_gaussian":
            return levy.InverseGaussian(float(cfg["alpha"]), float(cfg["mu"]))
        if family == "tempered_stable":
            return levy.TemperedStable(
                float(cfg["beta"]),
                float(cfg["theta"]),
                float(cfg.get("c_plus", 1.0)),
                float(cfg.get("c_minus", 0.0)),
            )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad levy spec: {exc}") from exc
    raise ConfigError(f"unknown levy family {family!r}")


def parse_mixing(cfg: dict) -> mixing.MixingMeasure:
    family = _require(cfg, "family", "mixing")
    try:
        if family == "gamma_mix":
            return mixing.GammaMix(float(cfg["H"]))
        if family == "reg_var":
            sv = cfg.get("sv", {"kind": "constant", "C": 1.0})
            svs = mixing.SlowlyVarying(sv["kind"], float(sv.get("C", 1.0)), int(sv.get("k", 1)))
            return mixing.RegVar(float(cfg["alpha"]), svs, float(cfg.get("lambda_max", 1.0)))
        if family == "point_mass":
            return mixing.PointMass(float(cfg["lam0"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad mixing spec: {exc}") from exc
    raise ConfigError(f"unknown mixing family {family!r}")


def parse_quadruple(cfg: dict) -> CharacteristicQuadruple:
    try:
        return CharacteristicQuadruple(
            b=float(cfg.get("b", 0.0)),
            levy=parse_levy(cfg.get("levy")),
            mix=parse_mixing(_require(cfg, "mixing", "quadruple")),
            d=int(cfg.get("d", 1)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_window(cfg: dict | None) -> WindowSpec:
    cfg = cfg or {}
    try:
        return WindowSpec(cfg.get("shape", "cube"), float(cfg.get("scale", 1.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_simconfig(cfg: dict) -> simulate.SimulationConfig:
    try:
        return simulate.SimulationConfig(
            n=int(_require(cfg, "n", "simulation")),
            h=float(_require(cfg, "h", "simulation")),
            lambda_bins=int(cfg.get("lambda_bins", 32)),
            lambda_min=float(cfg.get("lambda_min", 0.05)),
            kernel_q=float(cfg.get("kernel_q", 30.0)),
            pad_factor=int(cfg.get("pad_factor", 2)),
            ts_eps=cfg.get("ts_eps"),
            binning=cfg.get("binning", "quantile"),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad simulation config: {exc}") from exc


def load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        cfg = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    schema_path = Path(__file__).resolve().parents[2] / "docs" / "config-schema.json"
    if not schema_path.exists():
        schema_path = Path(__file__).resolve().parent / "config-schema.json"
    try:
        import jsonschema

        jsonschema.validate(cfg, json.loads(schema_path.read_text()))
    except ImportError:
        pass
    except Exception as exc:  # noqa: BLE001 - schema violations become config errors
        raise ConfigError(f"config failed schema validation: {exc}") from exc
    if "seed" not in cfg:
        raise ConfigError("config must carry an explicit seed (no wall-clock seeding)")
    return cfg


def config_digest(cfg: dict) -> str:
    return hashlib.sha256(json.dumps(cfg, sort_keys=True).encode()).hexdigest()


def write_manifest(out_dir: Path, cfg: dict, outputs: list[str]) -> None:
    manifest = {
        "artifact_version": __version__,
        "config_digest": config_digest(cfg),
        "seed": cfg.get("seed"),
        "config": cfg,
        "outputs": sorted(outputs),
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


# ---------------------------------------------------------------------------
# grid CSV round trip


def write_grid_csv(grid: simulate.FieldGrid, path: str | Path) -> None:
    """Grid values with full-precision decimal round trip."""
    path = Path(path)
    seed = grid.provenance.get("seed")
    lines = [f"# supcar-lab grid d={grid.d} n={grid.n} h={grid.h!r} seed={seed}"]
    ax = grid.axis()
    if grid.d == 1:
        lines.append("x,value")
        for x, v in zip(ax, grid.values):
            lines.append(f"{x:.17g},{v:.17g}")
    else:
        lines.append("x,y,value")
        for i in range(grid.n):
            for j in range(grid.n):
                lines.append(f"{ax[i]:.17g},{ax[j]:.17g},{grid.values[i, j]:.17g}")
    path.write_text("\n".join(lines) + "\n")


def read_grid_csv(path: str | Path) -> simulate.FieldGrid:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().rstrip("\n")
        if not header.startswith("# supcar-lab grid "):
            raise ValueError(f"{path}:1: not a supcar-lab grid file")
        fields = dict(tok.split("=", 1) for tok in header[2:].split()[2:])
        try:
            d = int(fields["d"])
            n = int(fields["n"])
            h = float(fields["h"])
            seed = None if fields.get("seed") == "None" else int(fields["seed"])
        except (KeyError, ValueError) as exc:
            raise ValueError(f"{path}:1: malformed grid header: {exc}") from exc
        cols = fh.readline().strip()
        expect_cols = "x,value" if d == 1 else "x,y,value"
        if cols != expect_cols:
            raise ValueError(f"{path}:2: expected columns {expect_cols!r}, got {cols!r}")
        values = np.empty(n if d == 1 else (n, n))
        count = 0
        for lineno, line in enumerate(fh, start=3):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != (2 if d == 1 else 3):
                raise ValueError(f"{path}:{lineno}: bad row")
            if d == 1:
                values[count] = float(parts[1])
            else:
                values[count // n, count % n] = float(parts[2])
            count += 1
        if count != n**d:
            raise ValueError(f"{path}: expected {n**d} rows, found {count}")
    origin = -0.5 * n * h
    return simulate.FieldGrid(d, n, h, origin, values, {"seed": seed, "kind": "from-csv"})


# ---------------------------------------------------------------------------
# subcommands


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _apply_overrides(cfg: dict, args) -> dict:
    if getattr(args, "seed", None) is not None:
        cfg = {**cfg, "seed": args.seed}
    return cfg


def cmd_classify(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    rep = regime.limit_regime(q, existence_route=args.route)
    out = _out_dir(args)
    payload = {
        "exists": rep.exists,
        "existence_criterion": rep.existence_criterion,
        "dependence": rep.dependence,
        "limit": rep.limit,
        "diagnostics": {k: repr(v) for k, v in rep.diagnostics.items()},
    }
    path = out / "classification.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    write_manifest(out, cfg, [path.name])
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.strict and rep.exists == "undetermined":
        return 3
    return 0


def cmd_check_existence(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    verdict, diag = regime.check_existence(q)
    i0, i1, igauss = regime.check_rajput_rosinski(q)
    payload = {
        "exists": verdict,
        "rajput_rosinski": {"I0": i0, "I1": i1, "I_gauss": igauss},
        "diagnostics": {k: repr(v) for k, v in diag.items()},
    }
    out = _out_dir(args)
    path = out / "existence.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))
    write_manifest(out, cfg, [path.name])
    print(json.dumps(payload, indent=2, sort_keys=True))
    if args.strict and (verdict == "undetermined" or any(math.isinf(v) for v in (i0, i1, igauss))):
        return 3
    return 0


def _parse_float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad numeric list {text!r}") from exc


def cmd_covariance(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    lags = _parse_float_list(args.lags)
    out = _out_dir(args)
    rows = ["lag,value,est_error"]
    diverged = False
    for lag in lags:
        val, err = analytics.supcar_covariance_with_error(lag, q)
        diverged = diverged or math.isinf(val)
        rows.append(f"{lag:.17g},{val:.17g},{err:.3g}")
    path = out / "covariance.csv"
    path.write_text("\n".join(rows) + "\n")
    write_manifest(out, cfg, [path.name])
    print("\n".join(rows))
    return 3 if (args.strict and diverged) else 0


def cmd_spectral(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    freqs = _parse_float_list(args.frequencies)
    out = _out_dir(args)
    rows = ["frequency,value,est_error"]
    diverged = False
    for w in freqs:
        val, err = analytics.supcar_spectral_with_error(w, q)
        diverged = diverged or math.isinf(val)
        rows.append(f"{w:.17g},{val:.17g},{err:.3g}")
    path = out / "spectral.csv"
    path.write_text("\n".join(rows) + "\n")
    write_manifest(out, cfg, [path.name])
    print("\n".join(rows))
    return 3 if (args.strict and diverged) else 0


def cmd_constants(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    window = parse_window(cfg.get("window"))
    mc = analytics.limit_constants(q, window)
    mean, var = analytics.supcar_moments(q)
    payload = {
        "d": mc.d,
        "window_volume": mc.window_volume,
        "c1": mc.c1,
        "c2": mc.c2,
        "c3": mc.c3,
        "c4": mc.c4,
        "c5": mc.c5,
        "c6": mc.c6,
        "c7": mc.c7,
        "c_plus": mc.c_plus,
        "c_minus": mc.c_minus,
        "field_mean": mean,
        "field_variance": var,
        "base_variance": levy.base_variance(q),
    }
    out = _out_dir(args)
    path = out / "constants.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str))
    write_manifest(out, cfg, [path.name])
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))
    if args.strict and any(isinstance(v, float) and math.isinf(v) for v in payload.values()):
        return 3
    return 0


def cmd_simulate_car(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    sim = parse_simconfig(_require(cfg, "simulation", "config"))
    lam = float(_require(cfg, "lam", "config (rate for the single-rate field)"))
    seed = int(cfg["seed"])
    out = _out_dir(args)
    outputs = []
    reps = int(cfg.get("replicates", 1))
    from .rngstreams import stream

    for r in range(reps):
        grid = simulate.simulate_car(lam, q.b, q.levy, sim, stream(seed, r), d=q.d)
        grid.provenance["seed"] = seed
        name = f"car_{r:04d}.csv" if reps > 1 else "car.csv"
        write_grid_csv(grid, out / name)
        outputs.append(name)
    write_manifest(out, cfg, outputs)
    print(f"wrote {len(outputs)} grid file(s) to {out}")
    return 0


def cmd_simulate_supcar(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    sim = parse_simconfig(_require(cfg, "simulation", "config"))
    seed = int(cfg["seed"])
    verdict, _ = regime._exists_shortcut(q)
    if verdict == "no":
        raise ConfigError("quadruple fails the existence conditions")
    out = _out_dir(args)
    outputs = []
    reps = int(cfg.get("replicates", 1))
    grids = simulate.simulate_ensemble(q, sim, reps, seed, workers=args.threads)
    for r, grid in enumerate(grids):
        name = f"supcar_{r:04d}.csv" if reps > 1 else "supcar.csv"
        write_grid_csv(grid, out / name)
        outputs.append(name)
    write_manifest(out, cfg, outputs)
    print(f"wrote {len(outputs)} grid file(s) to {out}")
    return 0


def cmd_limit_experiment(args) -> int:
    cfg = _apply_overrides(load_config(args.config), args)
    q = parse_quadruple(_require(cfg, "quadruple", "config"))
    window = parse_window(cfg.get("window"))
    exp = cfg.get("experiment", {})
    seed = int(cfg["seed"])
    rep0 = regime.limit_regime(q)
    try:
        plan = limitlab.default_plan(
            q.d,
            rep0.limit,
            t_grid=tuple(exp["t_grid"]) if "t_grid" in exp else None,
            T_ladder=tuple(exp["T_ladder"]) if "T_ladder" in exp else None,
            replicates=(
                tuple(exp["replicates"])
                if isinstance(exp.get("replicates"), list)
                else exp.get("replicates")
            ),
            n=exp.get("n"),
            lambda_bins=exp.get("lambda_bins", 48),
            kernel_q=exp.get("kernel_q", 30.0),
            radius_budget_cells=exp.get("radius_budget_cells"),
            ts_eps=exp.get("ts_eps"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    report = limitlab.run_limit_experiment(q, window, seed, plan, workers=args.threads)
    out = _out_dir(args)

    sample_rows = ["t,T,replicate,z"]
    for i_t, T in enumerate(report.T_ladder):
        z = report.normalized[i_t]
        for r in range(z.shape[0]):
            for j, t in enumerate(report.t_grid):
                sample_rows.append(f"{t:.17g},{T:.17g},{r},{z[r, j]:.17g}")
    (out / "samples.csv").write_text("\n".join(sample_rows) + "\n")

    payload = {
        "regime": report.regime,
        "t_grid": list(report.t_grid),
        "T_ladder": list(report.T_ladder),
        "replicates": list(report.replicates),
        "normalizers": report.normalizers,
        "stats": report.stats,
        "diagnostics": {
            "rung_lambda_min": report.diagnostics["rung_lambda_min"],
            "rung_binning_bias": report.diagnostics["rung_binning_bias"],
        },
    }
    (out / "report.json").write_text(json.dumps(payload, indent=2, sort_keys=True, default=repr))
    write_manifest(out, cfg, ["report.json", "samples.csv"])
    print(json.dumps(payload["stats"], indent=2, sort_keys=True, default=repr))
    return 0


_PROBE_FUNCS = {
    "bessel_k": (specfun.bessel_k_result, 1),
    "gamma_fn": (specfun.gamma_fn_result, 0),
    "incomplete_gamma_upper": (specfun.incomplete_gamma_upper_result, 1),
    "incomplete_gamma_lower": (specfun.incomplete_gamma_lower_result, 1),
    "hyp2f1": (specfun.hyp2f1_result, 3),
}


def cmd_specfun_probe(args) -> int:
    if args.function not in _PROBE_FUNCS:
        raise ConfigError(
            f"unknown function {args.function!r}; choose from {sorted(_PROBE_FUNCS)}"
        )
    fn, n_fixed = _PROBE_FUNCS[args.function]
    fixed = _parse_float_list(args.fixed) if args.fixed else []
    if len(fixed) != n_fixed:
        raise ConfigError(f"{args.function} needs {n_fixed} fixed parameter(s)")
    if args.log:
        grid = np.geomspace(args.min, args.max, args.num)
    else:
        grid = np.linspace(args.min, args.max, args.num)
    rows = ["x,value,est_error"]
    for x in grid:
        res = fn(*fixed, float(x))
        rows.append(f"{x:.17g},{res.value:.17g},{res.est_abs_error:.3g}")
    text = "\n".join(rows) + "\n"
    if args.out:
        out = _out_dir(args)
        (out / "specfun.csv").write_text(text)
    print(text, end="")
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="supcar-lab",
        description="Superposed continuous-autoregressive random fields: "
        "analytics, simulation, and limit-theorem experiments.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON experiment config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--threads", type=int, default=1, help="worker pool size")
        p.add_argument(
            "--strict",
            action="store_true",
            help="exit 3 on numerical-divergence verdicts",
        )

    p = sub.add_parser("classify", help="regime classification report")
    common(p)
    p.add_argument("--route", choices=["shortcut", "quadrature"], default="quadrature")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("check-existence", help="existence + Rajput-Rosinski integrals")
    common(p)
    p.set_defaults(func=cmd_check_existence)

    p = sub.add_parser("covariance", help="covariance curve CSV")
    common(p)
    p.add_argument("--lags", required=True, help="comma-separated lags")
    p.set_defaults(func=cmd_covariance)

    p = sub.add_parser("spectral", help="spectral density CSV")
    common(p)
    p.add_argument("--frequencies", required=True, help="comma-separated frequencies")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("constants", help="limit-constant report")
    common(p)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("simulate-car", help="single-rate field grid(s)")
    common(p)
    p.set_defaults(func=cmd_simulate_car)

    p = sub.add_parser("simulate-supcar", help="superposed field grid(s)")
    common(p)
    p.set_defaults(func=cmd_simulate_supcar)

    p = sub.add_parser("limit-experiment", help="Monte Carlo limit-theorem check")
    common(p)
    p.set_defaults(func=cmd_limit_experiment)

    p = sub.add_parser("specfun-probe", help="special-function regression CSV")
    p.add_argument("--function", required=True)
    p.add_argument("--fixed", default="", help="comma-separated leading arguments")
    p.add_argument("--min", type=float, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--num", type=int, default=50)
    p.add_argument("--log", action="store_true")
    p.add_argument("--out", default=None)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_specfun_probe)

    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
