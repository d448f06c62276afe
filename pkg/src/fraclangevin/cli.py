"""Command-line front end: reproducible simulation and estimation runs.

Commands emit plain CSV (header row, first column t, shortest
round-trip float formatting) so estimates can re-consume simulator
output losslessly.  Every simulation command requires an explicit seed;
there is no silent entropy anywhere.  Parameters may be preloaded from
a JSON config file (``--config``); values given on the command line win
over the file.
"""
from __future__ import annotations

import csv
import json
import math
import sys

import click
import numpy as np

from .core import NoiseStream, Path, TimeGrid, uniform_grid
from .fractional import (DegenerateDenominatorError, FractionalConfig,
                         estimate_ah, fractional_velocity,
                         residual_refinement_study)
from .hurst import DegenerateSeriesError, estimate_hurst
from .kernels import (Regime, make_kernel_spec, verify_covariance_identity,
                      weight_matrix)
from .langevin import LangevinParams, simulate_ou_exact
from .fbm import sample_fbm_exact, sample_fbm_kernel
from .noise import (StepDistribution, StepKind, donsker_path,
                    gaussian_increments, quadratic_variation)

__all__ = ["main"]


# ---------------------------------------------------------------------------
# option plumbing
# ---------------------------------------------------------------------------


def _load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.ClickException(f"cannot read config {path}: {exc}")
    if not isinstance(cfg, dict):
        raise click.ClickException(f"config {path} must hold a JSON object")
    return cfg


def _merged(ctx, config_path):
    """Parameter values with config-file fallback (flags override file)."""
    cfg = _load_config(config_path) if config_path else {}
    params = dict(ctx.params)
    by_name = {p.name: p for p in ctx.command.params}
    for name, value in cfg.items():
        key = name.replace("-", "_")
        if key not in by_name or key == "config":
            raise click.ClickException(f"unknown config key {name!r}")
        src = ctx.get_parameter_source(key)
        if src is not None and src.name == "COMMANDLINE":
            continue
        params[key] = by_name[key].type.convert(value, by_name[key], ctx)
    return params


def _require_seed(params):
    if params.get("seed") is None:
        raise click.UsageError(
            "--seed is required for simulation commands (flag or config file)")
    seed = int(params["seed"])
    if not 0 <= seed < 2**64:
        raise click.BadParameter("seed must fit in an unsigned 64-bit integer",
                                 param_hint="--seed")
    return seed


def _check_hurst(hurst):
    if hurst is None:
        raise click.UsageError("--hurst is required (flag or config file)")
    if not 0.0 < hurst < 1.0:
        raise click.BadParameter(
            f"Hurst index must lie in the open interval (0, 1); got {hurst}",
            param_hint="--hurst")
    return float(hurst)


def _build_params(p):
    try:
        return LangevinParams(mass=p["mass"], friction=p["friction"],
                              sigma=p["sigma"], v0=p["v0"])
    except ValueError as exc:
        raise click.BadParameter(str(exc))


def _write_csv(path, header, columns):
    rows = zip(*columns)
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([repr(float(x)) for x in row])
    except OSError as exc:
        raise click.ClickException(f"cannot write {path}: {exc}")


def _read_csv(path):
    """Header plus float columns; parse errors carry the line number."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise click.ClickException(f"{path}: file is empty")
            columns = [[] for _ in header]
            for lineno, row in enumerate(reader, start=2):
                if len(row) != len(header):
                    raise click.ClickException(
                        f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
                for i, field in enumerate(row):
                    try:
                        columns[i].append(float(field))
                    except ValueError:
                        raise click.ClickException(
                            f"{path}:{lineno}: {field!r} is not a number")
    except OSError as exc:
        raise click.ClickException(f"cannot read {path}: {exc}")
    return header, [np.asarray(c) for c in columns]


_config_option = click.option(
    "--config", type=click.Path(exists=True, dir_okay=False), default=None,
    help="JSON file with default parameter values; flags override it.")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


@click.group()
@click.version_option()
def main():
    """Fractional-Brownian Langevin toolkit."""


@main.command("simulate-fbm")
@click.option("--hurst", type=float, default=None, help="Hurst index in (0,1).")
@click.option("--horizon", type=float, default=1.0, show_default=True)
@click.option("--steps", type=int, default=1024, show_default=True,
              help="Grid cells on [0, horizon].")
@click.option("--paths", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None, help="Mandatory RNG seed.")
@click.option("--method", type=click.Choice(["exact", "kernel"]),
              default="exact", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--report", type=click.Choice(["variance"]), default=None,
              help="Print a Monte Carlo summary of the emitted paths.")
@_config_option
@click.pass_context
def cmd_simulate_fbm(ctx, **_kwargs):
    """Sample fractional Brownian motion paths to CSV."""
    p = _merged(ctx, ctx.params["config"])
    hurst = _check_hurst(p["hurst"])
    seed = _require_seed(p)
    if p["paths"] < 1:
        raise click.BadParameter("need at least one path", param_hint="--paths")
    try:
        grid = uniform_grid(p["horizon"], p["steps"])
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    spec = make_kernel_spec(hurst)
    cols = []
    for k in range(p["paths"]):
        stream = NoiseStream(seed, k)
        if p["method"] == "exact":
            path = sample_fbm_exact(hurst, grid, stream)
        else:
            path = sample_fbm_kernel(spec, grid, stream)
        cols.append(path.values)
    header = ["t"] + [f"path{k}" for k in range(p["paths"])]
    _write_csv(p["out"], header, [grid.points] + cols)
    click.echo(f"wrote {p['paths']} path(s) on {p['steps']} cells to {p['out']}")
    if p["report"] == "variance":
        terminal = np.array([c[-1] for c in cols])
        var = float(np.var(terminal))
        target = grid.horizon ** (2 * hurst)
        se = target * math.sqrt(2.0 / max(1, p["paths"]))
        click.echo(f"var(B_T) = {var:.6g}  target T^2H = {target:.6g}  "
                   f"standard error ~ {se:.2g}")


@main.command("simulate-velocity")
@click.option("--hurst", type=float, default=None)
@click.option("--ah", type=float, default=1.0, show_default=True,
              help="Amplitude of the transform normalization.")
@click.option("--mass", type=float, default=1.0, show_default=True)
@click.option("--friction", type=float, default=1.0, show_default=True)
@click.option("--sigma", type=float, default=1.0, show_default=True)
@click.option("--v0", type=float, default=1.0, show_default=True)
@click.option("--horizon", type=float, default=1.0, show_default=True)
@click.option("--steps", type=int, default=1024, show_default=True)
@click.option("--seed", type=int, default=None, help="Mandatory RNG seed.")
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@_config_option
@click.pass_context
def cmd_simulate_velocity(ctx, **_kwargs):
    """Exact OU velocity path plus its fractional transform to CSV."""
    p = _merged(ctx, ctx.params["config"])
    hurst = _check_hurst(p["hurst"])
    seed = _require_seed(p)
    params = _build_params(p)
    try:
        grid = uniform_grid(p["horizon"], p["steps"])
    except ValueError as exc:
        raise click.BadParameter(str(exc))
    v = simulate_ou_exact(params, grid, NoiseStream(seed))
    spec = make_kernel_spec(hurst)
    if spec.regime is Regime.STANDARD:
        _write_csv(p["out"], ["t", "V"], [grid.points, v.values])
        click.echo(f"wrote t,V to {p['out']} (H = 1/2 has no transform)")
        return
    config = FractionalConfig(spec, p["ah"])
    fp = fractional_velocity(config, v)
    _write_csv(p["out"], ["t", "V", "VH"],
               [grid.points, v.values, fp.transformed.values])
    click.echo(f"wrote t,V,VH to {p['out']}")


@main.command("estimate-hurst")
@click.argument("input_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--t-min", type=int, default=16, show_default=True,
              help="Smallest prefix length used in the log-log fit.")
@click.option("--increments", is_flag=True,
              help="Difference each series before the analysis.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the report as JSON.")
@_config_option
@click.pass_context
def cmd_estimate_hurst(ctx, **_kwargs):
    """Rescaled-range Hurst estimate for each series column of a CSV."""
    p = _merged(ctx, ctx.params["config"])
    header, columns = _read_csv(p["input_csv"])
    if len(columns) > 1:
        names, series = header[1:], columns[1:]  # first column is t; ignored
    else:
        names, series = header, columns
    if not p["increments"]:
        click.echo("note: rescaled-range analysis assumes a stationary series; "
                   "use --increments for path-like data")
    reports = []
    for name, values in zip(names, series):
        data = np.diff(values) if p["increments"] else values
        try:
            est = estimate_hurst(data, t_min=p["t_min"])
        except (DegenerateSeriesError, ValueError) as exc:
            raise click.ClickException(f"column {name!r}: {exc}")
        reports.append({"column": name, "hurst": est.hurst,
                        "amplitude": est.amplitude,
                        "r_squared": est.r_squared,
                        "points_used": est.points_used})
        click.echo(f"{name}: H = {est.hurst!r}  lambda = {est.amplitude!r}  "
                   f"r2 = {est.r_squared:.6g}  points = {est.points_used}")
    summary = {"columns": reports}
    if len(reports) > 1:
        summary["mean_hurst"] = float(np.mean([r["hurst"] for r in reports]))
        click.echo(f"mean H over {len(reports)} columns = "
                   f"{summary['mean_hurst']:.6g}")
    if p["out"]:
        with open(p["out"], "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")


@main.command("estimate-ah")
@click.argument("observed_csv", type=click.Path(exists=True, dir_okay=False))
@click.argument("velocity_csv", type=click.Path(exists=True, dir_okay=False))
@click.option("--hurst", type=float, default=None,
              help="Hurst index of the kernel (estimate it first).")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the report as JSON.")
@_config_option
@click.pass_context
def cmd_estimate_ah(ctx, **_kwargs):
    """Amplitude estimate from measured transform values and a velocity path."""
    p = _merged(ctx, ctx.params["config"])
    hurst = _check_hurst(p["hurst"])
    obs_header, obs_cols = _read_csv(p["observed_csv"])
    vel_header, vel_cols = _read_csv(p["velocity_csv"])
    for name, cols in (("observed", obs_cols), ("velocity", vel_cols)):
        if len(cols) < 2:
            raise click.ClickException(
                f"{name} file needs a t column plus a value column")
    t_obs, t_vel = obs_cols[0], vel_cols[0]
    if t_obs.size != t_vel.size:
        raise click.ClickException(
            f"grids differ in length: {t_obs.size} vs {t_vel.size} rows")
    gap = np.abs(t_obs - t_vel) > 1e-12
    if gap.any():
        row = int(np.argmax(gap))
        raise click.ClickException(
            f"grids differ at data row {row + 1}: t={t_obs[row]!r} vs {t_vel[row]!r}")

    def pick(header, cols, wanted):
        if wanted in header:
            return cols[header.index(wanted)]
        return cols[-1] if wanted == "VH" else cols[1]

    observed = pick(obs_header, obs_cols, "VH")
    velocity = pick(vel_header, vel_cols, "V")
    spec = make_kernel_spec(hurst)
    try:
        grid = TimeGrid(t_vel)
        v_path = Path(grid, velocity)
        obs_path = Path(grid, observed)
        amplitude = estimate_ah(spec, obs_path, v_path)
    except (DegenerateDenominatorError, ValueError) as exc:
        raise click.ClickException(str(exc))
    times = grid.points[1:]
    denominators = weight_matrix(spec, grid) @ (0.5 * (velocity[:-1] + velocity[1:]))
    ratios = times ** (hurst - 0.5) * (observed[1:] - velocity[0]) / denominators
    click.echo("per-time ratio diagnostics (t, ratio):")
    for t, r in zip(times, ratios):
        click.echo(f"  {t!r} {r!r}")
    click.echo(f"A_H estimate = {amplitude!r}")
    if p["out"]:
        with open(p["out"], "w") as fh:
            json.dump({"amplitude": amplitude,
                       "ratios": [{"t": float(t), "ratio": float(r)}
                                  for t, r in zip(times, ratios)]}, fh, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def _normal_cdf(x):
    return 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2.0)))


def _ks_distance_normal(samples):
    s = np.sort(samples)
    m = s.size
    cdf = _normal_cdf(s)
    upper = np.arange(1, m + 1) / m
    lower = np.arange(0, m) / m
    return float(max(np.max(upper - cdf), np.max(cdf - lower)))


def _check_covariance(n, seed):
    del seed  # deterministic
    n = n or 2048
    results = []
    for hurst in (0.7, 0.3):
        spec = make_kernel_spec(hurst)
        tol = 1e-2 if hurst > 0.5 else 2e-2
        for (s, t) in ((1.0, 1.0), (0.5, 1.0)):
            coarse = verify_covariance_identity(spec, s, t, n)
            fine = verify_covariance_identity(spec, s, t, 4 * n)
            ok = coarse <= tol and fine <= coarse * 1.05
            results.append({
                "name": f"covariance H={hurst} s={s} t={t}",
                "passed": bool(ok),
                "measured": {"residual": coarse, "residual_4n": fine},
                "threshold": tol,
            })
    return results


def _check_qv(n, seed, horizon):
    n = n or 100_000
    horizon = horizon or 2.0
    grid = uniform_grid(horizon, n)
    db = gaussian_increments(grid, NoiseStream(seed))
    qv = quadratic_variation(Path(grid, np.concatenate(([0.0], np.cumsum(db)))))
    tol = 5.0 * horizon * math.sqrt(2.0 / n)
    return [{
        "name": f"quadratic variation n={n} T={horizon}",
        "passed": bool(abs(qv - horizon) <= tol),
        "measured": {"qv": qv, "abs_error": abs(qv - horizon)},
        "threshold": tol,
    }]


def _check_donsker(n, seed):
    n = n or 10_000
    m = 2000
    dist = StepDistribution(StepKind.RADEMACHER)
    samples = np.array([
        donsker_path(n, 1.0, dist, NoiseStream(seed, k)).values[-1]
        for k in range(m)
    ])
    ks = _ks_distance_normal(samples)
    return [{
        "name": f"donsker KS n={n} M={m}",
        "passed": bool(ks <= 0.05),
        "measured": {"ks_distance": ks},
        "threshold": 0.05,
    }]


def _check_residual(n, seed):
    n = n or 1024
    coarse = max(16, n // 4)
    spec = make_kernel_spec(0.7)
    params = LangevinParams(mass=1.0, friction=2.0, sigma=0.5, v0=1.0)
    study = residual_refinement_study(spec, params, 1.0, [coarse, n], 8,
                                      NoiseStream(seed))
    worst = float(np.max(study[n]))
    improved = float(np.mean(study[n] < study[coarse]))
    return [{
        "name": f"transformed-equation residual n={n}",
        "passed": bool(worst <= 0.05 and improved >= 0.75),
        "measured": {"worst_normalized_residual": worst,
                     "fraction_improved_vs_coarse": improved},
        "threshold": 0.05,
    }]


@main.command("validate")
@click.option("--check", type=click.Choice(["all", "covariance", "qv",
                                            "donsker", "residual"]),
              default="all", show_default=True)
@click.option("--n", "--steps", "n", type=int, default=None,
              help="Override the check's grid/series size.")
@click.option("--t", "--horizon", "horizon", type=float, default=None,
              help="Override the check's horizon (qv only).")
@click.option("--seed", type=int, default=20200409, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the JSON summary to a file.")
@_config_option
@click.pass_context
def cmd_validate(ctx, **_kwargs):
    """Built-in diagnostic suite; fails with a nonzero exit code."""
    p = _merged(ctx, ctx.params["config"])
    which, n, seed = p["check"], p["n"], p["seed"]
    results = []
    if which in ("all", "covariance"):
        results += _check_covariance(n, seed)
    if which in ("all", "qv"):
        results += _check_qv(n, seed, p["horizon"])
    if which in ("all", "donsker"):
        results += _check_donsker(n, seed)
    if which in ("all", "residual"):
        results += _check_residual(n, seed)
    for r in results:
        status = "PASS" if r["passed"] else "FAIL"
        measured = "  ".join(f"{k}={v:.6g}" for k, v in r["measured"].items())
        click.echo(f"[{status}] {r['name']}: {measured} (threshold {r['threshold']:.3g})")
    summary = {"passed": all(r["passed"] for r in results), "checks": results}
    click.echo(json.dumps(summary))
    if p["out"]:
        with open(p["out"], "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    if not summary["passed"]:
        sys.exit(1)


if __name__ == "__main__":
    main()
