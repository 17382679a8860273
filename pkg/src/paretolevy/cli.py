"""Command-line front end.

A thin shell over the library: every command's output is reproducible by
direct library calls.  Exit codes: 0 ok, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import csv
import json
import os

import click
import numpy as np

from . import asymptotics, ingest, mc
from .estimators import AsynchronousTailIntegral, EmpiricalTailIntegral, quadrant_transform
from .models import ParetoLevyModel
from .schemes import EquidistantScheme, diagnostics, scheme_from_json
from .sim import ProcessConfig, sample_path_increments


def _fmt(x) -> str:
    return repr(float(x))


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


@click.group()
@click.option("--seed", type=int, default=11141976, show_default=True,
              help="Master seed for anything random.")
@click.option("--threads", type=int, default=1, show_default=True,
              help="Worker processes for Monte Carlo replications.")
@click.option("--out-dir", type=click.Path(file_okay=False), default=".",
              show_default=True, help="Directory for output files.")
@click.pass_context
def main(ctx, seed, threads, out_dir):
    """Simulate coupled-subordinator paths, estimate Levy tail integrals and
    Pareto-Levy copulas from high-frequency increments, and verify the
    estimators against their closed-form Gaussian limits."""
    os.makedirs(out_dir, exist_ok=True)
    ctx.obj = {"seed": seed, "threads": threads, "out_dir": out_dir}


@main.command()
@click.option("--n", type=int, default=2000, show_default=True, help="Number of increments.")
@click.option("--k-n", type=float, default=5.0, show_default=True,
              help="Time horizon.  Long pure-jump horizons can overflow the "
                   "exponential price representation of the output file.")
@click.option("--design", type=click.Choice(["pure", "brownian"]), default="pure",
              show_default=True)
@click.option("--theta", type=float, default=0.5, show_default=True,
              help="Clayton dependence parameter.")
@click.option("--eps", type=float, default=1e-4, show_default=True,
              help="Jump truncation level.")
@click.option("--base-price", type=float, default=100.0, show_default=True)
@click.option("--output", default="ticks.csv", show_default=True)
@click.pass_context
def simulate(ctx, n, k_n, design, theta, eps, base_price, output):
    """Simulate one path and write it as an ingestible tick CSV."""
    model = ParetoLevyModel.clayton_stable(theta=theta)
    bvar = (0.5, 0.5) if design == "brownian" else (0.0, 0.0)
    config = ProcessConfig(model=model, horizon=k_n, brownian_variances=bvar,
                           jump_truncation=eps, seed=ctx.obj["seed"])
    scheme = EquidistantScheme(n=n, delta=k_n / n)
    series = sample_path_increments(config, scheme)
    table = ingest.prices_from_increments(series, base_price=base_price)
    path = os.path.join(ctx.obj["out_dir"], output)
    ingest.write_ticks(path, table)
    click.echo(f"wrote {path} ({n} increments, horizon {k_n})")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Tick CSV (header timestamp,price1,price2).")
@click.option("--k-n", type=float, required=True,
              help="Normalizer / effective horizon; must be chosen by the user "
                   "(for daily jump activity, the number of observed trading "
                   "days is a reasonable trade-off).")
@click.option("--mode", type=click.Choice(["synchronous", "asynchronous"]),
              default="synchronous", show_default=True)
@click.option("--grid-min", type=float, default=0.05, show_default=True)
@click.option("--grid-max", type=float, default=1.5, show_default=True)
@click.option("--grid-steps", type=int, default=30, show_default=True)
@click.option("--surface-quadrant", type=click.Choice(["++", "+-", "-+", "--"]),
              default="++", show_default=True, help="Quadrant of the exported surface.")
@click.pass_context
def estimate(ctx, input_path, k_n, mode, grid_min, grid_max, grid_steps, surface_quadrant):
    """Estimate the Pareto-Levy copula of tick data: one copula surface, the
    four quadrant diagonals, and the marginal tail estimates, as CSV."""
    if k_n <= 0:
        raise click.UsageError("--k-n must be positive")
    if not (0 < grid_min < grid_max) or grid_steps < 2:
        raise click.UsageError("need 0 < grid-min < grid-max and grid-steps >= 2")
    table = ingest.read_ticks(input_path)
    click.echo(table.report.summary(), err=True)
    series = ingest.to_increments(table, mode=mode, k_n=k_n)
    grid = np.linspace(grid_min, grid_max, grid_steps)
    out_dir = ctx.obj["out_dir"]

    def fitted(quadrant):
        s = quadrant_transform(series, quadrant)
        if mode == "asynchronous":
            return AsynchronousTailIntegral().fit(s.values1, s.values2, s.scheme)
        return EmpiricalTailIntegral(k_n=k_n).fit(s.values)

    tag = surface_quadrant.replace("+", "p").replace("-", "m")
    est = fitted(surface_quadrant)
    rows = [(_fmt(a), _fmt(b), _fmt(est.copula(a, b))) for a in grid for b in grid]
    surface_path = os.path.join(out_dir, f"plc_surface_{tag}.csv")
    _write_rows(surface_path, ["u1", "u2", "value"], rows)

    diag_rows = []
    estimators = {q: fitted(q) for q in ("++", "+-", "-+", "--")}
    for u in grid:
        diag_rows.append([_fmt(u)] + [_fmt(estimators[q].copula(u, u))
                                      for q in ("++", "+-", "-+", "--")])
    diag_path = os.path.join(out_dir, "plc_diagonals.csv")
    _write_rows(diag_path, ["u", "pp", "pm", "mp", "mm"], diag_rows)

    base = estimators["++"]
    marg_rows = [(_fmt(x), _fmt(base.marginal(1, x)), _fmt(base.marginal(2, x)))
                 for x in grid]
    marg_path = os.path.join(out_dir, "marginal_tails.csv")
    _write_rows(marg_path, ["x", "tail1", "tail2"], marg_rows)
    click.echo(f"wrote {surface_path}, {diag_path}, {marg_path}")


@main.command("mc-table")
@click.argument("table", type=click.IntRange(1, 3))
@click.option("--reps", type=int, default=500, show_default=True)
@click.option("--n", type=int, default=22500, show_default=True)
@click.option("--json-out", is_flag=True, help="Also write one JSON report per row.")
@click.pass_context
def mc_table(ctx, table, reps, n, json_out):
    """Reproduce verification table 1, 2 or 3 (bias/variance/covariances of
    the scaled estimation error against the Gaussian-limit values)."""
    specs = mc.table_specs(table, reps=reps, master_seed=ctx.obj["seed"], n=n)
    reports = []
    for spec in specs:
        report = mc.run_experiment(spec, n_jobs=ctx.obj["threads"])
        reports.append(report)
        click.echo(f"{spec.estimator} design={spec.design} n={spec.n} k_n={spec.k_n}: "
                   f"var={np.round(report.variance[:3], 4).tolist()}")
    path = os.path.join(ctx.obj["out_dir"], f"mc_table{table}.csv")
    mc.write_report_csv(reports, path)
    if json_out:
        for i, report in enumerate(reports):
            mc.write_report_json(report, os.path.join(
                ctx.obj["out_dir"], f"mc_table{table}_row{i}.json"))
    click.echo(f"wrote {path}")


@main.command()
@click.option("--estimator", type=click.Choice(["tail", "plc", "oracle_plc"]),
              default="tail", show_default=True)
@click.option("--design", type=click.Choice(["pure", "brownian"]), default="pure",
              show_default=True)
@click.option("--k-n", type=float, default=75.0, show_default=True)
@click.option("--n", type=int, default=22500, show_default=True)
@click.option("--reps", type=int, default=500, show_default=True)
@click.pass_context
def qq(ctx, estimator, design, k_n, n, reps):
    """QQ data of the standardized scaled errors at the diagonal points,
    with the Kolmogorov-Smirnov distance to the standard normal."""
    spec = mc.ExperimentSpec(estimator=estimator, design=design, n=n, k_n=k_n,
                             reps=reps, master_seed=ctx.obj["seed"])
    report = mc.run_experiment(spec, n_jobs=ctx.obj["threads"])
    for point in spec.eval_points:
        data = mc.qq_data(report, point)
        name = f"qq_{estimator}_{design}_k{k_n:g}_{point[0]:g}_{point[1]:g}.csv"
        path = os.path.join(ctx.obj["out_dir"], name)
        mc.write_qq_csv(data, path)
        click.echo(f"{point}: KS distance {data.ks_distance:.4f} -> {path}")


@main.command()
@click.option("--theta", type=float, default=0.5, show_default=True)
@click.option("--grid-min", type=float, default=0.05, show_default=True)
@click.option("--grid-max", type=float, default=2.0, show_default=True)
@click.option("--grid-steps", type=int, default=40, show_default=True)
@click.pass_context
def efficiency(ctx, theta, grid_min, grid_max, grid_steps):
    """Asymptotic relative efficiency surface of the empirical copula
    estimator to the known-margins one, as a CSV grid."""
    if not (0 < grid_min < grid_max) or grid_steps < 2:
        raise click.UsageError("need 0 < grid-min < grid-max and grid-steps >= 2")
    model = ParetoLevyModel.clayton_stable(theta=theta)
    grid = np.linspace(grid_min, grid_max, grid_steps)
    rows = [(_fmt(a), _fmt(b), _fmt(asymptotics.relative_efficiency(model, (a, b))))
            for a in grid for b in grid]
    path = os.path.join(ctx.obj["out_dir"], "relative_efficiency.csv")
    _write_rows(path, ["u1", "u2", "efficiency"], rows)
    click.echo(f"wrote {path}")


@main.command("diagnose-scheme")
@click.option("--scheme-json", type=click.Path(exists=True, dir_okay=False),
              help="Scheme serialized as JSON.")
@click.option("--n", type=int, help="Equidistant scheme size (alternative to --scheme-json).")
@click.option("--delta", type=float, help="Equidistant spacing.")
@click.option("--beta", type=float, default=None, help="Small-jump activity index in (1, 2).")
@click.option("--delta-exp", type=float, default=None, help="Free exponent in (0, 1/2).")
@click.pass_context
def diagnose_scheme(ctx, scheme_json, n, delta, beta, delta_exp):
    """Report the growth-condition statistics of a sampling scheme."""
    if scheme_json:
        with open(scheme_json) as fh:
            scheme = scheme_from_json(fh.read())
    elif n and delta:
        scheme = EquidistantScheme(n=n, delta=delta)
    else:
        raise click.UsageError("pass --scheme-json or both --n and --delta")
    report = diagnostics(scheme, beta=beta, delta_exp=delta_exp)
    click.echo(json.dumps(report.as_dict(), indent=2, default=str))
