"""Monte Carlo harness verifying the estimators against their Gaussian limits.

Each experiment simulates ``reps`` independent paths, applies one estimator,
and aggregates moments of ``sqrt(k_n) * (estimate - truth)`` at the chosen
evaluation points.  Replication r draws everything from the (master_seed, r)
sub-stream, so reports are bit-reproducible and independent of the number of
workers.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, replace

import numpy as np
from joblib import Parallel, delayed
from scipy import stats
from scipy.special import ndtri

from .estimators import EmpiricalTailIntegral
from .models import ParetoLevyModel
from .schemes import EquidistantScheme, IrregularScheme
from .sim import ProcessConfig, replication_rng, sample_path_increments

__all__ = ["ExperimentSpec", "McReport", "run_experiment", "qq_data", "table_specs"]

_ESTIMATORS = ("tail", "plc", "oracle_plc", "truth")  # "truth" = degenerate calibration case
_DESIGNS = ("pure", "brownian")
_SAMPLINGS = ("equidistant", "irregular")

_DIAG_POINTS = ((2.0, 2.0), (1.0, 1.0), (0.5, 0.5))
_DIAG_PAIRS = (((2.0, 2.0), (0.5, 0.5)), ((2.0, 2.0), (1.0, 1.0)), ((1.0, 1.0), (0.5, 0.5)))


@dataclass(frozen=True)
class ExperimentSpec:
    """Full description of one table row: design, sizes, estimator, seed."""

    estimator: str = "tail"
    design: str = "pure"
    sampling: str = "equidistant"
    n: int = 22500
    k_n: float = 100.0
    reps: int = 500
    eval_points: tuple = _DIAG_POINTS
    cov_pairs: tuple = _DIAG_PAIRS
    master_seed: int = 11141976
    theta: float = 0.5
    jump_truncation: float = 1e-4

    def __post_init__(self):
        if self.estimator not in _ESTIMATORS:
            raise ValueError(f"estimator must be one of {_ESTIMATORS}")
        if self.design not in _DESIGNS:
            raise ValueError(f"design must be one of {_DESIGNS}")
        if self.sampling not in _SAMPLINGS:
            raise ValueError(f"sampling must be one of {_SAMPLINGS}")
        if self.reps < 2:
            raise ValueError("need reps >= 2")
        if not (self.n >= 1 and self.k_n > 0):
            raise ValueError("need n >= 1 and k_n > 0")
        pts = tuple((float(a), float(b)) for a, b in self.eval_points)
        object.__setattr__(self, "eval_points", pts)
        prs = tuple(((float(a1), float(a2)), (float(b1), float(b2)))
                    for (a1, a2), (b1, b2) in self.cov_pairs)
        object.__setattr__(self, "cov_pairs", prs)
        for a, b in pts:
            if not (a > 0 and b > 0):
                raise ValueError("evaluation points must be in (0, inf)^2")

    def model(self) -> ParetoLevyModel:
        return ParetoLevyModel.clayton_stable(theta=self.theta)

    @property
    def brownian_variances(self) -> tuple:
        return (0.5, 0.5) if self.design == "brownian" else (0.0, 0.0)

    def truth(self, model: ParetoLevyModel | None = None) -> np.ndarray:
        model = model or self.model()
        if self.estimator == "tail":
            return np.array([model.tail(a, b) for a, b in self.eval_points])
        return np.array([model.copula(a, b) for a, b in self.eval_points])


def _replicate(spec: ExperimentSpec, rep: int) -> np.ndarray:
    """Scaled deviations at the evaluation points for replication ``rep``."""
    if spec.estimator == "truth":
        return np.zeros(len(spec.eval_points))
    rng = replication_rng(spec.master_seed, rep)
    model = spec.model()
    if spec.sampling == "irregular":
        delta = spec.k_n / spec.n
        spacings = rng.uniform(0.5 * delta, 1.5 * delta, spec.n)
        scheme = IrregularScheme(times=np.cumsum(spacings))
    else:
        scheme = EquidistantScheme(n=spec.n, delta=spec.k_n / spec.n)
    config = ProcessConfig(
        model=model, horizon=scheme.k_n, brownian_variances=spec.brownian_variances,
        jump_truncation=spec.jump_truncation)
    series = sample_path_increments(config, scheme, rng=rng)
    est = EmpiricalTailIntegral(k_n=scheme.k_n).fit(series.values)
    if spec.estimator == "tail":
        vals = [est.evaluate(a, b) for a, b in spec.eval_points]
    elif spec.estimator == "plc":
        vals = [est.copula(a, b) for a, b in spec.eval_points]
    else:
        vals = [est.oracle_copula(a, b, model.margins) for a, b in spec.eval_points]
    truth = spec.truth(model)
    return math.sqrt(scheme.k_n) * (np.asarray(vals) - truth)


@dataclass(frozen=True)
class McReport:
    """Per-point moments of the scaled estimation error, plus the raw
    replicate matrix for distributional checks."""

    spec: ExperimentSpec
    points: tuple
    truth: np.ndarray
    bias: np.ndarray
    variance: np.ndarray
    bias_stderr: np.ndarray
    variance_stderr: np.ndarray
    covariances: dict
    replicates: np.ndarray   # (reps, n_points)

    def point_index(self, point) -> int:
        p = (float(point[0]), float(point[1]))
        try:
            return self.points.index(p)
        except ValueError:
            raise KeyError(f"{p} is not an evaluation point of this report")

    def as_dict(self) -> dict:
        return {
            "spec": {k: v for k, v in self.spec.__dict__.items()},
            "points": list(self.points),
            "truth": self.truth.tolist(),
            "bias": self.bias.tolist(),
            "variance": self.variance.tolist(),
            "bias_stderr": self.bias_stderr.tolist(),
            "variance_stderr": self.variance_stderr.tolist(),
            "covariances": {repr(k): v for k, v in self.covariances.items()},
        }


def run_experiment(spec: ExperimentSpec, n_jobs: int = 1) -> McReport:
    """Run all replications and aggregate; deterministic given the spec,
    whatever the degree of parallelism."""
    extra = [p for pair in spec.cov_pairs for p in pair if p not in spec.eval_points]
    missing = tuple(dict.fromkeys(extra))
    if missing:
        spec = replace(spec, eval_points=spec.eval_points + missing)
    if n_jobs == 1:
        rows = [_replicate(spec, r) for r in range(spec.reps)]
    else:
        rows = Parallel(n_jobs=n_jobs)(
            delayed(_replicate)(spec, r) for r in range(spec.reps))
    R = np.vstack(rows)
    reps = spec.reps
    bias = R.mean(axis=0)
    variance = R.var(axis=0, ddof=1)
    bias_se = R.std(axis=0, ddof=1) / math.sqrt(reps)
    var_se = variance * math.sqrt(2.0 / (reps - 1))
    cov = {}
    centered = R - bias
    for a, b in spec.cov_pairs:
        i, j = spec.eval_points.index(a), spec.eval_points.index(b)
        cov[(a, b)] = float((centered[:, i] * centered[:, j]).sum() / (reps - 1))
    return McReport(spec=spec, points=spec.eval_points, truth=spec.truth(),
                    bias=bias, variance=variance, bias_stderr=bias_se,
                    variance_stderr=var_se, covariances=cov, replicates=R)


@dataclass(frozen=True)
class QQData:
    normal_quantiles: np.ndarray
    standardized: np.ndarray
    ks_distance: float


def qq_data(report: McReport, point) -> QQData:
    """Sorted standardized replicates at one point, paired with standard
    normal quantiles, plus the Kolmogorov-Smirnov distance to N(0,1).
    Replicates are centered at their sample mean and scaled by their sample
    standard deviation."""
    i = report.point_index(point)
    x = report.replicates[:, i]
    if x.size < 30:
        raise ValueError("need at least 30 replicates for a QQ check")
    sd = float(x.std(ddof=1))
    if sd == 0:
        raise ValueError("replicates are degenerate (zero standard deviation)")
    z = np.sort((x - x.mean()) / sd)
    q = ndtri((np.arange(1, x.size + 1) - 0.5) / x.size)
    ks = float(stats.kstest(z, "norm").statistic)
    return QQData(normal_quantiles=q, standardized=z, ks_distance=ks)


def table_specs(table: int, reps: int = 500, master_seed: int = 11141976,
                n: int = 22500) -> list[ExperimentSpec]:
    """Experiment grid of the three verification tables.

    Table 1: tail estimator, k_n in {50, 75, 100, 150, 250}, both designs.
    Table 2: copula estimator, same grid.
    Table 3: tail estimator, pure design, all (k_n, 1/delta) combinations
    in {50, 100, 150, 200}^2 (n = k_n / delta varies).
    """
    if table in (1, 2):
        estimator = "tail" if table == 1 else "plc"
        return [
            ExperimentSpec(estimator=estimator, design=design, n=n, k_n=float(k),
                           reps=reps, master_seed=master_seed)
            for design in _DESIGNS for k in (50, 75, 100, 150, 250)
        ]
    if table == 3:
        return [
            ExperimentSpec(estimator="tail", design="pure", n=int(k * dinv),
                           k_n=float(k), reps=reps, master_seed=master_seed)
            for k in (50, 100, 150, 200) for dinv in (50, 100, 150, 200)
        ]
    raise ValueError("table must be 1, 2 or 3")


def write_report_csv(reports, path):
    """One row per (design, k_n): bias/variance per diagonal point and the
    covariances of the standard point pairs, mirroring the table layout."""
    reports = list(reports)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["estimator", "design", "sampling", "n", "k_n"]
        for p in reports[0].spec.eval_points:
            header += [f"bias_{p[0]}_{p[1]}", f"var_{p[0]}_{p[1]}"]
        for a, b in reports[0].spec.cov_pairs:
            header += [f"cov_{a[0]}_{a[1]}__{b[0]}_{b[1]}"]
        w.writerow(header)
        for rep in reports:
            s = rep.spec
            row = [s.estimator, s.design, s.sampling, s.n, _fmt(s.k_n)]
            for i, _ in enumerate(s.eval_points):
                row += [_fmt(rep.bias[i]), _fmt(rep.variance[i])]
            for pair in s.cov_pairs:
                row += [_fmt(rep.covariances[pair])]
            w.writerow(row)


def write_report_json(report: McReport, path):
    with open(path, "w") as fh:
        json.dump(report.as_dict(), fh, indent=2)


def write_qq_csv(qq: QQData, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["normal_quantile", "standardized_value"])
        for q, z in zip(qq.normal_quantiles, qq.standardized):
            w.writerow([_fmt(q), _fmt(z)])


def _fmt(x) -> str:
    return repr(float(x))
