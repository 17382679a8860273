import math

import numpy as np
import pytest

from paretolevy import ExperimentSpec, qq_data, run_experiment, table_specs
from paretolevy.mc import McReport, write_qq_csv, write_report_csv, write_report_json

SMALL = dict(n=800, k_n=8.0, reps=16, master_seed=101)


def _fake_report(replicates):
    replicates = np.asarray(replicates, dtype=float)
    spec = ExperimentSpec(reps=max(len(replicates), 2), eval_points=((1.0, 1.0),), cov_pairs=())
    return McReport(spec=spec, points=((1.0, 1.0),), truth=np.zeros(1),
                    bias=replicates.mean(axis=0), variance=replicates.var(axis=0, ddof=1),
                    bias_stderr=np.zeros(1), variance_stderr=np.zeros(1),
                    covariances={}, replicates=replicates)


class TestRunExperiment:
    def test_truth_estimator_is_degenerate(self):
        spec = ExperimentSpec(estimator="truth", reps=10, n=10, k_n=1.0)
        report = run_experiment(spec)
        assert np.all(report.bias == 0.0)
        assert np.all(report.variance == 0.0)

    def test_bit_reproducible(self):
        spec = ExperimentSpec(estimator="tail", **SMALL)
        r1 = run_experiment(spec)
        r2 = run_experiment(spec)
        assert np.array_equal(r1.replicates, r2.replicates)

    def test_parallel_invariance(self):
        spec = ExperimentSpec(estimator="plc", **SMALL)
        serial = run_experiment(spec, n_jobs=1)
        parallel = run_experiment(spec, n_jobs=2)
        assert np.array_equal(serial.replicates, parallel.replicates)

    def test_covariance_pairs_extend_eval_points(self):
        spec = ExperimentSpec(
            estimator="tail", eval_points=((1.0, 1.0),),
            cov_pairs=(((1.0, 1.0), (0.5, 0.5)),), **SMALL)
        report = run_experiment(spec)
        assert (0.5, 0.5) in report.points
        assert ((1.0, 1.0), (0.5, 0.5)) in report.covariances

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ExperimentSpec(estimator="banana")
        with pytest.raises(ValueError):
            ExperimentSpec(reps=1)
        with pytest.raises(ValueError):
            ExperimentSpec(eval_points=((0.0, 1.0),))
        with pytest.raises(ValueError):
            ExperimentSpec(design="noisy")
        with pytest.raises(ValueError):
            ExperimentSpec(sampling="poisson")


class TestQQ:
    def test_calibrated_on_synthetic_normal(self):
        rng = np.random.default_rng(0)
        reps = 2000
        report = _fake_report(rng.standard_normal((reps, 1)))
        qq = qq_data(report, (1.0, 1.0))
        assert qq.ks_distance <= 2 * 1.358 / math.sqrt(reps)
        assert qq.normal_quantiles.shape == (reps,)
        assert np.all(np.diff(qq.standardized) >= 0)

    def test_constant_replicates_rejected(self):
        report = _fake_report(np.ones((50, 1)))
        with pytest.raises(ValueError):
            qq_data(report, (1.0, 1.0))

    def test_too_few_replicates_rejected(self):
        rng = np.random.default_rng(0)
        report = _fake_report(rng.standard_normal((10, 1)))
        with pytest.raises(ValueError):
            qq_data(report, (1.0, 1.0))

    def test_unknown_point_rejected(self):
        rng = np.random.default_rng(0)
        report = _fake_report(rng.standard_normal((40, 1)))
        with pytest.raises(KeyError):
            qq_data(report, (9.0, 9.0))


class TestPresets:
    def test_table_shapes(self):
        t1 = table_specs(1, reps=10)
        assert len(t1) == 10 and all(s.estimator == "tail" for s in t1)
        assert sorted({s.design for s in t1}) == ["brownian", "pure"]
        t2 = table_specs(2, reps=10)
        assert all(s.estimator == "plc" for s in t2)
        t3 = table_specs(3, reps=10)
        assert len(t3) == 16
        assert {(s.k_n, s.n // int(s.k_n)) for s in t3} == {
            (float(k), d) for k in (50, 100, 150, 200) for d in (50, 100, 150, 200)}

    def test_invalid_table(self):
        with pytest.raises(ValueError):
            table_specs(4)


class TestLimitLinks:
    """Monte Carlo moments against the closed-form limit covariances at
    parameter values and points outside the standard verification battery;
    seeds are pinned, so the 3.5-standard-error bands are deterministic."""

    def test_cross_model_variance_matches_engine(self):
        import paretolevy as pl
        from paretolevy.asymptotics import empirical_cov, tail_cov
        model = pl.ParetoLevyModel.clayton_stable(theta=1.5)
        spec = ExperimentSpec(estimator="plc", theta=1.5, k_n=50.0, n=22500, reps=250,
                              eval_points=((1.0, 1.0), (2.0, 1.0)), cov_pairs=(),
                              master_seed=77)
        report = run_experiment(spec)
        for i, p in enumerate(report.points):
            theory = empirical_cov(model, p, p)
            band = 3.5 * report.variance[i] * math.sqrt(2 / (spec.reps - 1))
            assert abs(report.variance[i] - theory) <= band, (p, report.variance[i], theory)
        spec = ExperimentSpec(estimator="tail", theta=1.5, k_n=50.0, n=22500, reps=250,
                              eval_points=((2.0, 1.0), (0.7, 1.3)), cov_pairs=(),
                              master_seed=78)
        report = run_experiment(spec)
        for i, p in enumerate(report.points):
            theory = tail_cov(model, p, p)
            band = 3.5 * report.variance[i] * math.sqrt(2 / (spec.reps - 1))
            assert abs(report.variance[i] - theory) <= band, (p, report.variance[i], theory)

    def test_asynchronous_estimator_reaches_the_same_limit(self):
        # pair counting over overlapping intervals, scaled by sqrt(k_n),
        # reproduces the tail-limit variance on interleaved random grids
        import paretolevy as pl
        model = pl.ParetoLevyModel.clayton_stable(theta=0.5)
        k, n, reps = 30.0, 9000, 300
        pts = [(1.0, 1.0), (0.5, 0.5)]
        vals = {p: [] for p in pts}
        for rep in range(reps):
            rng = pl.replication_rng(314, rep)
            d1 = rng.uniform(0.5 * k / n, 1.5 * k / n, n)
            d2 = rng.uniform(0.5 * k / n, 1.5 * k / n, n)
            t1, t2 = np.cumsum(d1), np.cumsum(d2)
            end = min(t1[-1], t2[-1])
            t1 = np.append(t1[t1 < end], end)
            t2 = np.append(t2[t2 < end], end)
            sch = pl.AsynchronousScheme(times1=t1, times2=t2)
            cfg = pl.ProcessConfig(model=model, horizon=sch.k_n * (1 + 1e-9))
            series = pl.sample_path_increments(cfg, sch, rng=rng)
            est = pl.AsynchronousTailIntegral().fit(series.values1, series.values2, sch)
            for p in pts:
                vals[p].append(math.sqrt(sch.k_n) * (est.evaluate(*p) - model.tail(*p)))
        for p in pts:
            v = np.asarray(vals[p])
            var = v.var(ddof=1)
            band = 3.5 * var * math.sqrt(2 / (reps - 1))
            assert abs(var - model.tail(*p)) <= band, (p, var, model.tail(*p))


class TestSerialization:
    def test_csv_json_round(self, tmp_path):
        spec = ExperimentSpec(estimator="tail", **{**SMALL, "reps": 32})
        report = run_experiment(spec)
        csv_path = tmp_path / "table.csv"
        write_report_csv([report], csv_path)
        text = csv_path.read_text().splitlines()
        assert text[0].startswith("estimator,design,sampling,n,k_n,bias_2.0_2.0")
        assert len(text) == 2
        json_path = tmp_path / "report.json"
        write_report_json(report, json_path)
        assert json_path.stat().st_size > 0
        qq_path = tmp_path / "qq.csv"
        write_qq_csv(qq_data(report, (1.0, 1.0)), qq_path)
        assert qq_path.read_text().splitlines()[0] == "normal_quantile,standardized_value"
