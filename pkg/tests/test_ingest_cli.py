import json
import math
import os

import numpy as np
import pytest
from click.testing import CliRunner

from paretolevy import (
    AsynchronousTailIntegral,
    EmpiricalTailIntegral,
    EquidistantScheme,
    ProcessConfig,
    sample_path_increments,
)
from paretolevy.cli import main
from paretolevy.ingest import (
    IngestError,
    InsufficientDataError,
    prices_from_increments,
    read_ticks,
    to_increments,
    write_ticks,
)

INF = math.inf


def write_csv(path, rows, header="timestamp,price1,price2"):
    path.write_text(header + "\n" + "\n".join(rows) + "\n")
    return str(path)


class TestIngestCleaning:
    def test_clean_file_passes_through(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,100,200", "2.0,101,201", "3.0,102,202"])
        table = read_ticks(p)
        assert table.report.rows_kept == 3
        assert table.report.dropped_duplicate_timestamp == 0
        assert table.report.nonpositive_prices == 0

    def test_duplicate_timestamp_keeps_last(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,100,200", "2.0,101,201", "2.0,999,888"])
        table = read_ticks(p)
        assert table.report.dropped_duplicate_timestamp == 1
        assert table.price1.tolist() == [100.0, 999.0]

    def test_nonpositive_price_dropped(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,100,200", "2.0,0,201", "3.0,102,202"])
        table = read_ticks(p)
        assert table.report.nonpositive_prices == 1
        assert math.isnan(table.price1[1]) and table.price2[1] == 201.0

    def test_missing_prices_marked(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,100,", "2.0,,201", "3.0,102,202"])
        table = read_ticks(p)
        assert table.report.missing_prices == 2
        assert math.isnan(table.price2[0]) and math.isnan(table.price1[1])

    def test_fully_empty_row_dropped(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,,", "2.0,101,201", "3.0,102,202"])
        table = read_ticks(p)
        assert table.report.dropped_empty == 1
        assert table.times.tolist() == [2.0, 3.0]

    def test_unsorted_rows_reordered(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["3.0,102,202", "1.0,100,200", "2.0,101,201"])
        table = read_ticks(p)
        assert table.report.reordered
        assert table.times.tolist() == [1.0, 2.0, 3.0]

    def test_iso_timestamps(self, tmp_path):
        p = write_csv(tmp_path / "t.csv",
                      ["2012-07-02 09:30:00,100,200", "2012-07-02 09:31:00,101,201"])
        table = read_ticks(p)
        assert table.times[1] - table.times[0] == 60.0

    def test_parse_error_carries_line_number(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,100,200", "oops,101,201"])
        with pytest.raises(IngestError, match="line 3"):
            read_ticks(p)
        p2 = write_csv(tmp_path / "t2.csv", ["1.0,abc,200", "2.0,101,201"])
        with pytest.raises(IngestError, match="line 2"):
            read_ticks(p2)

    def test_insufficient_rows(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,100,200"])
        with pytest.raises(InsufficientDataError):
            read_ticks(p)

    def test_bad_header(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["1.0,2.0,3.0"], header="a,b,c")
        with pytest.raises(IngestError):
            read_ticks(p)


class TestToIncrements:
    def test_log_returns(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", [f"0.0,100,100", f"1.0,{100 * math.e},100"])
        series = to_increments(read_ticks(p))
        assert series.values1[0] == pytest.approx(1.0, rel=1e-12)
        assert series.values2[0] == 0.0

    def test_constant_prices_zero_increments(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["0.0,50,70", "1.0,50,70", "2.0,50,70"])
        series = to_increments(read_ticks(p))
        assert np.all(series.values1 == 0.0) and np.all(series.values2 == 0.0)

    def test_horizon_rescaling(self, tmp_path):
        rows = [f"{t},100,100" for t in range(0, 11)]
        p = write_csv(tmp_path / "t.csv", rows)
        series = to_increments(read_ticks(p), k_n=62.0)
        assert series.scheme.k_n == pytest.approx(62.0)

    def test_asynchronous_pipeline_hand_count(self, tmp_path):
        # component 1 ticks at t=0,2,4 (prices e^0,e^1,e^3 -> increments 1,2)
        # component 2 ticks at t=1,3,4 (prices e^0,e^2,e^2 -> increments 2,0)
        rows = [
            f"0.0,{math.exp(0)},",
            f"1.0,,{math.exp(0)}",
            f"2.0,{math.exp(1)},",
            f"3.0,,{math.exp(2)}",
            f"4.0,{math.exp(3)},{math.exp(2)}",
        ]
        p = write_csv(tmp_path / "t.csv", rows)
        series = to_increments(read_ticks(p), mode="asynchronous")
        assert series.values1 == pytest.approx([1.0, 2.0])
        assert series.values2 == pytest.approx([2.0, 0.0])
        est = AsynchronousTailIntegral().fit(series.values1, series.values2, series.scheme)
        # intervals: comp1 (0,2],(2,4]; comp2 (1,3],(3,4]; overlapping pairs are
        # (0,0), (1,0), (1,1) -- the (0,1) pair (0,2]x(3,4] is disjoint.
        # increment pairs (1,2), (2,2), (2,0) all exceed (1, 0): 3 of k_n=4
        assert est.evaluate(1.0, 0.0) == pytest.approx(3 / 4.0)
        # (2, 1): only the pair (2, 2) qualifies
        assert est.evaluate(2.0, 1.0) == pytest.approx(1 / 4.0)
        assert est.evaluate(2.0, 1.0) == est.recount(2.0, 1.0)

    def test_asynchronous_truncates_to_common_end(self, tmp_path):
        rows = ["0.0,100,", "1.0,,100", "2.0,101,", "3.0,,101", "5.0,102,"]
        p = write_csv(tmp_path / "t.csv", rows)
        series = to_increments(read_ticks(p), mode="asynchronous")
        assert series.times1[-1] <= 3.0  # the t=5 tick falls past the common end

    def test_insufficient_component_rows(self, tmp_path):
        p = write_csv(tmp_path / "t.csv", ["0.0,100,200", "1.0,101,", "2.0,102,"])
        with pytest.raises(InsufficientDataError):
            to_increments(read_ticks(p), mode="asynchronous")

    def test_uncleaned_prices_rejected(self):
        from paretolevy.ingest import TickTable
        table = TickTable(times=np.array([0.0, 1.0]),
                          price1=np.array([100.0, -5.0]),
                          price2=np.array([100.0, 100.0]))
        with pytest.raises(ValueError, match="non-positive"):
            to_increments(table)


class TestPipelineSanity:
    """Dependence structure survives the simulate -> estimate pipeline: the
    stand-in for real-data findings that need proprietary ticks."""

    N, K = 20000, 50.0

    def _diagonal(self, copula, seed, bvar):
        from paretolevy import ParetoLevyModel, StableTail
        m = StableTail.half_stable()
        model = ParetoLevyModel(copula=copula, margin1=m, margin2=m)
        cfg = ProcessConfig(model=model, horizon=self.K, brownian_variances=bvar, seed=seed)
        scheme = EquidistantScheme(n=self.N, delta=self.K / self.N)
        series = sample_path_increments(cfg, scheme)
        est = EmpiricalTailIntegral(k_n=self.K).fit(series.values)
        return {u: est.copula(u, u) for u in (0.5, 1.0, 2.0)}

    def test_independent_components_estimate_near_zero(self):
        from paretolevy import IndependenceCopula
        diag = self._diagonal(IndependenceCopula(), seed=0, bvar=(0.5, 0.5))
        for u, val in diag.items():
            assert abs(val) <= 0.1, (u, val)

    def test_comonotone_jumps_estimate_near_reciprocal(self):
        from paretolevy import ComonotoneCopula
        diag = self._diagonal(ComonotoneCopula(), seed=0, bvar=(0.0, 0.0))
        for u, val in diag.items():
            assert val == pytest.approx(1.0 / u, abs=0.25 / u), (u, val)


class TestRoundTrip:
    def test_simulate_export_ingest_is_bit_exact(self, clayton_model):
        cfg = ProcessConfig(model=clayton_model, horizon=5.0,
                            brownian_variances=(0.5, 0.5), seed=11)
        series = sample_path_increments(cfg, EquidistantScheme(n=300, delta=5 / 300))
        table = prices_from_increments(series)
        return_path = table
        import tempfile
        with tempfile.TemporaryDirectory() as d:
            path = os.path.join(d, "ticks.csv")
            write_ticks(path, table)
            back = read_ticks(path)
        assert np.array_equal(back.times, table.times)
        assert np.array_equal(back.price1, table.price1)
        assert np.array_equal(back.price2, table.price2)
        s_direct = to_increments(table, k_n=5.0)
        s_csv = to_increments(back, k_n=5.0)
        assert np.array_equal(s_direct.values, s_csv.values)
        e1 = EmpiricalTailIntegral(k_n=5.0).fit(s_direct.values)
        e2 = EmpiricalTailIntegral(k_n=5.0).fit(s_csv.values)
        for u in (0.25, 0.5, 1.0):
            assert e1.copula(u, u) == e2.copula(u, u)

    def test_asynchronous_export(self, clayton_model):
        from paretolevy import AsynchronousScheme
        cfg = ProcessConfig(model=clayton_model, horizon=4.0, seed=1)
        sch = AsynchronousScheme(times1=np.linspace(0.5, 4.0, 8),
                                 times2=np.linspace(0.7, 4.0, 6))
        series = sample_path_increments(cfg, sch)
        table = prices_from_increments(series)
        assert np.isnan(table.price1).sum() > 0  # missing markers present
        back = to_increments(table, mode="asynchronous")
        assert back.values1 == pytest.approx(series.values1, rel=1e-9)


class TestCli:
    def test_simulate_then_estimate_matches_library(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "out"
        r = runner.invoke(main, ["--seed", "4", "--out-dir", str(out), "simulate",
                                 "--n", "400", "--k-n", "4.0", "--output", "ticks.csv"])
        assert r.exit_code == 0, r.output
        r = runner.invoke(main, ["--out-dir", str(out), "estimate",
                                 "--input", str(out / "ticks.csv"), "--k-n", "4.0",
                                 "--grid-steps", "4"])
        assert r.exit_code == 0, r.output
        # golden equivalence: rebuild the diagonal file through the library
        table = read_ticks(out / "ticks.csv")
        series = to_increments(table, k_n=4.0)
        grid = np.linspace(0.05, 1.5, 4)
        est = EmpiricalTailIntegral(k_n=4.0).fit(series.values)
        lines = (out / "plc_diagonals.csv").read_text().splitlines()[1:]
        got_pp = [float(line.split(",")[1]) for line in lines]
        want_pp = [est.copula(u, u) for u in grid]
        assert got_pp == want_pp
        surface = (out / "plc_surface_pp.csv").read_text().splitlines()
        assert surface[0] == "u1,u2,value"
        assert len(surface) == 1 + 16
        marg = (out / "marginal_tails.csv").read_text().splitlines()
        assert marg[0] == "x,tail1,tail2"

    def test_estimate_usage_errors(self, tmp_path):
        runner = CliRunner()
        p = write_csv(tmp_path / "t.csv", ["0.0,100,200", "1.0,101,201"])
        r = runner.invoke(main, ["estimate", "--input", p])
        assert r.exit_code == 2  # missing required --k-n
        r = runner.invoke(main, ["estimate", "--input", p, "--k-n", "-3"])
        assert r.exit_code == 2
        r = runner.invoke(main, ["estimate", "--input", p, "--k-n", "1",
                                 "--grid-min", "2", "--grid-max", "1"])
        assert r.exit_code == 2

    def test_mc_table_smoke(self, tmp_path):
        runner = CliRunner()
        r = runner.invoke(main, ["--out-dir", str(tmp_path), "mc-table", "3",
                                 "--reps", "3", "--n", "200"])
        assert r.exit_code == 0, r.output
        lines = (tmp_path / "mc_table3.csv").read_text().splitlines()
        assert len(lines) == 1 + 16

    def test_qq_command(self, tmp_path):
        runner = CliRunner()
        r = runner.invoke(main, ["--out-dir", str(tmp_path), "qq", "--reps", "40",
                                 "--n", "500", "--k-n", "5"])
        assert r.exit_code == 0, r.output
        assert "KS distance" in r.output
        files = [f for f in os.listdir(tmp_path) if f.startswith("qq_")]
        assert len(files) == 3

    def test_efficiency_command(self, tmp_path):
        runner = CliRunner()
        r = runner.invoke(main, ["--out-dir", str(tmp_path), "efficiency", "--grid-steps", "3"])
        assert r.exit_code == 0, r.output
        lines = (tmp_path / "relative_efficiency.csv").read_text().splitlines()
        assert len(lines) == 1 + 9

    def test_diagnose_scheme(self, tmp_path):
        runner = CliRunner()
        r = runner.invoke(main, ["diagnose-scheme", "--n", "22500", "--delta", str(1 / 225)])
        assert r.exit_code == 0, r.output
        doc = json.loads(r.output)
        assert doc["k_n"] == pytest.approx(100.0)
        assert doc["equidistant_bias"] == pytest.approx(10 / 225)
        r = runner.invoke(main, ["diagnose-scheme"])
        assert r.exit_code == 2

    def test_scheme_json_input(self, tmp_path):
        runner = CliRunner()
        sched = tmp_path / "scheme.json"
        sched.write_text('{"variant": "irregular", "times": [1.0, 2.0, 3.0]}')
        r = runner.invoke(main, ["diagnose-scheme", "--scheme-json", str(sched)])
        assert r.exit_code == 0, r.output
        assert json.loads(r.output)["k_n"] == 3.0
