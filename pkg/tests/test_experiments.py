import math

import numpy as np
import pytest

from dualgraph.errors import InputError
from dualgraph.experiments import (
    SPLIT_SCHEMA,
    SWEEP_SCHEMA,
    RegressionFit,
    SweepConfig,
    analyze_row,
    loglog_fit,
    model_sweep,
    spanning_constant_sweep,
    splittability_sweep,
)
from dualgraph.graph import Graph
from dualgraph.models import parse_model_spec, resolve_model, square_grid


class TestLogLogFit:
    def test_exactly_collinear(self):
        samples = [(n, 4.0 / n) for n in (10, 20, 40, 80)]
        fit = loglog_fit(samples)
        assert fit.slope == pytest.approx(-1.0, abs=1e-12)
        assert fit.intercept == pytest.approx(math.log(4.0), abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.n_points == 4

    def test_rescaling_p_shifts_only_intercept(self):
        rng = np.random.default_rng(2)
        samples = [(float(n), float(p)) for n, p in
                   zip(rng.uniform(10, 500, 12), rng.uniform(0.001, 0.9, 12))]
        base = loglog_fit(samples)
        scaled = loglog_fit([(n, 7.5 * p) for n, p in samples])
        assert scaled.slope == pytest.approx(base.slope, abs=1e-12)
        assert scaled.intercept == pytest.approx(
            base.intercept + math.log(7.5), abs=1e-10
        )
        assert scaled.r_squared == pytest.approx(base.r_squared, abs=1e-9)

    def test_nonpositive_sample_named(self):
        with pytest.raises(InputError, match="sample 1"):
            loglog_fit([(10, 0.5), (20, 0.0)])

    def test_too_few_samples(self):
        with pytest.raises(InputError, match="2 samples"):
            loglog_fit([(10, 0.5)])


class TestAnalyzeRow:
    def test_k4_row(self):
        g = Graph(range(4), [(i, j) for i in range(4) for j in range(i + 1, 4)])
        row = analyze_row(g, "k4")
        assert row["graph"] == "k4"
        assert row["n"] == 4 and row["m"] == 6
        assert row["connected"] is True and row["planar"] is True
        assert row["ln_st"] == pytest.approx(math.log(16))
        assert row["st_constant"] == pytest.approx(math.log(16) / 4)

    def test_disconnected_uses_largest_component(self):
        g = Graph(range(6), [(0, 1), (1, 2), (0, 2), (3, 4)])
        row = analyze_row(g, "x")
        assert row["connected"] is False
        assert row["ln_st"] == pytest.approx(math.log(3))  # triangle component


class TestModelSweep:
    def test_degenerate_config_one_row(self):
        config = SweepConfig(models=("3",), sizes=(30,), seeds_per_size=1,
                             master_seed=1)
        rows = model_sweep(config)
        assert len(rows) == 1
        assert set(rows[0]) == set(SWEEP_SCHEMA)
        assert rows[0]["planar_rate"] == 1.0
        assert rows[0]["errors"] == 0

    def test_deterministic(self):
        config = SweepConfig(models=("2", "3"), sizes=(25, 40), seeds_per_size=2,
                             master_seed=9)
        assert model_sweep(config) == model_sweep(config)

    def test_rows_echo_spec_text(self):
        config = SweepConfig(models=("11c",), sizes=(30,), seeds_per_size=1)
        rows = model_sweep(config)
        assert rows[0]["model"] == resolve_model("11c").text()

    def test_thread_count_does_not_change_results(self, monkeypatch):
        config = SweepConfig(models=("3",), sizes=(25, 36), seeds_per_size=2,
                             master_seed=4)
        monkeypatch.setenv("DUALGRAPH_THREADS", "1")
        serial = model_sweep(config)
        monkeypatch.setenv("DUALGRAPH_THREADS", "4")
        threaded = model_sweep(config)
        assert serial == threaded


class TestSplittabilitySweep:
    def test_rows_and_fit(self):
        config = SweepConfig(models=("3",), sizes=(24, 48), seeds_per_size=2,
                             k_values=(2,), target_successes=40, master_seed=3,
                             estimator="both")
        rows, fits = splittability_sweep(config)
        assert len(rows) == 2 * 2 * 2  # sizes x seeds x estimators
        assert set(rows[0]) == set(SPLIT_SCHEMA)
        assert fits[2] is not None
        assert fits[2].n_points == 4

    def test_small_graphs_excluded(self):
        g_small = Graph(range(4), [(0, 1), (1, 2), (2, 3)])
        g_big = square_grid(4, 4)
        config = SweepConfig(models=("3",), k_values=(2,), target_successes=10,
                             master_seed=1, estimator="ratio")
        rows, fits = splittability_sweep(
            config, graphs=[("tiny", g_small), ("grid", g_big)]
        )
        labels = {row["graph"] for row in rows}
        assert labels == {"grid"}  # 4 < 4k for k=2

    def test_trial_cap_row_has_empty_p_hat(self):
        star = Graph(range(5), [(0, i) for i in range(1, 5)])
        big_star = Graph(range(9), [(0, i) for i in range(1, 9)])
        config = SweepConfig(models=("3",), k_values=(2,), target_successes=5,
                             master_seed=1, trial_cap=50, estimator="ratio")
        rows, fits = splittability_sweep(config, graphs=[("star", big_star)])
        assert len(rows) == 1
        assert rows[0]["p_hat"] == ""
        assert rows[0]["trials"] == 50
        assert fits[2] is None


class TestSpanningConstantSweep:
    def test_grid_curves(self):
        sq = parse_model_spec("square:grid(2,2)")
        rows = spanning_constant_sweep([sq], sizes=(16, 64), seeds_per_size=1)
        assert [row["n"] for row in rows] == [16, 64]
        assert rows[0]["st_constant"] < rows[1]["st_constant"] < 1.1662

    def test_tree_has_zero_constant(self):
        path = parse_model_spec("p:grid(1,9)")
        rows = spanning_constant_sweep([path], sizes=(9,), seeds_per_size=1)
        assert abs(rows[0]["ln_st"]) < 1e-12
        assert abs(rows[0]["st_constant"]) < 1e-12

    def test_schema(self):
        rows = spanning_constant_sweep([resolve_model("3")], sizes=(30,))
        assert list(rows[0]) == ["model", "n", "ln_st", "st_constant"]
