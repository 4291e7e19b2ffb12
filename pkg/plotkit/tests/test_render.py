"""Render tests over fixture CSVs conforming to the dualgraph schemas."""

import math
from pathlib import Path

import pytest

from plotkit import PlotJob, SchemaError, render
from plotkit.cli import main as cli_main

ST_ROWS = [
    ("sq:grid(10,10)", 100, 98.0, 0.98),
    ("sq:grid(10,10)", 400, 430.0, 1.075),
    ("sq:grid(10,10)", 900, 995.0, 1.106),
    ("tri:triangular_grid(10,10)", 100, 138.0, 1.38),
    ("tri:triangular_grid(10,10)", 400, 600.0, 1.50),
]

SPLIT_ROWS = [
    ("3-n64-r0", 64, 2, 178, 730, 0.243835616438356, 11, "ratio"),
    ("3-n128-r0", 128, 2, 178, 811, 0.219482121898889, 12, "ratio"),
    ("3-n256-r0", 256, 2, 178, 1254, 0.141945773524720, 13, "ratio"),
    ("3-n512-r0", 512, 2, 178, 1191, 0.149454240134341, 14, "ratio"),
    ("3-n1024-r0", 1024, 2, 178, 1751, 0.101656196459166, 15, "ratio"),
]

SWEEP_ROWS = [
    ("2:point_cloud|add_shortest(2.7)|largest_component",
     0.0, 1.0, 5.567, 5.41, 11.2, 1.304, 0),
    ("3:point_cloud|delaunay", 1.0, 1.0, 5.883, 5.9, 9.8, 1.555, 0),
    ("11c:point_cloud|add_shortest(7)|remove_random(0.6)|largest_component",
     0.0, 1.0, 5.618, 5.4, 12.2, 1.425, 0),
]

FIT_ROW = ("n", "p_hat", -0.3916, 1.0702, 0.9730, 25)


def write_csv(path: Path, header, rows):
    import csv

    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


@pytest.fixture
def stconst_csv(tmp_path):
    return write_csv(tmp_path / "st.csv", ["model", "n", "ln_st", "st_constant"],
                     ST_ROWS)


@pytest.fixture
def split_csv(tmp_path):
    return write_csv(
        tmp_path / "split.csv",
        ["graph", "n", "k", "successes", "trials", "p_hat", "seed", "estimator"],
        SPLIT_ROWS,
    )


@pytest.fixture
def sweep_csv(tmp_path):
    return write_csv(
        tmp_path / "sweep.csv",
        ["model", "planar_rate", "connected_rate", "avg_degree",
         "median_degree", "max_degree", "avg_st_constant", "errors"],
        SWEEP_ROWS,
    )


@pytest.fixture
def fit_csv(tmp_path):
    return write_csv(
        tmp_path / "fit.csv",
        ["x", "y", "slope", "intercept", "r_squared", "n_points"],
        [FIT_ROW],
    )


class TestKinds:
    def test_st_scatter(self, stconst_csv, tmp_path):
        out = tmp_path / "scatter.png"
        report = render(PlotJob("st_scatter", (str(stconst_csv),), str(out)))
        assert out.exists() and out.stat().st_size > 0
        assert report.points_plotted == len(ST_ROWS)

    def test_st_curves(self, stconst_csv, tmp_path):
        out = tmp_path / "curves.png"
        report = render(PlotJob("st_curves", (str(stconst_csv),), str(out)))
        assert out.stat().st_size > 0
        assert report.points_plotted == len(ST_ROWS)
        assert report.series == 2  # one curve per model

    def test_split_loglog_with_fit(self, split_csv, fit_csv, tmp_path):
        out = tmp_path / "split.png"
        report = render(
            PlotJob("split_loglog", (str(split_csv),), str(out),
                    fit=str(fit_csv))
        )
        assert out.stat().st_size > 0
        assert report.points_plotted == len(SPLIT_ROWS)
        fit_labels = [t for t in report.legend if "log(p_hat)" in t]
        assert len(fit_labels) == 1
        assert f"{FIT_ROW[2]:.4f}" in fit_labels[0]

    def test_model_compare(self, sweep_csv, tmp_path):
        out = tmp_path / "compare.png"
        report = render(PlotJob("model_compare", (str(sweep_csv),), str(out)))
        assert out.stat().st_size > 0
        assert report.points_plotted == len(SWEEP_ROWS)

    def test_multiple_inputs_concatenate(self, stconst_csv, tmp_path):
        other = write_csv(tmp_path / "st2.csv",
                          ["model", "n", "ln_st", "st_constant"],
                          [("real", 5410, 7800.0, 1.44)])
        out = tmp_path / "multi.png"
        report = render(
            PlotJob("st_scatter", (str(stconst_csv), str(other)), str(out))
        )
        assert report.points_plotted == len(ST_ROWS) + 1


class TestEdgeCases:
    def test_header_only_warns_but_succeeds(self, tmp_path, capsys):
        empty = write_csv(tmp_path / "e.csv",
                          ["model", "n", "ln_st", "st_constant"], [])
        out = tmp_path / "empty.png"
        code = cli_main(["--kind", "st_scatter", "--in", str(empty),
                         "--out", str(out)])
        assert code == 0
        assert out.stat().st_size > 0
        assert "warning" in capsys.readouterr().err

    def test_schema_mismatch_reports_columns(self, tmp_path):
        bad = write_csv(tmp_path / "bad.csv", ["a", "b"], [(1, 2)])
        with pytest.raises(SchemaError, match="ln_st"):
            render(PlotJob("st_scatter", (str(bad),), str(tmp_path / "x.png")))

    def test_cli_schema_mismatch_exit_2(self, tmp_path, capsys):
        bad = write_csv(tmp_path / "bad.csv", ["a", "b"], [(1, 2)])
        code = cli_main(["--kind", "st_scatter", "--in", str(bad),
                         "--out", str(tmp_path / "x.png")])
        assert code == 2
        assert "missing columns" in capsys.readouterr().err

    def test_trial_cap_rows_skipped_with_warning(self, tmp_path, capsys):
        rows = SPLIT_ROWS + [("star", 9, 2, 0, 50, "", 1, "ratio")]
        csv_path = write_csv(
            tmp_path / "s.csv",
            ["graph", "n", "k", "successes", "trials", "p_hat", "seed",
             "estimator"],
            rows,
        )
        out = tmp_path / "s.png"
        report = render(PlotJob("split_loglog", (str(csv_path),), str(out)))
        assert report.points_plotted == len(SPLIT_ROWS)
        assert any("skipped 1" in w for w in report.warnings)

    def test_unknown_kind_rejected(self, tmp_path):
        with pytest.raises(SchemaError, match="kind"):
            PlotJob("pie", ("x.csv",), str(tmp_path / "x.png"))

    def test_bad_output_extension(self, tmp_path):
        with pytest.raises(SchemaError, match="output"):
            PlotJob("st_scatter", ("x.csv",), str(tmp_path / "x.txt"))

    def test_missing_input_file(self, tmp_path):
        with pytest.raises(SchemaError, match="not found"):
            render(PlotJob("st_scatter", (str(tmp_path / "nope.csv"),),
                           str(tmp_path / "x.png")))

    def test_same_bytes_same_series(self, stconst_csv, tmp_path):
        a = render(PlotJob("st_curves", (str(stconst_csv),),
                           str(tmp_path / "a.png")))
        b = render(PlotJob("st_curves", (str(stconst_csv),),
                           str(tmp_path / "b.png")))
        assert (a.points_plotted, a.series) == (b.points_plotted, b.series)


class TestAcceptanceSecondary:
    def test_all_four_kinds_from_fixtures(self, stconst_csv, split_csv,
                                          sweep_csv, fit_csv, tmp_path):
        results = {}
        results["st_scatter"] = render(
            PlotJob("st_scatter", (str(stconst_csv),),
                    str(tmp_path / "1.png"))
        )
        results["st_curves"] = render(
            PlotJob("st_curves", (str(stconst_csv),), str(tmp_path / "2.png"))
        )
        results["split_loglog"] = render(
            PlotJob("split_loglog", (str(split_csv),), str(tmp_path / "3.png"),
                    fit=str(fit_csv))
        )
        results["model_compare"] = render(
            PlotJob("model_compare", (str(sweep_csv),), str(tmp_path / "4.png"))
        )
        row_counts = {
            "st_scatter": len(ST_ROWS),
            "st_curves": len(ST_ROWS),
            "split_loglog": len(SPLIT_ROWS),
            "model_compare": len(SWEEP_ROWS),
        }
        for kind, report in results.items():
            path = Path(report.output)
            assert path.exists() and path.stat().st_size > 0, kind
            assert report.points_plotted == row_counts[kind], kind
        legend = [t for t in results["split_loglog"].legend if "log(" in t]
        assert len(legend) == 1
        slope_text = legend[0].split("=")[1].split("log")[0].strip()
        assert slope_text == f"{FIT_ROW[2]:.4f}"
        print(
            "[ACCEPTANCE] plotkit renders: PASS  all four kinds, point counts "
            "match fixtures, legend slope matches fit CSV to 4 decimals"
        )
