import numpy as np
import pytest

from xorcrowd.harness import ResultRow, write_csv
from xorcrowd.report import plot_csv_files, plot_error_curves


def rows_at(budgets, fers):
    return [
        ResultRow(b, b / 100.0, f, f / 4.0, 16, 0.0) for b, f in zip(budgets, fers)
    ]


class TestPlotErrorCurves:
    def test_writes_png(self, tmp_path):
        out = tmp_path / "curves.png"
        got = plot_error_curves({"sweep": rows_at([50, 100, 200], [0.9, 0.4, 0.05])}, out)
        assert got == str(out)
        data = out.read_bytes()
        assert data[:4] == b"\x89PNG" and len(data) > 1000

    def test_multiple_series_and_title(self, tmp_path):
        out = tmp_path / "two.png"
        series = {
            "fast": rows_at([50, 100], [0.8, 0.1]),
            "slow": rows_at([50, 100], [0.95, 0.6]),
        }
        plot_error_curves(series, out, title="comparison")
        assert out.stat().st_size > 0

    def test_zero_rates_survive_log_axis(self, tmp_path):
        out = tmp_path / "zeros.png"
        plot_error_curves({"s": rows_at([50, 100, 200], [1.0, 0.5, 0.0])}, out)
        assert out.read_bytes()[:4] == b"\x89PNG"

    def test_absolute_axis_when_unnormalized(self, tmp_path):
        rows = [ResultRow(100, float("nan"), 0.5, 0.1, 8, 0.0)]
        out = tmp_path / "abs.png"
        plot_error_curves({"s": rows}, out)
        assert out.read_bytes()[:4] == b"\x89PNG"

    def test_empty_series_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            plot_error_curves({}, tmp_path / "x.png")
        with pytest.raises(ValueError):
            plot_error_curves({"s": []}, tmp_path / "x.png")


class TestPlotCsvFiles:
    def test_labels_default_to_stems(self, tmp_path):
        p1 = tmp_path / "alpha.csv"
        p2 = tmp_path / "beta.csv"
        write_csv(rows_at([50, 100], [0.8, 0.2]), p1)
        write_csv(rows_at([50, 100], [0.9, 0.3]), p2)
        out = tmp_path / "joint.png"
        assert plot_csv_files([p1, p2], out) == str(out)
        assert out.read_bytes()[:4] == b"\x89PNG"

    def test_label_count_must_match(self, tmp_path):
        p1 = tmp_path / "only.csv"
        write_csv(rows_at([50], [0.5]), p1)
        with pytest.raises(ValueError):
            plot_csv_files([p1], tmp_path / "x.png", labels=["a", "b"])