"""Benchmark cells, grids, and CSV output."""

import csv
import io
import math

import pytest

from conftest import assert_close, rel_gap
from mergestats.bench import (
    CSV_HEADER,
    BenchConfig,
    BenchRecord,
    emit_csv,
    kendall_tau,
    run_cell,
    run_grid,
)
from mergestats.costmodel import UnitCosts, predict_variance_times

UNIT = UnitCosts(1e-8, 1e-8)


class TestBenchConfig:
    def test_defaults_are_valid(self):
        config = BenchConfig()
        assert len(config.n1_values) == 5

    def test_rejects_empty_axis(self):
        with pytest.raises(ValueError):
            BenchConfig(n1_values=(), n2_values=(10,))

    def test_rejects_tiny_sizes(self):
        with pytest.raises(ValueError):
            BenchConfig(n1_values=(1,), n2_values=(10,))

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            BenchConfig(n1_values=(10,), n2_values=(10,), trials=0)

    def test_rejects_unknown_distribution(self):
        with pytest.raises(ValueError):
            BenchConfig(n1_values=(10,), n2_values=(10,), distribution="cauchy")


class TestRunCell:
    def test_minimal_cell(self):
        record = run_cell(2, 2, trials=1, seed=1)
        assert record.n1 == 2 and record.n2 == 2
        assert rel_gap(record.value_direct, record.value_pka) <= 1e-9
        assert record.t_direct_measured > 0.0
        assert record.t_pka_measured > 0.0
        assert math.isnan(record.t_direct_model)

    def test_values_are_seed_deterministic(self):
        a = run_cell(50, 60, trials=2, seed=42)
        b = run_cell(50, 60, trials=2, seed=42)
        assert a.value_direct == b.value_direct
        assert a.value_pka == b.value_pka
        c = run_cell(50, 60, trials=2, seed=43)
        assert c.value_direct != a.value_direct

    def test_model_columns_from_costs(self):
        record = run_cell(100, 200, trials=1, seed=1, costs=UNIT)
        model = predict_variance_times(100, 200, UNIT)
        assert record.t_direct_model == model.t_direct
        assert record.t_pka_model == model.t_pka

    def test_normal_distribution_variance_near_one(self):
        record = run_cell(5000, 5000, trials=1, seed=3, distribution="normal")
        assert abs(record.value_direct - 1.0) < 0.1

    def test_memory_budget_rejected(self):
        with pytest.raises(ValueError):
            run_cell(1000, 1000, trials=1, seed=1, max_elements=1999)

    def test_rejects_tiny_sizes(self):
        with pytest.raises(ValueError):
            run_cell(1, 5, trials=1, seed=1)


class TestRunGrid:
    def test_row_major_order_and_model_columns(self):
        config = BenchConfig(n1_values=(10, 20), n2_values=(30, 40), trials=2, seed=5)
        records = run_grid(config, costs=UNIT)
        assert [(r.n1, r.n2) for r in records] == [(10, 30), (10, 40), (20, 30), (20, 40)]
        for record in records:
            assert not math.isnan(record.t_direct_model)

    def test_failing_cell_names_itself(self):
        config = BenchConfig(n1_values=(10,), n2_values=(3000,), trials=1, max_cell_elements=2000)
        with pytest.raises(RuntimeError, match="n1=10, n2=3000"):
            run_grid(config, costs=UNIT)


class TestEmitCsv:
    def _records(self):
        config = BenchConfig(n1_values=(10, 20), n2_values=(30,), trials=2, seed=5)
        return run_grid(config, costs=UNIT)

    def test_header_and_row_count(self, tmp_path):
        records = self._records()
        out = tmp_path / "bench.csv"
        emit_csv(records, out)
        lines = out.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == len(records) + 1

    def test_round_trip_reproduces_records(self):
        records = self._records()
        buffer = io.StringIO()
        emit_csv(records, buffer)
        buffer.seek(0)
        rows = list(csv.DictReader(buffer))
        assert len(rows) == len(records)
        for row, record in zip(rows, records):
            assert int(row["n1"]) == record.n1
            assert int(row["n2"]) == record.n2
            for name in (
                "t_direct_measured",
                "t_pka_measured",
                "t_direct_model",
                "t_pka_model",
                "value_direct",
                "value_pka",
            ):
                assert_close(float(row[name]), getattr(record, name), rel=1e-8, floor=1e-15, label=name)

    def test_tau_column_recomputable_from_row(self):
        buffer = io.StringIO()
        emit_csv(self._records(), buffer)
        buffer.seek(0)
        for row in csv.DictReader(buffer):
            recomputed = float(row["t_direct_measured"]) / float(row["t_pka_measured"])
            assert_close(float(row["tau_measured"]), recomputed, rel=1e-6, floor=1e-12)
            recomputed_model = float(row["t_direct_model"]) / float(row["t_pka_model"])
            assert_close(float(row["tau_model"]), recomputed_model, rel=1e-6, floor=1e-12)

    def test_rejects_empty_records(self):
        with pytest.raises(ValueError):
            emit_csv([], io.StringIO())


class TestKendallTau:
    def test_perfect_concordance(self):
        assert kendall_tau([1, 2, 3, 4], [10, 20, 30, 40]) == 1.0

    def test_perfect_discordance(self):
        assert kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0

    def test_mixed(self):
        assert kendall_tau([1, 2, 3], [1, 3, 2]) == pytest.approx(1.0 / 3.0)

    def test_rejects_mismatched_lengths(self):
        with pytest.raises(ValueError):
            kendall_tau([1, 2], [1])
        with pytest.raises(ValueError):
            kendall_tau([1], [1])
