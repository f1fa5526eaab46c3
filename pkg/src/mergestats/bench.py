"""Timing harness: direct recomputation versus summary merging over a size grid.

Each cell generates two datasets from a seed, then times (a) a two-pass
variance over the concatenation and (b) summarizing only the second
dataset and merging it into the prebuilt summary of the first, which is
the merge path's premise: the prior summary is already known.  Values from
both paths must agree; timings are medians over trials with one discarded
warm-up pass.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from pathlib import Path
from statistics import median
from typing import Sequence, TextIO

import numpy as np

from .costmodel import UnitCosts, calibrate_unit_costs, predict_variance_times
from .summaries import MomentSummary, merge_population

__all__ = [
    "BenchConfig",
    "BenchRecord",
    "DESK_GRID",
    "FULL_GRID",
    "CSV_HEADER",
    "run_cell",
    "run_grid",
    "emit_csv",
    "kendall_tau",
]

DESK_GRID = (1_000, 3_000, 10_000, 30_000, 100_000)
FULL_GRID = (10_000, 31_623, 100_000, 316_228, 1_000_000)

CSV_HEADER = (
    "n1,n2,t_direct_measured,t_pka_measured,t_direct_model,t_pka_model,"
    "value_direct,value_pka,tau_measured,tau_model"
)

_DISTRIBUTIONS = ("uniform", "normal")


@dataclass
class BenchConfig:
    """Grid axes and measurement settings for a benchmark run."""

    n1_values: tuple[int, ...] = DESK_GRID
    n2_values: tuple[int, ...] = DESK_GRID
    trials: int = 30
    seed: int = 8086
    distribution: str = "uniform"
    max_cell_elements: int = 50_000_000

    def __post_init__(self) -> None:
        self.n1_values = tuple(int(v) for v in self.n1_values)
        self.n2_values = tuple(int(v) for v in self.n2_values)
        if not self.n1_values or not self.n2_values:
            raise ValueError("grid axes must be nonempty")
        if any(v < 2 for v in self.n1_values + self.n2_values):
            raise ValueError("grid sizes must be at least 2")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.distribution not in _DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {_DISTRIBUTIONS}")


@dataclass(frozen=True)
class BenchRecord:
    """One grid cell: measured and model-predicted seconds plus both values."""

    n1: int
    n2: int
    t_direct_measured: float
    t_pka_measured: float
    t_direct_model: float
    t_pka_model: float
    value_direct: float
    value_pka: float


def _generate(rng: np.random.Generator, size: int, distribution: str) -> np.ndarray:
    if distribution == "uniform":
        return rng.uniform(-1.0, 1.0, size)
    return rng.standard_normal(size)


def _array_summary(values: np.ndarray) -> MomentSummary:
    # two-pass definition, vectorized: mean first, then squared deviations
    mean = float(values.mean())
    m2 = float(((values - mean) ** 2).sum())
    return MomentSummary(values.size, mean, m2)


def run_cell(
    n1: int,
    n2: int,
    trials: int,
    seed: int,
    *,
    distribution: str = "uniform",
    costs: UnitCosts | None = None,
    max_elements: int = 50_000_000,
) -> BenchRecord:
    """Time one (n1, n2) cell; model columns are NaN unless costs are given."""
    if n1 < 2 or n2 < 2:
        raise ValueError("cell sizes must be at least 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if n1 + n2 > max_elements:
        raise ValueError(f"cell n1={n1}, n2={n2} exceeds the {max_elements}-element memory budget")
    if distribution not in _DISTRIBUTIONS:
        raise ValueError(f"distribution must be one of {_DISTRIBUTIONS}")

    rng = np.random.default_rng((seed, n1, n2))
    d1 = _generate(rng, n1, distribution)
    d2 = _generate(rng, n2, distribution)
    combined = np.concatenate((d1, d2))
    prior = _array_summary(d1)

    direct_times: list[float] = []
    pka_times: list[float] = []
    value_direct = value_pka = 0.0
    for trial in range(trials + 1):
        t0 = time.perf_counter()
        direct = _array_summary(combined)
        value_direct = direct.population_variance()
        t1 = time.perf_counter()

        t2 = time.perf_counter()
        batch = _array_summary(d2)
        merged = merge_population(prior, batch)
        value_pka = merged.population_variance()
        t3 = time.perf_counter()
        if trial > 0:  # first pass warms caches and is discarded
            direct_times.append(t1 - t0)
            pka_times.append(t3 - t2)

    gap = abs(value_direct - value_pka) / max(abs(value_direct), 1e-12)
    if gap > 1e-9:
        raise RuntimeError(
            f"paths disagree at n1={n1}, n2={n2}: direct={value_direct!r}, merged={value_pka!r}"
        )

    if costs is not None:
        model = predict_variance_times(n1, n2, costs)
        t_direct_model, t_pka_model = model.t_direct, model.t_pka
    else:
        t_direct_model = t_pka_model = float("nan")

    return BenchRecord(
        n1=n1,
        n2=n2,
        t_direct_measured=median(direct_times),
        t_pka_measured=median(pka_times),
        t_direct_model=t_direct_model,
        t_pka_model=t_pka_model,
        value_direct=value_direct,
        value_pka=value_pka,
    )


def run_grid(config: BenchConfig, costs: UnitCosts | None = None) -> list[BenchRecord]:
    """Run every (n1, n2) cell in row-major order, reporting progress on stderr."""
    if costs is None:
        costs = calibrate_unit_costs(5, 50_000)
    records: list[BenchRecord] = []
    total = len(config.n1_values) * len(config.n2_values)
    for n1 in config.n1_values:
        for n2 in config.n2_values:
            try:
                record = run_cell(
                    n1,
                    n2,
                    config.trials,
                    config.seed,
                    distribution=config.distribution,
                    costs=costs,
                    max_elements=config.max_cell_elements,
                )
            except Exception as exc:
                raise RuntimeError(f"grid cell n1={n1}, n2={n2} failed: {exc}") from exc
            records.append(record)
            print(f"[bench] cell {len(records)}/{total} n1={n1} n2={n2} done", file=sys.stderr)
    return records


def _format_row(record: BenchRecord) -> str:
    tau_measured = record.t_direct_measured / record.t_pka_measured
    tau_model = record.t_direct_model / record.t_pka_model
    floats = (
        record.t_direct_measured,
        record.t_pka_measured,
        record.t_direct_model,
        record.t_pka_model,
        record.value_direct,
        record.value_pka,
        tau_measured,
        tau_model,
    )
    return ",".join([str(record.n1), str(record.n2)] + [format(v, ".9g") for v in floats])


def emit_csv(records: Sequence[BenchRecord], destination: str | Path | TextIO) -> None:
    """Write records as CSV (9 significant digits) to a path or file object."""
    if not records:
        raise ValueError("no records to write")
    text = "\n".join([CSV_HEADER] + [_format_row(r) for r in records]) + "\n"
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text, encoding="utf-8")


def kendall_tau(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Plain pairwise Kendall rank correlation; +1 means fully concordant."""
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    if len(xs) < 2:
        raise ValueError("need at least two points")
    score = 0
    total = 0
    for i in range(len(xs)):
        for j in range(i + 1, len(xs)):
            dx = (xs[i] > xs[j]) - (xs[i] < xs[j])
            dy = (ys[i] > ys[j]) - (ys[i] < ys[j])
            score += dx * dy
            total += 1
    return score / total
