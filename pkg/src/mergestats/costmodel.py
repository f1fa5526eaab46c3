"""Operation-count cost model for merge-versus-recompute decisions.

Every procedure is priced as a pair (additions, multiplications); together
with measured per-operation unit costs this yields predicted seconds and a
speedup factor tau = t_direct / t_pka.  tau above 1 predicts that updating
a statistic from prior summaries beats recomputing it from raw data.

The counts assume scalar arithmetic: subtractions count as additions,
divisions as multiplications, and unit costs are treated as machine
constants.  The benchmark harness exists to measure where that assumption
diverges from reality.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from statistics import median

__all__ = [
    "UnitCosts",
    "OpCount",
    "CostBreakdown",
    "CovarianceEffectiveness",
    "CalibrationError",
    "variance_op_counts",
    "predict_variance_times",
    "predict_ross_time",
    "ross_component_times",
    "covariance_op_counts",
    "covariance_time_difference",
    "covariance_effectiveness",
    "calibrate_unit_costs",
    "crossover_n1",
]


class CalibrationError(RuntimeError):
    """Raised when unit-cost measurement produces unusable numbers."""


@dataclass(frozen=True)
class UnitCosts:
    """Seconds per scalar addition (u_add) and multiplication (u_mul)."""

    u_add: float
    u_mul: float

    def __post_init__(self) -> None:
        for name, value in (("u_add", self.u_add), ("u_mul", self.u_mul)):
            if not math.isfinite(value) or value <= 0.0:
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class OpCount:
    """Number of additions and multiplications of one procedure."""

    adds: int
    muls: int

    def __post_init__(self) -> None:
        if self.adds < 0 or self.muls < 0:
            raise ValueError("operation counts must be nonnegative")

    def time(self, costs: UnitCosts) -> float:
        return self.adds * costs.u_add + self.muls * costs.u_mul


@dataclass(frozen=True)
class CostBreakdown:
    """Predicted seconds for the direct and merge paths, plus their ratio."""

    t_direct: float
    t_pka: float
    tau: float
    t_ross: float | None = None


@dataclass(frozen=True)
class CovarianceEffectiveness:
    """Decision record for merging covariance versus recomputing it.

    ``margin`` is the closed-form time difference (5*n1 + 3)*u_add +
    (14 - n1)*u_mul; the merge is declared effective when it is positive.
    When 5*u_add < u_mul the margin changes sign at ``threshold`` and is
    positive only for n1 below it.  ``universal_floor`` is a size beyond
    which the counts-table time difference favors the merge for every
    positive cost pair (sufficient, not tight).
    """

    effective: bool
    margin: float
    always_effective: bool
    threshold: float | None
    universal_floor: int = 15


def _check_sizes(n1: int, n2: int) -> None:
    if n1 < 1 or n2 < 1:
        raise ValueError(f"dataset sizes must be at least 1, got n1={n1}, n2={n2}")


def variance_op_counts(n1: int, n2: int) -> dict[str, OpCount]:
    """Addition/multiplication counts for each step of the variance paths.

    ``variance_direct`` prices a two-pass recomputation over all n1 + n2
    values; ``variance_merge`` prices summarizing only the new batch and
    folding it into the known prior summary.
    """
    _check_sizes(n1, n2)
    n = n1 + n2
    return {
        "variance_direct": OpCount(2 * n - 1, n),
        "variance_prior": OpCount(2 * n1 - 1, n1),
        "variance_batch": OpCount(2 * n2 - 1, n2),
        "mean_direct": OpCount(n - 1, 1),
        "mean_merge": OpCount(1, 3),
        "mean_prior": OpCount(n1 - 1, 1),
        "mean_batch": OpCount(n2 - 1, 1),
        "remainder_step": OpCount(5, 6),
        "remainder_step_sample": OpCount(7, 6),
        "remainder_total": OpCount(n + 2 * n2 + 3, n2 + 11),
        "variance_merge": OpCount(n + 2 * n2 + 3, n2 + 12),
        "sample_variance_merge": OpCount(n + 2 * n2 + 5, n2 + 12),
    }


def predict_variance_times(n1: int, n2: int, costs: UnitCosts, *, sample: bool = False) -> CostBreakdown:
    """Predicted direct and merge times for the variance of n1 + n2 values.

    With ``sample=True`` the merge path carries the two extra additions of
    the sample-variance correction, and ``t_ross`` reports the cost of
    folding the batch in one observation at a time (needs n1 >= 2).
    """
    _check_sizes(n1, n2)
    n = n1 + n2
    t_direct = costs.u_add * (2 * n - 1) + costs.u_mul * n
    extra_adds = 2 if sample else 0
    # the merge path is priced one multiplication above its counts-table row
    t_pka = costs.u_add * (n + 2 * n2 + 3 + extra_adds) + costs.u_mul * (n2 + 13)
    t_ross = predict_ross_time(n1, n2, costs) if sample and n1 >= 2 else None
    return CostBreakdown(t_direct=t_direct, t_pka=t_pka, tau=t_direct / t_pka, t_ross=t_ross)


def predict_ross_time(n1: int, n2: int, costs: UnitCosts) -> float:
    """Seconds to fold n2 single-observation updates into an existing sample variance."""
    if n1 < 2:
        raise ValueError("the single-sample recurrence needs an initial sample variance (n1 >= 2)")
    if n2 < 1:
        raise ValueError("at least one added observation is required")
    n = n1 + n2
    return costs.u_add * (n + 5 * n2 - 1) + costs.u_mul * (4 * n2 - 1)


def ross_component_times(n1: int, costs: UnitCosts) -> dict[str, float]:
    """Per-step times of the single-observation path.

    ``initial_mean`` prices the mean of the existing n1 values; the two
    update entries price one recurrence step each.
    """
    if n1 < 2:
        raise ValueError("the single-sample recurrence needs n1 >= 2")
    return {
        "initial_mean": (n1 - 1) * costs.u_add + costs.u_mul,
        "mean_update": 2 * costs.u_add + costs.u_mul,
        "variance_update": 4 * costs.u_add + 3 * costs.u_mul,
    }


def covariance_op_counts(n1: int, n2: int) -> dict[str, OpCount]:
    """Addition/multiplication counts for the covariance paths.

    ``covariance_merge`` is the total of the three update steps below it.
    """
    _check_sizes(n1, n2)
    n = n1 + n2
    return {
        "covariance_direct": OpCount(5 * n - 3, n + 3),
        "batch_stats": OpCount(5 * n2 - 3, n2 + 3),
        "mean_update": OpCount(2, 6),
        "covariance_update": OpCount(7, 8),
        "covariance_merge": OpCount(5 * n2 + 6, n2 + 17),
    }


def covariance_time_difference(n1: int, costs: UnitCosts) -> float:
    """Counts-table time saved by the covariance merge path; n2 cancels out.

    Equals time(covariance_direct) - time(covariance_merge) and is positive
    for every positive cost pair once n1 reaches 15.
    """
    if n1 < 1:
        raise ValueError(f"n1 must be at least 1, got {n1}")
    return (5 * n1 - 9) * costs.u_add + (n1 - 14) * costs.u_mul


def covariance_effectiveness(n1: int, costs: UnitCosts) -> CovarianceEffectiveness:
    """Closed-form check of whether the covariance merge is predicted to win."""
    if n1 < 1:
        raise ValueError(f"n1 must be at least 1, got {n1}")
    margin = (5 * n1 + 3) * costs.u_add + (14 - n1) * costs.u_mul
    always = 5 * costs.u_add >= costs.u_mul
    threshold = None
    if not always:
        # margin is decreasing in n1 here and positive exactly below this value
        threshold = (3 * costs.u_add + 14 * costs.u_mul) / (costs.u_mul - 5 * costs.u_add)
    return CovarianceEffectiveness(
        effective=margin > 0.0,
        margin=margin,
        always_effective=always,
        threshold=threshold,
    )


def _timed_loop(batch: int, op: str) -> float:
    # loop bodies are kept structurally minimal so the bare loop subtracts cleanly
    if op == "add":
        acc = 0.0
        step = 1.0000001
        t0 = time.perf_counter()
        for _ in range(batch):
            acc = acc + step
        t1 = time.perf_counter()
    elif op == "mul":
        acc = 1.0
        step = 1.0000000001
        t0 = time.perf_counter()
        for _ in range(batch):
            acc = acc * step
        t1 = time.perf_counter()
    else:
        acc = 0.0
        t0 = time.perf_counter()
        for _ in range(batch):
            pass
        t1 = time.perf_counter()
    if acc == math.inf:
        raise CalibrationError("calibration accumulator overflowed")
    return t1 - t0


def calibrate_unit_costs(trials: int, batch: int) -> UnitCosts:
    """Measure per-operation add and multiply times on this machine.

    Each trial times a bare loop, an addition loop, and a multiplication
    loop of ``batch`` iterations; per-operation times are the loop-overhead
    corrected medians across trials.  The accumulators are kept live so the
    interpreter cannot drop the work.
    """
    if trials < 3:
        raise ValueError("calibration needs at least 3 trials")
    if batch < 10_000:
        raise ValueError("calibration needs a batch of at least 10000 operations")
    add_times: list[float] = []
    mul_times: list[float] = []
    _timed_loop(batch, "add")  # warm-up
    for _ in range(trials):
        overhead = _timed_loop(batch, "pass")
        add_times.append((_timed_loop(batch, "add") - overhead) / batch)
        mul_times.append((_timed_loop(batch, "mul") - overhead) / batch)
    u_add = median(add_times)
    u_mul = median(mul_times)
    if u_add <= 0.0 or u_mul <= 0.0:
        raise CalibrationError(
            f"overhead-corrected times are nonpositive (u_add={u_add:.3g}, u_mul={u_mul:.3g}); "
            "the timed loops did not do measurable work"
        )
    return UnitCosts(u_add=u_add, u_mul=u_mul)


def crossover_n1(n2: int, costs: UnitCosts, *, limit: int = 10**12) -> int | None:
    """Smallest n1 whose predicted speedup factor exceeds 1, or None within ``limit``.

    t_direct - t_pka is strictly increasing in n1, so the sign change is
    found by bisection.
    """
    if n2 < 1:
        raise ValueError(f"n2 must be at least 1, got {n2}")

    def advantage(n1: int) -> float:
        breakdown = predict_variance_times(n1, n2, costs)
        return breakdown.t_direct - breakdown.t_pka

    if advantage(1) > 0.0:
        return 1
    if advantage(limit) <= 0.0:
        return None
    lo, hi = 1, limit
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if advantage(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    return hi
