"""Mergeable moment summaries for mean, variance, and covariance.

A summary keeps the observation count, the mean, and a centered second
moment: the sum of squared deviations from the mean, which is ``n`` times
the population variance.  Stored this way, the summary of two concatenated
datasets is a cheap closed-form combination of the two part summaries, so
the statistics of a growing dataset can be updated from prior results
instead of being recomputed from raw data.

``summarize`` and ``summarize_pairs`` are deliberately plain two-pass
implementations (mean first, then deviations); they double as the
reference oracle in the test suite.

Summaries are immutable values and every merge is a pure function, so they
are safe to ship between threads and to combine in any reduction tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "MomentSummary",
    "CovarianceSummary",
    "RemainderReport",
    "summarize",
    "summarize_pairs",
    "merge_population",
    "merge_sample",
    "merge_covariance",
    "remainder_population",
    "remainder_sample",
    "ross_update",
]

# Cancellation can leave a stored second moment at a tiny negative value;
# anything worse than this (relative to the data magnitude) is corruption.
_CLAMP_REL = 1e-12


def _nonnegative_m2(m2: float, n: int, mean: float) -> float:
    if m2 >= 0.0:
        return m2
    scale = max(n * mean * mean, 1.0)
    if -m2 <= _CLAMP_REL * scale:
        return 0.0
    raise ValueError(f"second moment {m2!r} is negative beyond rounding noise")


@dataclass(frozen=True, slots=True)
class MomentSummary:
    """Count, mean, and sum of squared deviations of one variable.

    The default instance (``n == 0``) is the identity element under merge.
    """

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("count must be nonnegative")
        if self.n == 0 and (self.mean != 0.0 or self.m2 != 0.0):
            raise ValueError("the empty summary must have zero mean and m2")

    @classmethod
    def from_stats(cls, n: int, mean: float, population_variance: float) -> "MomentSummary":
        """Build a summary from a count, mean, and population variance."""
        return cls(n, mean, n * population_variance)

    def population_variance(self) -> float:
        """m2 / n; defined for n >= 1."""
        if self.n < 1:
            raise ValueError("population variance needs at least one observation")
        return _nonnegative_m2(self.m2, self.n, self.mean) / self.n

    def sample_variance(self) -> float:
        """m2 / (n - 1); defined for n >= 2."""
        if self.n < 2:
            raise ValueError("sample variance needs at least two observations")
        return _nonnegative_m2(self.m2, self.n, self.mean) / (self.n - 1)


@dataclass(frozen=True, slots=True)
class CovarianceSummary:
    """Count, per-coordinate means, and summed cross-deviations of paired data.

    ``c2`` is the sum of (x - mean_x) * (y - mean_y), i.e. ``n`` times the
    population covariance.  The default instance is the merge identity.
    """

    n: int = 0
    mean_x: float = 0.0
    mean_y: float = 0.0
    c2: float = 0.0

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("count must be nonnegative")
        if self.n == 0 and (self.mean_x != 0.0 or self.mean_y != 0.0 or self.c2 != 0.0):
            raise ValueError("the empty summary must have zero means and c2")

    def covariance(self) -> float:
        """c2 / n; defined for n >= 1."""
        if self.n < 1:
            raise ValueError("covariance needs at least one observation pair")
        return self.c2 / self.n


@dataclass(frozen=True, slots=True)
class RemainderReport:
    """How much a statistic moved when new data was merged in.

    ``merged`` is the updated statistic; ``remainder`` is the difference
    against the original, so original + remainder recovers ``merged`` up to
    one rounding step at the larger magnitude.
    """

    remainder: float
    merged: float


def summarize(data: Iterable[float]) -> MomentSummary:
    """Two-pass summary of a sequence: mean first, then squared deviations."""
    values = [float(x) for x in data]
    n = len(values)
    if n == 0:
        return MomentSummary()
    mean = math.fsum(values) / n
    m2 = math.fsum((x - mean) ** 2 for x in values)
    return MomentSummary(n, mean, m2)


def summarize_pairs(data: Iterable[tuple[float, float]]) -> CovarianceSummary:
    """Two-pass summary of (x, y) pairs: means first, then cross-deviations."""
    pairs = [(float(x), float(y)) for x, y in data]
    n = len(pairs)
    if n == 0:
        return CovarianceSummary()
    mean_x = math.fsum(x for x, _ in pairs) / n
    mean_y = math.fsum(y for _, y in pairs) / n
    c2 = math.fsum((x - mean_x) * (y - mean_y) for x, y in pairs)
    return CovarianceSummary(n, mean_x, mean_y, c2)


def merge_population(s1: MomentSummary, s2: MomentSummary) -> MomentSummary:
    """Summary of the concatenation of the two summarized datasets.

    The merged mean is the count-weighted mean; the merged second moment
    adds both part moments plus each part's count times its squared mean
    gap from the merged mean.  Merging with the identity returns the other
    operand unchanged.
    """
    if s1.n == 0:
        return s2
    if s2.n == 0:
        return s1
    n = s1.n + s2.n
    mean = (s1.n * s1.mean + s2.n * s2.mean) / n
    d1 = s1.mean - mean
    d2 = s2.mean - mean
    m2 = s1.m2 + s2.m2 + s1.n * d1 * d1 + s2.n * d2 * d2
    return MomentSummary(n, mean, m2)


def merge_sample(s1: MomentSummary, s2: MomentSummary) -> MomentSummary:
    """Merge for the sample-variance reading of the same summaries.

    The combination is identical to :func:`merge_population`; only the
    variance extraction differs.  Because the stored moment is the raw sum
    of squared deviations, an operand with a single observation (where the
    sample variance itself is undefined) merges fine.
    """
    return merge_population(s1, s2)


def merge_covariance(c1: CovarianceSummary, c2: CovarianceSummary) -> CovarianceSummary:
    """Covariance summary of the concatenated pair datasets."""
    if c1.n == 0:
        return c2
    if c2.n == 0:
        return c1
    n = c1.n + c2.n
    mean_x = (c1.n * c1.mean_x + c2.n * c2.mean_x) / n
    mean_y = (c1.n * c1.mean_y + c2.n * c2.mean_y) / n
    cross1 = (c1.mean_x - mean_x) * (c1.mean_y - mean_y)
    cross2 = (c2.mean_x - mean_x) * (c2.mean_y - mean_y)
    c2_total = c1.c2 + c2.c2 + c1.n * cross1 + c2.n * cross2
    return CovarianceSummary(n, mean_x, mean_y, c2_total)


def remainder_population(s1: MomentSummary, s2: MomentSummary) -> RemainderReport:
    """Population-variance shift caused by merging ``s2`` into ``s1``.

    Both operands must carry a defined variance (n >= 1).
    """
    if s1.n < 1 or s2.n < 1:
        raise ValueError("remainder needs a defined variance on both sides")
    original = s1.population_variance()
    merged = merge_population(s1, s2).population_variance()
    return RemainderReport(remainder=merged - original, merged=merged)


def remainder_sample(s1: MomentSummary, s2: MomentSummary) -> RemainderReport:
    """Sample-variance shift caused by merging ``s2`` into ``s1``.

    Both operands must carry a defined sample variance (n >= 2).
    """
    if s1.n < 2 or s2.n < 2:
        raise ValueError("remainder needs a defined sample variance on both sides")
    original = s1.sample_variance()
    merged = merge_sample(s1, s2).sample_variance()
    return RemainderReport(remainder=merged - original, merged=merged)


def ross_update(s: MomentSummary, x: float) -> MomentSummary:
    """Fold one new observation into a summary via the textbook recurrence.

    With j existing observations, the mean moves by (x - mean) / (j + 1)
    and the second moment grows by j * (j + 1) times that step squared.
    Equivalent (within rounding) to merging with a singleton summary, but
    priced differently, which is the whole point of comparing the two.
    """
    if s.n < 1:
        raise ValueError("the single-sample recurrence needs an existing mean")
    j = s.n
    step = (float(x) - s.mean) / (j + 1)
    mean = s.mean + step
    m2 = s.m2 + j * (j + 1) * step * step
    return MomentSummary(j + 1, mean, m2)
