"""Linear merge decompositions of statistics.

A statistic ``f`` is mergeable here when the value over two concatenated
datasets splits as ``f(d1 ++ d2) = A(n1, n2) * f(s1) + B(n1, n2) * f(s2)
+ g(s1, s2)``, where the coefficients depend only on the two counts and
the correction term ``g`` depends only on the stored summaries.  Mean,
population variance, and covariance are registered as instances.

The concrete merges in :mod:`mergestats.summaries` do not route through
these closures; this module exists so the decomposition itself can be
checked and so further statistics can be plugged in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, NamedTuple

from .summaries import (
    CovarianceSummary,
    MomentSummary,
    merge_covariance,
    merge_population,
)

__all__ = [
    "MergeDecomposition",
    "Effectiveness",
    "decompose_check",
    "generic_effectiveness",
    "MEAN",
    "POPULATION_VARIANCE",
    "COVARIANCE",
    "DECOMPOSITIONS",
]


@dataclass(frozen=True)
class MergeDecomposition:
    """One statistic's merge rule, split into its three addends.

    ``merge`` builds the combined summary so checks can compare the addend
    sum against the statistic of the true merge.
    """

    name: str
    coefficient_a: Callable[[int, int], float]
    coefficient_b: Callable[[int, int], float]
    remainder_g: Callable[[Any, Any], float]
    statistic: Callable[[Any], float]
    merge: Callable[[Any, Any], Any]


def decompose_check(instance: MergeDecomposition, s1: Any, s2: Any) -> tuple[float, float, float]:
    """The three addends whose sum is the merged statistic.

    Raises ValueError when the statistic is undefined for either operand.
    """
    f1 = instance.statistic(s1)
    f2 = instance.statistic(s2)
    a = instance.coefficient_a(s1.n, s2.n)
    b = instance.coefficient_b(s1.n, s2.n)
    return a * f1, b * f2, instance.remainder_g(s1, s2)


class Effectiveness(NamedTuple):
    factor: float
    beneficial: bool


def generic_effectiveness(numerator: float, denominator: float, coefficient_a: float = 1.0) -> Effectiveness:
    """Generic speedup factor: coefficient_a * numerator / denominator.

    ``numerator`` is the time saved by not recomputing the prior part;
    ``denominator`` is the extra time spent on the correction term.  A
    factor above 1 predicts that merging beats recomputation.
    """
    if denominator == 0:
        raise ZeroDivisionError("effectiveness factor is undefined for a zero denominator")
    factor = coefficient_a * numerator / denominator
    return Effectiveness(factor, factor > 1.0)


def _fraction_a(n1: int, n2: int) -> float:
    return n1 / (n1 + n2)


def _fraction_b(n1: int, n2: int) -> float:
    return n2 / (n1 + n2)


def _mean_value(s: MomentSummary) -> float:
    if s.n < 1:
        raise ValueError("mean is undefined for an empty summary")
    return s.mean


def _variance_shift(s1: MomentSummary, s2: MomentSummary) -> float:
    n = s1.n + s2.n
    mean = (s1.n * s1.mean + s2.n * s2.mean) / n
    d1 = s1.mean - mean
    d2 = s2.mean - mean
    return (s1.n * d1 * d1 + s2.n * d2 * d2) / n


def _covariance_shift(c1: CovarianceSummary, c2: CovarianceSummary) -> float:
    n = c1.n + c2.n
    mean_x = (c1.n * c1.mean_x + c2.n * c2.mean_x) / n
    mean_y = (c1.n * c1.mean_y + c2.n * c2.mean_y) / n
    part1 = (c1.mean_x - mean_x) * (c1.mean_y - mean_y)
    part2 = (c2.mean_x - mean_x) * (c2.mean_y - mean_y)
    return (c1.n * part1 + c2.n * part2) / n


MEAN = MergeDecomposition(
    name="mean",
    coefficient_a=_fraction_a,
    coefficient_b=_fraction_b,
    remainder_g=lambda s1, s2: 0.0,
    statistic=_mean_value,
    merge=merge_population,
)

POPULATION_VARIANCE = MergeDecomposition(
    name="population_variance",
    coefficient_a=_fraction_a,
    coefficient_b=_fraction_b,
    remainder_g=_variance_shift,
    statistic=MomentSummary.population_variance,
    merge=merge_population,
)

COVARIANCE = MergeDecomposition(
    name="covariance",
    coefficient_a=_fraction_a,
    coefficient_b=_fraction_b,
    remainder_g=_covariance_shift,
    statistic=CovarianceSummary.covariance,
    merge=merge_covariance,
)

DECOMPOSITIONS = {d.name: d for d in (MEAN, POPULATION_VARIANCE, COVARIANCE)}
