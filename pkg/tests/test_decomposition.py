"""The A*f1 + B*f2 + g split must reassemble the merged statistic."""

import math
import random

import pytest

from conftest import assert_close
from mergestats.decomposition import (
    COVARIANCE,
    DECOMPOSITIONS,
    MEAN,
    POPULATION_VARIANCE,
    decompose_check,
    generic_effectiveness,
)
from mergestats.summaries import CovarianceSummary, MomentSummary, summarize, summarize_pairs


def _random_dataset(rng, lo=1, hi=60):
    return [rng.uniform(-1e3, 1e3) for _ in range(rng.randrange(lo, hi))]


class TestVarianceInstance:
    def test_hand_example_addends(self):
        s1, s2 = summarize([1, 2, 3]), summarize([4, 5])
        a_part, b_part, g = decompose_check(POPULATION_VARIANCE, s1, s2)
        assert_close(a_part, 0.4, rel=1e-15, floor=0.0)
        assert_close(b_part, 0.1, rel=1e-15, floor=0.0)
        assert_close(g, 1.5, rel=1e-15, floor=0.0)
        merged = POPULATION_VARIANCE.merge(s1, s2)
        assert_close(a_part + b_part + g, POPULATION_VARIANCE.statistic(merged), rel=1e-15, floor=0.0)

    def test_rejects_undefined_statistic(self):
        with pytest.raises(ValueError):
            decompose_check(POPULATION_VARIANCE, MomentSummary(), summarize([1.0]))


class TestMeanInstance:
    def test_correction_term_is_exactly_zero(self):
        rng = random.Random(7)
        for _ in range(100):
            s1 = summarize(_random_dataset(rng))
            s2 = summarize(_random_dataset(rng))
            a_part, b_part, g = decompose_check(MEAN, s1, s2)
            assert g == 0.0
            merged = MEAN.merge(s1, s2)
            assert_close(a_part + b_part, merged.mean, floor=1e-9)

    def test_rejects_empty_summary(self):
        with pytest.raises(ValueError):
            decompose_check(MEAN, MomentSummary(), summarize([1.0]))


class TestCovarianceInstance:
    def test_hand_example_addends(self):
        c1 = summarize_pairs([(1, 1), (2, 2)])
        c2 = summarize_pairs([(3, 0)])
        a_part, b_part, g = decompose_check(COVARIANCE, c1, c2)
        assert_close(a_part, (2.0 / 3.0) * 0.25, rel=1e-15, floor=0.0)
        assert b_part == 0.0
        assert_close(g, -0.5, rel=1e-15, floor=0.0)
        assert_close(a_part + b_part + g, -1.0 / 3.0, rel=1e-15, floor=0.0)

    def test_rejects_undefined_statistic(self):
        with pytest.raises(ValueError):
            decompose_check(COVARIANCE, CovarianceSummary(), summarize_pairs([(1.0, 2.0)]))


class TestInstanceCoherence:
    def test_all_instances_reassemble_the_merge(self):
        rng = random.Random(99)
        for _ in range(200):
            d1 = _random_dataset(rng)
            d2 = _random_dataset(rng)
            pairs1 = [(x, rng.uniform(-1e3, 1e3)) for x in d1]
            pairs2 = [(x, rng.uniform(-1e3, 1e3)) for x in d2]
            operands = {
                "mean": (summarize(d1), summarize(d2)),
                "population_variance": (summarize(d1), summarize(d2)),
                "covariance": (summarize_pairs(pairs1), summarize_pairs(pairs2)),
            }
            for name, instance in DECOMPOSITIONS.items():
                s1, s2 = operands[name]
                addends = decompose_check(instance, s1, s2)
                expected = instance.statistic(instance.merge(s1, s2))
                assert_close(math.fsum(addends), expected, floor=1e-9, label=name)


class TestGenericEffectiveness:
    def test_beneficial_case(self):
        result = generic_effectiveness(2.0, 1.0)
        assert result.factor == 2.0
        assert result.beneficial

    def test_not_beneficial_case(self):
        result = generic_effectiveness(1.0, 2.0)
        assert result.factor == 0.5
        assert not result.beneficial

    def test_coefficient_scales_factor(self):
        assert generic_effectiveness(2.0, 1.0, coefficient_a=0.25).factor == 0.5

    def test_zero_denominator_is_rejected(self):
        with pytest.raises(ZeroDivisionError):
            generic_effectiveness(1.0, 0.0)
