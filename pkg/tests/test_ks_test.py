import math
import unittest

import numpy as np
import pytest

from shotmax.errors import ContractError, DomainError
from shotmax.validator.ks_test import (
    ONE_SAMPLE,
    TWO_SAMPLE,
    ecdf,
    kolmogorov_survival,
    ks_two_sample,
    ks_vs_cdf,
)


def uniform_cdf(x: float) -> float:
    return min(max(x, 0.0), 1.0)


class TestTwoSample(unittest.TestCase):
    def test_identical_samples(self):
        report = ks_two_sample([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        self.assertEqual(report.statistic, 0.0)
        self.assertEqual(report.p_value, 1.0)
        self.assertEqual(report.mode, TWO_SAMPLE)

    def test_disjoint_samples(self):
        report = ks_two_sample([1.0, 2.0], [3.0, 4.0, 5.0])
        self.assertEqual(report.statistic, 1.0)
        self.assertEqual((report.n1, report.n2), (2, 3))

    def test_interleaved_samples(self):
        self.assertEqual(ks_two_sample([1.0, 2.0], [1.5, 2.5]).statistic, 0.5)

    def test_symmetry(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=50), rng.normal(0.3, size=70)
        self.assertEqual(
            ks_two_sample(a, b).statistic, ks_two_sample(b, a).statistic
        )

    def test_invariant_under_increasing_maps(self):
        rng = np.random.default_rng(2)
        a, b = rng.normal(size=40), rng.normal(size=60)
        self.assertEqual(
            ks_two_sample(a, b).statistic,
            ks_two_sample(np.exp(a), np.exp(b)).statistic,
        )

    def test_ties_across_samples(self):
        self.assertEqual(ks_two_sample([1.0, 1.0], [1.0, 2.0]).statistic, 0.5)

    def test_empty_or_nan_raises(self):
        with self.assertRaises(DomainError):
            ks_two_sample([], [1.0])
        with self.assertRaises(DomainError):
            ks_two_sample([1.0, float("nan")], [1.0])


class TestOneSample(unittest.TestCase):
    def test_single_point_at_the_median(self):
        report = ks_vs_cdf([0.5], uniform_cdf)
        self.assertEqual(report.statistic, 0.5)
        self.assertEqual(report.mode, ONE_SAMPLE)
        self.assertIsNone(report.n2)

    def test_cdf_outside_unit_interval_raises(self):
        with self.assertRaises(ContractError):
            ks_vs_cdf([0.1, 0.2], lambda x: 2.0)

    def test_decreasing_cdf_raises(self):
        with self.assertRaises(ContractError):
            ks_vs_cdf([0.1, 0.2, 0.3], lambda x: 1.0 - x)

    def test_inverse_transform_sample(self):
        rng = np.random.default_rng(3)
        n = 10**5
        report = ks_vs_cdf(rng.random(n), uniform_cdf)
        self.assertLess(report.statistic, 1.95 / math.sqrt(n))


def test_kolmogorov_survival_values():
    assert kolmogorov_survival(0.0) == 1.0
    assert kolmogorov_survival(0.19) == 1.0
    assert kolmogorov_survival(1.3581) == pytest.approx(0.05, abs=1e-3)
    assert kolmogorov_survival(1.6276) == pytest.approx(0.01, abs=1e-3)
    assert kolmogorov_survival(10.0) == pytest.approx(0.0, abs=1e-12)


def test_false_rejection_rate_at_one_percent():
    rng = np.random.default_rng(4)
    rejections = sum(
        ks_two_sample(rng.random(2000), rng.random(2000)).p_value < 0.01
        for _ in range(200)
    )
    assert rejections <= 8


class TestEcdf(unittest.TestCase):
    def setUp(self):
        self.summary = ecdf([3.0, 1.0, 2.0, 4.0])

    def test_sorted_and_read_only(self):
        np.testing.assert_array_equal(self.summary.sorted_sample, [1, 2, 3, 4])
        with self.assertRaises(ValueError):
            self.summary.sorted_sample[0] = 0.0

    def test_quantile_endpoints(self):
        self.assertEqual(self.summary.quantile(0.0), 1.0)
        self.assertEqual(self.summary.quantile(1.0), 4.0)
        with self.assertRaises(DomainError):
            self.summary.quantile(1.5)

    def test_cdf(self):
        np.testing.assert_array_equal(
            self.summary.cdf(np.array([0.0, 2.0, 2.5, 4.0])),
            [0.0, 0.5, 0.5, 1.0],
        )

    def test_quantile_table(self):
        table = self.summary.quantile_table([0.0, 0.5, 1.0])
        self.assertEqual(list(table.columns), ["p", "quantile"])
        self.assertEqual(table["quantile"].tolist(), [1.0, 2.5, 4.0])

    def test_empty_sample_raises(self):
        with self.assertRaises(DomainError):
            ecdf([])
