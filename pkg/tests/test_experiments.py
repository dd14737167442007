import dataclasses
import math
import unittest

import numpy as np
import pandas as pd
import pytest

from shotmax.errors import DomainError
from shotmax.simulation_input import ModelParams
from shotmax.validator.experiment_config import (
    PRESETS,
    SMOKE,
    ExperimentConfig,
    preset_from_label,
)
from shotmax.validator.experiments import (
    EXTREMAL_TIMES,
    convergence_experiment,
    discrete_terminal_samples,
    discrete_values_at,
    extremal_experiment,
    lepage_check,
    limit_terminal_samples,
    sandwich_experiment,
    truncation_experiment,
)
from shotmax.validator.ks_test import ks_two_sample
from shotmax.validator.output_validation import (
    CONVERGE_COLUMNS,
    CORRECT,
    LEPAGE_COLUMNS,
    SANDWICH_COLUMNS,
    validate_table,
)


def test_convergence_table(small_params):
    table = convergence_experiment(small_params, [16, 32], 100, 1)

    assert list(table.columns) == CONVERGE_COLUMNS
    assert table["n"].tolist() == [16, 32]
    assert table["reps"].tolist() == [100, 100]
    assert table["ks_statistic"].between(0.0, 1.0).all()
    assert table["p_value"].between(0.0, 1.0).all()
    assert validate_table("converge", table) == CORRECT


def test_convergence_with_fdd_columns(small_params):
    table = convergence_experiment(
        small_params, [16], 100, 2, fdd_times=(0.5, 1.0)
    )
    assert list(table.columns) == CONVERGE_COLUMNS + [
        "fdd_ks_t0.5",
        "fdd_ks_t1",
    ]
    assert table[["fdd_ks_t0.5", "fdd_ks_t1"]].between(0.0, 1.0).all().all()


def test_convergence_does_not_depend_on_threads(small_params):
    one = convergence_experiment(small_params, [16, 32], 150, 3)
    two = convergence_experiment(small_params, [16, 32], 150, 3, threads=2)
    pd.testing.assert_frame_equal(one, two)


@pytest.mark.parametrize("n_list", [[], [32, 16], [0, 4]])
def test_convergence_rejects_bad_walk_lengths(small_params, n_list):
    with pytest.raises(DomainError):
        convergence_experiment(small_params, n_list, 10, 4)


def test_zero_replicates_raise(small_params):
    with pytest.raises(DomainError):
        convergence_experiment(small_params, [16], 0, 5)
    with pytest.raises(DomainError):
        limit_terminal_samples(small_params, 0, 5)


def test_discrete_samples(small_params):
    samples = discrete_terminal_samples(small_params, 32, 130, 6)
    again = discrete_terminal_samples(small_params, 32, 130, 6, threads=2)
    assert samples.shape == (130,)
    np.testing.assert_array_equal(samples, again)

    values = discrete_values_at(small_params, 32, [0.5, 1.0], 130, 6)
    np.testing.assert_array_equal(values[:, 1], samples)
    assert np.all(values[:, 0] <= values[:, 1])


class TestLepage(unittest.TestCase):
    def setUp(self):
        self.params = ModelParams(hurst=0.5, kappa=1.0, n=256, seed=7)

    def test_ranks_are_ordered(self):
        table = lepage_check(self.params, 4, 200, 7)
        self.assertEqual(list(table.columns), LEPAGE_COLUMNS)
        self.assertEqual(table["rank"].tolist(), [1, 2, 3, 4])
        self.assertTrue(table["mean_discrete"].is_monotonic_decreasing)
        self.assertTrue(table["mean_limit"].is_monotonic_decreasing)
        self.assertFalse(math.isnan(table["cdf_ks_statistic"].iloc[0]))
        self.assertTrue(table["cdf_ks_statistic"].iloc[1:].isna().all())

    def test_rank_above_n_raises(self):
        with self.assertRaises(DomainError):
            lepage_check(self.params, 257, 10, 7)


def test_sandwich_holds_pathwise(signed_params):
    table = sandwich_experiment(signed_params, [32, 64], 100, 8)

    assert list(table.columns) == SANDWICH_COLUMNS
    assert table["violations"].tolist() == [0, 0]
    assert (table["gap_q95"] >= 0).all()
    assert table["run_median"].notna().all()
    assert (table["run_iqr"] >= 0).all()


def test_sandwich_without_negative_noise(small_params):
    table = sandwich_experiment(small_params, [32], 100, 9)
    assert table["violations"].tolist() == [0]
    assert table["gap_q95"].tolist() == [0.0]
    assert table["run_median"].isna().all()


def test_truncation_bound_holds_for_nonnegative_noise(small_params):
    table = truncation_experiment(small_params, [1, 4], 100, 10)

    assert table["k"].tolist() == [1, 4]
    assert table["nonnegative_walks"].tolist() == [100, 100]
    assert table["fraction_holding"].tolist() == [1.0, 1.0]
    assert (table["worst_slack"] >= -1e-12).all()


def test_truncation_level_must_be_below_n(small_params):
    with pytest.raises(DomainError):
        truncation_experiment(small_params, [64], 10, 11)


def test_extremal_table(small_params):
    table = extremal_experiment(small_params, 256, 200, 12)
    assert table["t"].tolist() == list(EXTREMAL_TIMES)
    assert table["ks_statistic"].between(0.0, 1.0).all()
    assert table["cdf_ks_statistic"].between(0.0, 1.0).all()


class TestPresets(unittest.TestCase):
    def test_lookup(self):
        self.assertIs(preset_from_label("smoke"), SMOKE)
        with self.assertRaises(ValueError):
            preset_from_label("unknown")

    def test_every_preset_builds_model_params(self):
        for preset in PRESETS:
            defaults = preset.model_defaults()
            defaults.pop("n_list")
            params = ModelParams(**defaults)
            self.assertEqual(params.hurst, preset.hurst)
            self.assertEqual(params.grid_points, preset.grid_points)

    def test_every_field_feeds_the_command_line(self):
        # label selects the preset and ranks is read by the lepage command.
        names = {f.name for f in dataclasses.fields(ExperimentConfig)}
        self.assertEqual(
            names, set(SMOKE.model_defaults()) | {"label", "ranks"}
        )


def test_negative_noise_does_not_change_the_terminal_law():
    pure = ModelParams(hurst=0.5, kappa=1.0, theta=1.0)
    signed = ModelParams(hurst=0.5, kappa=1.0, theta=0.5)
    a = discrete_terminal_samples(pure, 1024, 1000, 13)
    b = discrete_terminal_samples(signed, 1024, 1000, 14)
    assert ks_two_sample(a, b).p_value > 0.001
