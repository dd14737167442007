"""Monte Carlo experiments comparing the discrete maximum process with its limit.

Every experiment splits its replicates into fixed chunks; chunk c of a run
seeded with ``seed`` draws from ``sub_seed(seed, <stage>, c)``. Tables are
therefore the same for every ``threads`` value.
"""

import logging
import math
import typing
from dataclasses import dataclass

import numpy as np
import pandas as pd

from shotmax.errors import DomainError
from shotmax.simulation_input import ModelParams
from shotmax.simulator.discrete_model import (
    longest_nonneg_gaps,
    one_sided_maxima,
    running_max,
    simulate_walks,
)
from shotmax.simulator.fbm import GridPath
from shotmax.simulator.limit_process import fdd_marginal_cdf, limit_values_at
from shotmax.simulator.noise import (
    sample_perturbations,
    sample_point_processes,
)
from shotmax.utils.logging import log_event, print_execution_time
from shotmax.utils.parallel import map_work_items
from shotmax.utils.seeding import (
    STREAM_NOISE,
    STREAM_POINTS,
    SeedToken,
    chunk_sizes,
    make_rng,
    sub_seed,
)
from shotmax.validator.ks_test import ks_two_sample, ks_vs_cdf
from shotmax.validator.pathspace import (
    max_jump,
    partition_modulus,
    uniform_modulus,
)

logger = logging.getLogger(__name__)

WALK_CHUNK = 64
FDD_TIMES = (0.25, 0.5, 1.0)
EXTREMAL_TIMES = (0.25, 0.5, 1.0)
FDD_CDF_POINTS = 64
SANDWICH_TOLERANCE = 1e-9

# Stage labels inside an experiment seed.
STAGE_DISCRETE = 0
STAGE_LIMIT = 1
STAGE_FDD = 2


def _check_reps(reps: int):
    if reps < 1:
        raise DomainError(
            f"Replicate count is incorrect: expected reps >= 1, got {reps}"
        )


def _check_n_list(n_list: typing.Sequence[int]):
    if len(n_list) == 0:
        raise DomainError("Walk lengths are empty")
    if any(n < 1 for n in n_list):
        raise DomainError(
            f"Walk lengths are incorrect: expected n >= 1, got {list(n_list)}"
        )
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise DomainError(
            f"Walk lengths are incorrect: expected increasing values, got {list(n_list)}"
        )


@dataclass(frozen=True)
class _WalkTask:
    params: ModelParams
    n: int
    size: int
    seed: tuple[int, ...]
    indices: tuple[int, ...] = ()
    k: int = 0


def _walk_tasks(
    params: ModelParams,
    n: int,
    reps: int,
    seed: SeedToken,
    indices: tuple[int, ...] = (),
    k: int = 0,
) -> list[_WalkTask]:
    return [
        _WalkTask(
            params=params,
            n=n,
            size=size,
            seed=sub_seed(seed, chunk),
            indices=indices,
            k=k,
        )
        for chunk, size in enumerate(chunk_sizes(reps, WALK_CHUNK))
    ]


def _walks(task: _WalkTask) -> tuple[np.ndarray, np.ndarray]:
    return simulate_walks(
        task.params.walk_spec(task.n),
        task.params.noise_params(),
        task.size,
        task.seed,
    )


def _scaled_max_chunk(task: _WalkTask) -> np.ndarray:
    s, y = _walks(task)
    m = running_max(s, y)
    return m[:, list(task.indices)] * float(task.n) ** (-task.params.hurst)


def discrete_values_at(
    params: ModelParams,
    n: int,
    times: typing.Sequence[float],
    reps: int,
    seed: SeedToken,
    threads: int = 1,
) -> np.ndarray:
    """Array (reps, len(times)) of Z_{n,t} = M_{[nt]} / n^H."""
    _check_reps(reps)
    indices = tuple(int(math.floor(t * n + 1e-9)) for t in times)
    tasks = _walk_tasks(params, n, reps, seed, indices=indices)
    return np.concatenate(map_work_items(_scaled_max_chunk, tasks, threads))


def discrete_terminal_samples(
    params: ModelParams,
    n: int,
    reps: int,
    seed: SeedToken,
    threads: int = 1,
) -> np.ndarray:
    return discrete_values_at(params, n, [1.0], reps, seed, threads)[:, 0]


def limit_terminal_samples(
    params: ModelParams,
    reps: int,
    seed: SeedToken,
    threads: int = 1,
) -> np.ndarray:
    _check_reps(reps)
    return limit_values_at(
        params.hurst,
        params.kappa,
        [params.grid_points],
        reps,
        seed,
        k=params.k,
        grid_points=params.grid_points,
        theta=params.theta,
        threads=threads,
    )[:, 0]


def _interpolated_cdf(
    xs: np.ndarray, probabilities: np.ndarray
) -> typing.Callable[[float], float]:
    probabilities = np.maximum.accumulate(np.clip(probabilities, 0.0, 1.0))

    def cdf(x: float) -> float:
        return float(np.interp(x, xs, probabilities, left=0.0, right=1.0))

    return cdf


@print_execution_time
def convergence_experiment(
    params: ModelParams,
    n_list: typing.Sequence[int],
    reps: int,
    seed: SeedToken,
    threads: int = 1,
    fdd_times: typing.Sequence[float] = (),
) -> pd.DataFrame:
    """Terminal two-sample KS of Z_{n,1} against Z^H_1 for every n.

    With ``fdd_times``, each row also carries one-sample KS statistics of
    Z_{n,t} against the Monte Carlo CDF of Z^H_t.
    """
    _check_reps(reps)
    _check_n_list(n_list)

    limit_sample = limit_terminal_samples(
        params, reps, sub_seed(seed, STAGE_LIMIT), threads
    )

    fdd_cdfs = {}
    if fdd_times:
        upper = float(np.quantile(limit_sample, 0.999)) * 1.5
        xs = np.linspace(0.0, max(upper, 1e-6), FDD_CDF_POINTS)
        for t in fdd_times:
            probabilities = fdd_marginal_cdf(
                params.hurst,
                params.kappa,
                t,
                xs,
                reps,
                params.grid_points,
                sub_seed(seed, STAGE_FDD),
                threads=threads,
            )
            fdd_cdfs[t] = _interpolated_cdf(xs, probabilities)

    rows = []
    for n in n_list:
        times = [1.0] + list(fdd_times)
        values = discrete_values_at(
            params, n, times, reps, sub_seed(seed, STAGE_DISCRETE, n), threads
        )
        report = ks_two_sample(values[:, 0], limit_sample)
        row = {
            "n": n,
            "ks_statistic": report.statistic,
            "p_value": report.p_value,
            "reps": reps,
        }
        for column, t in enumerate(fdd_times, start=1):
            row[f"fdd_ks_t{t:g}"] = ks_vs_cdf(
                values[:, column], fdd_cdfs[t]
            ).statistic
        log_event(f"convergence {row}")
        logger.info(
            f"n={n}: KS {report.statistic:.4f} (p={report.p_value:.3g})"
        )
        rows.append(row)
    return pd.DataFrame(rows)


@dataclass(frozen=True)
class _OrderTask:
    params: ModelParams
    n: int
    k: int
    size: int
    seed: tuple[int, ...]


def _order_statistics_chunk(task: _OrderTask) -> tuple[np.ndarray, np.ndarray]:
    noise = task.params.noise_params()
    h = task.params.hurst
    y = sample_perturbations(
        noise,
        (task.size, task.n),
        make_rng(sub_seed(task.seed, STREAM_NOISE)),
    )
    top = -np.sort(
        -np.partition(y, task.n - task.k, axis=1)[:, task.n - task.k :], axis=1
    )
    gamma, _, _, _ = sample_point_processes(
        noise, task.k, task.size, sub_seed(task.seed, STREAM_POINTS)
    )
    return (
        top * float(task.n) ** (-h),
        task.params.kappa**h * gamma ** (-h),
    )


@print_execution_time
def lepage_check(
    params: ModelParams,
    k: int,
    reps: int,
    seed: SeedToken,
    threads: int = 1,
) -> pd.DataFrame:
    """Rank-by-rank comparison of Y_{i,n} / n^H with kappa^H Gamma_i^{-H}."""
    _check_reps(reps)
    if not 1 <= k <= params.n:
        raise DomainError(
            f"Rank count is incorrect: expected 1 <= k <= n = {params.n}, got {k}"
        )
    tasks = [
        _OrderTask(
            params=params,
            n=params.n,
            k=k,
            size=size,
            seed=sub_seed(seed, chunk),
        )
        for chunk, size in enumerate(chunk_sizes(reps, WALK_CHUNK))
    ]
    chunks = map_work_items(_order_statistics_chunk, tasks, threads)
    discrete = np.concatenate([c[0] for c in chunks])
    limit = np.concatenate([c[1] for c in chunks])

    h, kappa = params.hurst, params.kappa
    rows = []
    for rank in range(1, k + 1):
        report = ks_two_sample(discrete[:, rank - 1], limit[:, rank - 1])
        row = {
            "rank": rank,
            "mean_discrete": math.fsum(discrete[:, rank - 1]) / reps,
            "mean_limit": math.fsum(limit[:, rank - 1]) / reps,
            "ks_statistic": report.statistic,
            "p_value": report.p_value,
        }
        if rank == 1:
            frechet = ks_vs_cdf(
                discrete[:, 0],
                lambda x: math.exp(-kappa * x ** (-1.0 / h)) if x > 0 else 0.0,
            )
            row["cdf_ks_statistic"] = frechet.statistic
            row["cdf_p_value"] = frechet.p_value
        else:
            row["cdf_ks_statistic"] = math.nan
            row["cdf_p_value"] = math.nan
        log_event(f"lepage {row}")
        rows.append(row)
    return pd.DataFrame(rows)


def _sandwich_chunk(
    task: _WalkTask,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s, y = _walks(task)
    m = running_max(s, y, include_origin=True)
    lower, upper = one_sided_maxima(s, y)
    violations = np.sum(
        np.any(lower > m + SANDWICH_TOLERANCE, axis=1)
        | np.any(m > upper + SANDWICH_TOLERANCE, axis=1)
    )
    gaps = np.max(upper - lower, axis=1) * float(task.n) ** (
        -task.params.hurst
    )
    return gaps, np.array([violations]), longest_nonneg_gaps(y)


@print_execution_time
def sandwich_experiment(
    params: ModelParams,
    n_list: typing.Sequence[int],
    reps: int,
    seed: SeedToken,
    threads: int = 1,
) -> pd.DataFrame:
    """Pathwise check of Z^{-inf} <= Z <= Z^0 and the width sup(Z^0 - Z^{-inf}).

    The longest run between nonnegative perturbations is centred by
    log_{1/p}(n (1 - p)) with p = P(Y < 0); it is NaN when p = 0.
    """
    _check_reps(reps)
    _check_n_list(n_list)
    p = 1.0 - params.theta

    rows = []
    for n in n_list:
        tasks = _walk_tasks(params, n, reps, sub_seed(seed, n))
        chunks = map_work_items(_sandwich_chunk, tasks, threads)
        gaps = np.concatenate([c[0] for c in chunks])
        violations = int(sum(int(c[1][0]) for c in chunks))
        runs = np.concatenate([c[2] for c in chunks]).astype(np.float64)

        if 0.0 < p < 1.0:
            centred = runs - math.log(n * (1.0 - p)) / math.log(1.0 / p)
            q25, median, q75 = np.quantile(centred, [0.25, 0.5, 0.75])
            run_median, run_iqr = float(median), float(q75 - q25)
        else:
            run_median, run_iqr = math.nan, math.nan

        row = {
            "n": n,
            "reps": reps,
            "gap_q95": float(np.quantile(gaps, 0.95)),
            "violations": violations,
            "run_median": run_median,
            "run_iqr": run_iqr,
        }
        if violations:
            logger.warning(
                f"Sandwich violated on {violations} of {reps} walks at n={n}"
            )
        log_event(f"sandwich {row}")
        rows.append(row)
    return pd.DataFrame(rows)


def _truncation_chunk(
    task: _WalkTask,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    s, y = _walks(task)
    n, k = task.n, task.k
    scale = float(n) ** (-task.params.hurst)
    body = y[:, 1:]
    ordered = np.partition(body, (n - k - 1, n - k), axis=1)
    kth = ordered[:, n - k]
    next_largest = ordered[:, n - k - 1]

    kept = np.where(y >= kth[:, None], y, 0.0)
    kept[:, 0] = 0.0
    distance = np.max(np.abs(running_max(s, y) - running_max(s, kept)), axis=1)
    nonnegative = np.all(body >= 0, axis=1)
    return distance * scale, next_largest * scale, nonnegative


@print_execution_time
def truncation_experiment(
    params: ModelParams,
    ks: typing.Sequence[int],
    reps: int,
    seed: SeedToken,
    threads: int = 1,
) -> pd.DataFrame:
    """sup |Z_n - Z^(k)_n| against the bound Y_{k+1,n} / n^H, walk by walk."""
    _check_reps(reps)
    rows = []
    for k in ks:
        if not 1 <= k < params.n:
            raise DomainError(
                f"Truncation level is incorrect: expected 1 <= k < n = {params.n}, got {k}"
            )
        tasks = _walk_tasks(params, params.n, reps, sub_seed(seed, k), k=k)
        chunks = map_work_items(_truncation_chunk, tasks, threads)
        distance = np.concatenate([c[0] for c in chunks])
        bound = np.concatenate([c[1] for c in chunks])
        nonnegative = np.concatenate([c[2] for c in chunks])

        holds = distance <= bound + 1e-12
        row = {
            "k": k,
            "reps": reps,
            "nonnegative_walks": int(nonnegative.sum()),
            "fraction_holding": float(holds[nonnegative].mean())
            if nonnegative.any()
            else math.nan,
            "worst_slack": float(np.min(bound - distance)),
        }
        log_event(f"truncation {row}")
        rows.append(row)
    return pd.DataFrame(rows)


@dataclass(frozen=True)
class _ExtremalTask:
    params: ModelParams
    n: int
    size: int
    seed: tuple[int, ...]


def _extremal_chunk(task: _ExtremalTask) -> tuple[np.ndarray, np.ndarray]:
    noise = task.params.noise_params()
    h, kappa = task.params.hurst, task.params.kappa
    y = sample_perturbations(
        noise,
        (task.size, task.n),
        make_rng(sub_seed(task.seed, STREAM_NOISE)),
    )
    running = np.maximum.accumulate(y, axis=1) * (kappa * task.n) ** (-h)
    indices = [
        max(int(math.floor(t * task.n + 1e-9)), 1) - 1 for t in EXTREMAL_TIMES
    ]
    discrete = running[:, indices]

    _, eta, u, _ = sample_point_processes(
        noise, task.params.k, task.size, sub_seed(task.seed, STREAM_POINTS)
    )
    limit = np.stack(
        [
            np.max(np.where(u <= t, eta, 0.0), axis=1, initial=0.0)
            for t in EXTREMAL_TIMES
        ],
        axis=1,
    )
    return discrete, limit


@print_execution_time
def extremal_experiment(
    params: ModelParams,
    n: int,
    reps: int,
    seed: SeedToken,
    threads: int = 1,
) -> pd.DataFrame:
    """max_{i<=nt} Y_i / (kappa n)^H against the extremal process V_t."""
    _check_reps(reps)
    tasks = [
        _ExtremalTask(
            params=params, n=n, size=size, seed=sub_seed(seed, chunk)
        )
        for chunk, size in enumerate(chunk_sizes(reps, WALK_CHUNK))
    ]
    chunks = map_work_items(_extremal_chunk, tasks, threads)
    discrete = np.concatenate([c[0] for c in chunks])
    limit = np.concatenate([c[1] for c in chunks])

    h = params.hurst
    rows = []
    for column, t in enumerate(EXTREMAL_TIMES):
        report = ks_two_sample(discrete[:, column], limit[:, column])
        frechet = ks_vs_cdf(
            discrete[:, column],
            lambda x, t=t: math.exp(-t * x ** (-1.0 / h)) if x > 0 else 0.0,
        )
        row = {
            "t": t,
            "ks_statistic": report.statistic,
            "p_value": report.p_value,
            "cdf_ks_statistic": frechet.statistic,
            "cdf_p_value": frechet.p_value,
        }
        log_event(f"extremal {row}")
        rows.append(row)
    return pd.DataFrame(rows)


def moduli_check(
    path: GridPath, deltas: typing.Sequence[float]
) -> pd.DataFrame:
    rows = []
    jump = max_jump(path)
    for delta in deltas:
        omega = uniform_modulus(path, delta)
        omega_prime = partition_modulus(path, delta)
        rows.append(
            {
                "delta": delta,
                "omega": omega,
                "omega_prime": omega_prime,
                "jump": jump,
                "holds": bool(omega <= 2.0 * omega_prime + jump + 1e-12),
            }
        )
    return pd.DataFrame(rows)
