"""The limit process Z^H: running maximum of fBm with shot noise.

    Z_t = max( sup_{s<=t} B_s , max_{U_i <= t, eps_i = +1} B_{U_i} + kappa0^H eta_i )

On a grid of n points the locations U_i snap to the nearest grid index
(clipped to 1..n), B comes from the exact generator in ``fbm`` and the
points from ``noise``. With theta = 1 the shot scale is kappa^H; for signed
noise it is kappa0^H = (kappa / theta)^H, and negative shots are dropped.

Finite-dimensional laws are evaluated by Monte Carlo over fBm paths:

    P(Z_{t_1} <= x_1, ..., Z_{t_d} <= x_d)
        = E exp(-sum_q int_{t_{q-1}}^{t_q} kappa (m_q - B_t)^{-1/H} dt)

with m_q = min(x_q, ..., x_d). Integrals are left Riemann sums on the grid.
A replicate whose path comes within GAP_FLOOR of a threshold anywhere on the
closed segment contributes 0.
"""

import logging
import math
import typing
from dataclasses import dataclass

import numpy as np

from shotmax.errors import DomainError, QueryError
from shotmax.simulator.fbm import GridPath, Hurst, fbm_paths
from shotmax.simulator.noise import (
    PURE_PARETO,
    SIGNED_PARETO,
    NoiseParams,
    PointSet,
    sample_point_processes,
)
from shotmax.utils.parallel import map_work_items
from shotmax.utils.seeding import (
    STREAM_FBM,
    STREAM_POINTS,
    SeedToken,
    chunk_sizes,
    make_rng,
    sub_seed,
)
from shotmax.validator.ks_test import KsReport, ks_two_sample

logger = logging.getLogger(__name__)

DEFAULT_K = 64
DEFAULT_GRID_POINTS = 4096
GAP_FLOOR = 1e-12
REPLICATE_CHUNK = 256


@dataclass(frozen=True)
class FddQuery:
    times: tuple[float, ...]
    thresholds: tuple[float, ...]

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        thresholds = tuple(float(x) for x in self.thresholds)
        if len(times) == 0 or len(times) != len(thresholds):
            raise QueryError(
                f"Query shape is incorrect: expected equal non-empty times and thresholds, "
                f"got {len(times)} and {len(thresholds)}"
            )
        if any(not 0.0 < t <= 1.0 for t in times):
            raise QueryError(
                f"Times are incorrect: expected values in (0, 1], got {times}"
            )
        if any(b <= a for a, b in zip(times, times[1:])):
            raise QueryError(
                f"Times are incorrect: expected strictly increasing, got {times}"
            )
        if any(math.isnan(x) for x in thresholds):
            raise QueryError(f"Thresholds are incorrect: got {thresholds}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "thresholds", thresholds)

    @property
    def d(self) -> int:
        return len(self.times)

    @property
    def suffix_mins(self) -> tuple[float, ...]:
        """min(x_q, ..., x_d) for q = 1..d."""
        reversed_mins = np.minimum.accumulate(self.thresholds[::-1])
        return tuple(float(m) for m in reversed_mins[::-1])

    def grid_indices(self, grid_points: int) -> np.ndarray:
        idx = np.rint(np.asarray(self.times) * grid_points).astype(np.int64)
        if idx[0] < 1:
            raise QueryError(
                f"Time {self.times[0]} is below the grid resolution 1/{grid_points}"
            )
        if np.any(np.diff(idx) <= 0):
            raise QueryError(
                f"Times {self.times} collapse onto the same grid points at resolution 1/{grid_points}"
            )
        return idx


@dataclass(frozen=True)
class PsiEstimate:
    x: float
    value: float
    std_error: float
    replicates: int
    grid_points: int


def _shot_scale(kappa: float, theta: float, hurst: float) -> float:
    if not 0.0 < theta <= 1.0:
        raise DomainError(
            f"Upper-tail weight is incorrect: expected theta in (0, 1], got {theta}"
        )
    return (kappa / theta) ** hurst


def _noise_for(hurst: float, kappa: float, theta: float) -> NoiseParams:
    return NoiseParams(
        hurst=hurst,
        kappa=kappa,
        theta=theta,
        law=SIGNED_PARETO if theta < 1.0 else PURE_PARETO,
    )


def sample_limit_paths(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    k: int,
    n_points: int,
    n_paths: int,
    seed: SeedToken,
    theta: float = 1.0,
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]:
    """Batched Z^H on the grid.

    Returns the (n_paths, n_points + 1) array of paths and the point arrays
    (gamma, eta, u, epsilon), each of shape (n_paths, k). The fBm and the
    points use separate streams of ``seed``, so growing k keeps both the
    path and the first k points.
    """
    h = Hurst.of(hurst).value
    if n_points < 2:
        raise DomainError(
            f"Grid size is incorrect: expected n_points >= 2, got {n_points}"
        )
    if k < 0:
        raise DomainError(
            f"Point count is incorrect: expected k >= 0, got {k}"
        )
    scale = _shot_scale(kappa, theta, h)

    paths = fbm_paths(
        h, n_points, n_paths, make_rng(sub_seed(seed, STREAM_FBM))
    )
    points = sample_point_processes(
        _noise_for(h, kappa, theta), k, n_paths, sub_seed(seed, STREAM_POINTS)
    )
    gamma, eta, u, signs = points
    if k > 0:
        idx = np.clip(np.rint(u * n_points).astype(np.int64), 1, n_points)
        rows = np.broadcast_to(np.arange(n_paths)[:, None], idx.shape)
        shots = np.where(
            signs > 0, paths[rows, idx] + scale * eta, -np.inf
        )
        np.maximum.at(paths, (rows, idx), shots)
    np.maximum.accumulate(paths, axis=1, out=paths)
    return paths, points


def sample_limit_path(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    k: int,
    n_points: int,
    seed: SeedToken,
    theta: float = 1.0,
) -> tuple[GridPath, PointSet]:
    """One path of Z^H and the k points behind it.

    ``PointSet.truncation_bound(kappa, theta)`` gives
    (kappa / theta)^H gamma_k^{-H}, a bound on the sup-norm distance to the
    untruncated process.
    """
    paths, (gamma, eta, u, signs) = sample_limit_paths(
        hurst, kappa, k, n_points, 1, seed, theta=theta
    )
    points = PointSet(
        eta=eta[0],
        u=u[0],
        epsilon=signs[0],
        gamma=gamma[0],
        hurst=Hurst.of(hurst).value,
    )
    logger.debug(
        f"Sampled limit path with k={k}, n_points={n_points}, "
        f"truncation bound {points.truncation_bound(kappa, theta):.4g}"
    )
    return GridPath(paths[0]), points


@dataclass(frozen=True)
class _LimitValuesTask:
    hurst: float
    kappa: float
    theta: float
    k: int
    grid_points: int
    size: int
    indices: tuple[int, ...]
    seed: tuple[int, ...]


def _limit_values_chunk(task: _LimitValuesTask) -> np.ndarray:
    paths, _ = sample_limit_paths(
        task.hurst,
        task.kappa,
        task.k,
        task.grid_points,
        task.size,
        task.seed,
        theta=task.theta,
    )
    return paths[:, list(task.indices)]


def limit_values_at(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    indices: typing.Sequence[int],
    reps: int,
    seed: SeedToken,
    k: int = DEFAULT_K,
    grid_points: int = DEFAULT_GRID_POINTS,
    theta: float = 1.0,
    threads: int = 1,
) -> np.ndarray:
    """Array (reps, len(indices)) of Z^H at the given grid indices.

    Replicates are drawn in fixed chunks keyed by chunk number, so the result
    is the same for every thread count.
    """
    if reps < 1:
        raise DomainError(
            f"Replicate count is incorrect: expected reps >= 1, got {reps}"
        )
    tasks = [
        _LimitValuesTask(
            hurst=Hurst.of(hurst).value,
            kappa=kappa,
            theta=theta,
            k=k,
            grid_points=grid_points,
            size=size,
            indices=tuple(int(i) for i in indices),
            seed=sub_seed(seed, chunk),
        )
        for chunk, size in enumerate(chunk_sizes(reps, REPLICATE_CHUNK))
    ]
    return np.concatenate(map_work_items(_limit_values_chunk, tasks, threads))


@dataclass(frozen=True)
class _FunctionalTask:
    hurst: float
    kappa: float
    grid_points: int
    size: int
    seed: tuple[int, ...]
    # One row per query: thresholds on grid points 0..end for the
    # exceedance check and on left endpoints 0..end-1 for the integral.
    check: np.ndarray
    integrand: np.ndarray


def _functional_chunk(task: _FunctionalTask) -> np.ndarray:
    """Exponential functional per replicate and query, shape (size, queries)."""
    b = fbm_paths(
        task.hurst,
        task.grid_points,
        task.size,
        make_rng(sub_seed(task.seed, STREAM_FBM)),
    )
    power = -1.0 / task.hurst
    out = np.empty((task.size, task.check.shape[0]))
    for q in range(task.check.shape[0]):
        check = task.check[q]
        integrand = task.integrand[q]
        end = check.shape[0]
        killed = np.any(check[None, :] - b[:, :end] < GAP_FLOOR, axis=1)
        gaps = integrand[None, :] - b[:, : end - 1]
        gaps = np.where(gaps < GAP_FLOOR, 1.0, gaps)
        riemann = np.sum(gaps**power, axis=1) / task.grid_points
        out[:, q] = np.where(killed, 0.0, np.exp(-task.kappa * riemann))
    return out


def _run_functional(
    hurst: float,
    kappa: float,
    check: np.ndarray,
    integrand: np.ndarray,
    replicates: int,
    grid_points: int,
    seed: SeedToken,
    threads: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error of the exponential functional for every query."""
    if replicates < 1:
        raise DomainError(
            f"Replicate count is incorrect: expected replicates >= 1, got {replicates}"
        )
    if grid_points < 2:
        raise DomainError(
            f"Grid size is incorrect: expected grid_points >= 2, got {grid_points}"
        )
    tasks = [
        _FunctionalTask(
            hurst=hurst,
            kappa=kappa,
            grid_points=grid_points,
            size=size,
            seed=sub_seed(seed, chunk),
            check=check,
            integrand=integrand,
        )
        for chunk, size in enumerate(chunk_sizes(replicates, REPLICATE_CHUNK))
    ]
    values = np.concatenate(map_work_items(_functional_chunk, tasks, threads))

    means = np.array([math.fsum(col) / replicates for col in values.T])
    if replicates > 1:
        std_errors = values.std(axis=0, ddof=1) / np.sqrt(replicates)
    else:
        std_errors = np.zeros(values.shape[1])
    return means, std_errors


def psi_curve(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    xs: typing.Sequence[float],
    replicates: int,
    grid_points: int,
    seed: SeedToken,
    threads: int = 1,
) -> list[PsiEstimate]:
    """Psi_H at every x from one set of fBm paths (common random numbers)."""
    h = Hurst.of(hurst).value
    xs = [float(x) for x in xs]
    positive = [x for x in xs if x > 0]

    results: dict[float, tuple[float, float]] = {}
    if positive:
        check = np.repeat(
            np.asarray(positive)[:, None], grid_points + 1, axis=1
        )
        means, std_errors = _run_functional(
            h,
            kappa,
            check,
            check[:, :-1],
            replicates,
            grid_points,
            seed,
            threads,
        )
        results = {
            x: (float(m), float(s))
            for x, m, s in zip(positive, means, std_errors)
        }

    return [
        PsiEstimate(
            x=x,
            value=results.get(x, (0.0, 0.0))[0],
            std_error=results.get(x, (0.0, 0.0))[1],
            replicates=replicates,
            grid_points=grid_points,
        )
        for x in xs
    ]


def psi_estimate(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    x: float,
    replicates: int,
    grid_points: int,
    seed: SeedToken,
    threads: int = 1,
) -> PsiEstimate:
    """Monte Carlo Psi_H(x) = P(Z^H_1 <= x); exactly 0 for x <= 0."""
    return psi_curve(
        hurst, kappa, [x], replicates, grid_points, seed, threads=threads
    )[0]


def _fdd_thresholds(
    q: FddQuery, grid_points: int
) -> tuple[np.ndarray, np.ndarray]:
    idx = q.grid_indices(grid_points)
    mins = np.asarray(q.suffix_mins)
    end = int(idx[-1])
    points = np.arange(end + 1)
    # Grid point t_q closes segment q and opens q + 1; the check uses the
    # smaller threshold of segment q, the integral starts segment q + 1.
    check = mins[np.searchsorted(idx, points, side="left")]
    integrand = mins[np.searchsorted(idx, points[:-1], side="right")]
    return check, integrand


def fdd_estimate(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    q: FddQuery,
    replicates: int,
    grid_points: int,
    seed: SeedToken,
    threads: int = 1,
) -> tuple[float, float]:
    """(probability, std_error) of P(Z_{t_1} <= x_1, ..., Z_{t_d} <= x_d)."""
    h = Hurst.of(hurst).value
    check, integrand = _fdd_thresholds(q, grid_points)
    if min(q.suffix_mins) <= 0:
        return 0.0, 0.0
    means, std_errors = _run_functional(
        h,
        kappa,
        check[None, :],
        integrand[None, :],
        replicates,
        grid_points,
        seed,
        threads,
    )
    return float(means[0]), float(std_errors[0])


def fdd_probability(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    q: FddQuery,
    replicates: int,
    grid_points: int,
    seed: SeedToken,
    threads: int = 1,
) -> float:
    return fdd_estimate(
        hurst, kappa, q, replicates, grid_points, seed, threads=threads
    )[0]


def fdd_marginal_cdf(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    t: float,
    xs: typing.Sequence[float],
    replicates: int,
    grid_points: int,
    seed: SeedToken,
    threads: int = 1,
) -> np.ndarray:
    """P(Z_t <= x) for every x, from one set of fBm paths."""
    h = Hurst.of(hurst).value
    end = int(FddQuery((t,), (1.0,)).grid_indices(grid_points)[-1])
    xs = np.asarray(xs, dtype=np.float64)
    out = np.zeros(xs.shape[0])
    positive = xs > 0
    if np.any(positive):
        check = np.repeat(xs[positive][:, None], end + 1, axis=1)
        means, _ = _run_functional(
            h,
            kappa,
            check,
            check[:, :-1],
            replicates,
            grid_points,
            seed,
            threads,
        )
        out[positive] = means
    return out


def self_similarity_test(
    hurst: typing.Union[Hurst, float],
    kappa: float,
    a: float,
    samples: int,
    seed: SeedToken,
    k: int = DEFAULT_K,
    grid_points: int = DEFAULT_GRID_POINTS,
    threads: int = 1,
) -> KsReport:
    """Two-sample KS of Z_a against a^H Z_1 from independent draws."""
    h = Hurst.of(hurst).value
    if not 0.0 < a <= 1.0:
        raise QueryError(f"Scale is incorrect: expected a in (0, 1], got {a}")
    idx_a = int(np.rint(a * grid_points))
    if idx_a < 1:
        raise QueryError(
            f"Scale {a} is below the grid resolution 1/{grid_points}"
        )

    z_a = limit_values_at(
        h,
        kappa,
        [idx_a],
        samples,
        sub_seed(seed, 0),
        k=k,
        grid_points=grid_points,
        threads=threads,
    )[:, 0]
    z_1 = limit_values_at(
        h,
        kappa,
        [grid_points],
        samples,
        sub_seed(seed, 1),
        k=k,
        grid_points=grid_points,
        threads=threads,
    )[:, 0]
    return ks_two_sample(z_a, a**h * z_1)
