"""Distances and regularity statistics for piecewise-constant grid paths.

The J1 distance is minimised over time changes that map grid points to grid
points. On a common grid of N intervals such a time change is a monotone
alignment of indices (i, j) from (a, a) to (b, b), and the objective

    max( sup |lambda(t) - t| , sup |x(t) - y(lambda(t))| )

becomes the bottleneck cost of the alignment with cell cost
max(|i - j| / N, |x_i - y_j|). Paths on different grids are first refined to
the least common multiple of the two grid sizes, which is lossless for step
paths.
"""

import itertools
import logging
import math
import typing
from dataclasses import dataclass

import numpy as np
import pandas as pd
from numba import njit

from shotmax.errors import DomainError, ShapeError
from shotmax.simulator.fbm import GridPath

logger = logging.getLogger(__name__)

MAX_REFINED_POINTS = 1 << 16
BRUTEFORCE_MAX_POINTS = 8
EXACT_CANDIDATE_LIMIT = 2048
BISECTION_STEPS = 64


@dataclass(frozen=True)
class TimeChange:
    """Piecewise-linear increasing map of [a, b] onto itself, given by
    matched breakpoints (s_k, lambda(s_k))."""

    knots: tuple[float, ...]
    images: tuple[float, ...]

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=np.float64)
        images = np.asarray(self.images, dtype=np.float64)
        if knots.shape != images.shape or knots.shape[0] < 2:
            raise ShapeError(
                f"Breakpoints are incorrect: expected matched pairs, got {knots.shape} and {images.shape}"
            )
        if knots[0] != images[0] or knots[-1] != images[-1]:
            raise DomainError(
                f"Time change must fix the endpoints, got {knots[0]}->{images[0]} and {knots[-1]}->{images[-1]}"
            )
        if np.any(np.diff(knots) <= 0) or np.any(np.diff(images) <= 0):
            raise DomainError("Time change must be strictly increasing")
        object.__setattr__(self, "knots", tuple(knots.tolist()))
        object.__setattr__(self, "images", tuple(images.tolist()))

    @classmethod
    def identity(cls, a: float = 0.0, b: float = 1.0) -> "TimeChange":
        return cls((a, b), (a, b))

    def __call__(self, t):
        return np.interp(t, self.knots, self.images)

    def sup_displacement(self) -> float:
        """sup |lambda(t) - t|, attained at a breakpoint."""
        return float(np.max(np.abs(np.subtract(self.images, self.knots))))


def _check_interval(a: float, b: float):
    if not 0.0 <= a < b <= 1.0:
        raise DomainError(
            f"Interval is incorrect: expected 0 <= a < b <= 1, got [{a}, {b}]"
        )


def _index_range(n_points: int, a: float, b: float) -> tuple[int, int]:
    _check_interval(a, b)
    lo = int(math.ceil(a * n_points - 1e-9))
    hi = int(math.floor(b * n_points + 1e-9))
    if hi <= lo:
        raise ShapeError(
            f"Interval [{a}, {b}] holds fewer than two grid points at resolution 1/{n_points}"
        )
    return lo, hi


def refine(x: GridPath, n_points: int) -> np.ndarray:
    """Values of the step path ``x`` on the finer grid j / n_points."""
    if n_points % x.n_points:
        raise ShapeError(
            f"Grid {n_points} is not a refinement of grid {x.n_points}"
        )
    factor = n_points // x.n_points
    return np.concatenate(
        [np.repeat(x.values[:-1], factor), x.values[-1:]]
    )


def common_refinement(
    x: GridPath, y: GridPath
) -> tuple[np.ndarray, np.ndarray, int]:
    n_points = math.lcm(x.n_points, y.n_points)
    if n_points > MAX_REFINED_POINTS:
        raise ShapeError(
            f"Common refinement of grids {x.n_points} and {y.n_points} has "
            f"{n_points} points, above the limit {MAX_REFINED_POINTS}"
        )
    return refine(x, n_points), refine(y, n_points), n_points


def sup_distance(
    x: GridPath, y: GridPath, a: float = 0.0, b: float = 1.0
) -> float:
    if x.n_points != y.n_points:
        raise ShapeError(
            f"Grids are incorrect: expected a common grid, got {x.n_points} and {y.n_points}"
        )
    lo, hi = _index_range(x.n_points, a, b)
    return float(np.max(np.abs(x.values[lo : hi + 1] - y.values[lo : hi + 1])))


@njit(cache=True)
def _bottleneck_alignment(x, y, n_points, band):
    """Smallest bottleneck cost over monotone alignments of x and y."""
    m = x.shape[0]
    prev = np.full(m, np.inf)
    cur = np.full(m, np.inf)
    for i in range(m):
        for j in range(m):
            cur[j] = np.inf
        j_lo = max(0, i - band)
        j_hi = min(m - 1, i + band)
        for j in range(j_lo, j_hi + 1):
            cost = max(abs(i - j) / n_points, abs(x[i] - y[j]))
            if i == 0 and j == 0:
                cur[j] = cost
                continue
            best = np.inf
            if i > 0:
                best = min(best, prev[j])
                if j > 0:
                    best = min(best, prev[j - 1])
            if j > 0:
                best = min(best, cur[j - 1])
            cur[j] = max(cost, best)
        prev, cur = cur, prev
    return prev[m - 1]


def skorohod_j1(
    x: GridPath, y: GridPath, a: float = 0.0, b: float = 1.0
) -> float:
    """J1 distance on D[a, b] over grid-aligned time changes."""
    xv, yv, n_points = common_refinement(x, y)
    lo, hi = _index_range(n_points, a, b)
    xv = np.ascontiguousarray(xv[lo : hi + 1])
    yv = np.ascontiguousarray(yv[lo : hi + 1])

    # Cells displaced by more than the identity cost never improve on it.
    upper = float(np.max(np.abs(xv - yv)))
    band = min(int(math.floor(upper * n_points + 1e-9)), xv.shape[0] - 1)
    return float(_bottleneck_alignment(xv, yv, n_points, band))


def skorohod_j1_bruteforce(
    x: GridPath, y: GridPath, a: float = 0.0, b: float = 1.0
) -> float:
    """Exhaustive minimum over every monotone alignment (small grids only)."""
    xv, yv, n_points = common_refinement(x, y)
    lo, hi = _index_range(n_points, a, b)
    if hi - lo + 1 > BRUTEFORCE_MAX_POINTS:
        raise DomainError(
            f"Brute force is limited to {BRUTEFORCE_MAX_POINTS} grid points, got {hi - lo + 1}"
        )
    xv = xv[lo : hi + 1]
    yv = yv[lo : hi + 1]
    last = xv.shape[0] - 1

    def cost(i: int, j: int) -> float:
        return max(abs(i - j) / n_points, abs(float(xv[i]) - float(yv[j])))

    def walk(i: int, j: int, worst: float) -> float:
        worst = max(worst, cost(i, j))
        if i == last and j == last:
            return worst
        best = math.inf
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i + di <= last and j + dj <= last:
                best = min(best, walk(i + di, j + dj, worst))
        return best

    return walk(0, 0, 0.0)


def time_change_cost(x: GridPath, y: GridPath, lam: TimeChange) -> float:
    """max(sup |lambda - id|, sup |x - y o lambda|) over the grid of ``x``."""
    times = x.times
    mapped = np.clip(lam(times), 0.0, 1.0)
    y_mapped = np.array([y.at(float(t)) for t in mapped])
    return max(
        lam.sup_displacement(), float(np.max(np.abs(x.values - y_mapped)))
    )


def _window(n_points: int, delta: float) -> int:
    return int(math.floor(delta * n_points + 1e-9))


def uniform_modulus(x: GridPath, delta: float) -> float:
    """sup |x_s - x_t| over grid times with |s - t| <= delta."""
    if not 0.0 < delta <= 1.0:
        raise DomainError(
            f"Delta is incorrect: expected 0 < delta <= 1, got {delta}"
        )
    w = _window(x.n_points, delta)
    if w == 0:
        return 0.0
    series = pd.Series(x.values)
    rolling = series.rolling(w + 1, min_periods=1)
    return float((rolling.max() - rolling.min()).max())


def max_jump(x: GridPath) -> float:
    return float(np.max(np.abs(np.diff(x.values))))


@njit(cache=True)
def _partition_feasible(values, min_length, eps):
    """True when [0, N) splits into pieces of at least ``min_length`` grid
    intervals whose oscillation is at most ``eps``."""
    n = values.shape[0] - 1
    reach_count = np.zeros(n + 2, dtype=np.int64)
    reach_count[1] = 1  # index 0 is reachable
    max_q = np.empty(n, dtype=np.int64)
    min_q = np.empty(n, dtype=np.int64)
    max_head = 0
    max_tail = 0
    min_head = 0
    min_tail = 0
    start = 0
    reachable = False
    for p in range(1, n + 1):
        k = p - 1
        while max_tail > max_head and values[max_q[max_tail - 1]] <= values[k]:
            max_tail -= 1
        max_q[max_tail] = k
        max_tail += 1
        while min_tail > min_head and values[min_q[min_tail - 1]] >= values[k]:
            min_tail -= 1
        min_q[min_tail] = k
        min_tail += 1
        while values[max_q[max_head]] - values[min_q[min_head]] > eps:
            start += 1
            if max_q[max_head] < start:
                max_head += 1
            if min_q[min_head] < start:
                min_head += 1
        # Piece [q, p) is admissible for start <= q <= p - min_length.
        last = p - min_length
        reachable = (
            last >= start and reach_count[last + 1] - reach_count[start] > 0
        )
        reach_count[p + 1] = reach_count[p] + (1 if reachable else 0)
    return reachable


def partition_modulus(x: GridPath, delta: float) -> float:
    """inf over partitions with pieces longer than delta of the largest
    oscillation inside a piece [t_{i-1}, t_i)."""
    if not 0.0 < delta < 1.0:
        raise DomainError(
            f"Delta is incorrect: expected 0 < delta < 1, got {delta}"
        )
    values = np.ascontiguousarray(x.values, dtype=np.float64)
    min_length = _window(x.n_points, delta) + 1
    body = values[:-1]

    unique = np.unique(body)
    if unique.shape[0] <= EXACT_CANDIDATE_LIMIT:
        candidates = np.unique(
            np.abs(np.subtract.outer(unique, unique)).ravel()
        )
        lo, hi = 0, candidates.shape[0] - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if _partition_feasible(values, min_length, candidates[mid]):
                hi = mid
            else:
                lo = mid + 1
        return float(candidates[lo])

    logger.debug(
        f"{unique.shape[0]} distinct values, bisecting the partition modulus"
    )
    lo_eps, hi_eps = 0.0, float(unique[-1] - unique[0])
    for _ in range(BISECTION_STEPS):
        mid_eps = 0.5 * (lo_eps + hi_eps)
        if _partition_feasible(values, min_length, mid_eps):
            hi_eps = mid_eps
        else:
            lo_eps = mid_eps
    return hi_eps


def partition_modulus_bruteforce(x: GridPath, delta: float) -> float:
    """Exhaustive minimum over all admissible grid partitions."""
    if not 0.0 < delta < 1.0:
        raise DomainError(
            f"Delta is incorrect: expected 0 < delta < 1, got {delta}"
        )
    if len(x) > BRUTEFORCE_MAX_POINTS:
        raise DomainError(
            f"Brute force is limited to {BRUTEFORCE_MAX_POINTS} grid points, got {len(x)}"
        )
    n = x.n_points
    min_length = _window(n, delta) + 1
    best = math.inf
    for size in range(n):
        for interior in itertools.combinations(range(1, n), size):
            cuts = (0,) + interior + (n,)
            if any(q - p < min_length for p, q in zip(cuts, cuts[1:])):
                continue
            worst = max(
                float(np.ptp(x.values[p:q])) for p, q in zip(cuts, cuts[1:])
            )
            best = min(best, worst)
    return best


def random_step_path(
    rng: np.random.Generator,
    n_points: int,
    n_jumps: typing.Optional[int] = None,
) -> GridPath:
    """Step path with jumps at random grid points and normal jump sizes."""
    if n_jumps is None:
        n_jumps = int(rng.integers(0, n_points + 1))
    increments = np.zeros(n_points)
    where = rng.choice(n_points, size=min(n_jumps, n_points), replace=False)
    increments[where] = rng.standard_normal(where.shape[0])
    return GridPath(np.concatenate([[0.0], np.cumsum(increments)]))
