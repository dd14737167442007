"""Perturbed random walk S_i + Y_i and its maximum process.

Increment generators:
    iid-gaussian        standard normal steps (H = 1/2 only)
    fgn                 exact fractional Gaussian noise, so S_{[nt]} / n^H is
                        fBm at every grid point
    linear-long-memory  X_t = c * sum_j psi_j e_{t-j}, psi the fractional
                        integration weights of order d = H - 1/2 (psi_j ~ j^{H-3/2}),
                        c chosen so that Var(S_n) = n^{2H} exactly
"""

import functools
import logging
import typing
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, model_validator
from scipy.signal import fftconvolve

from shotmax.errors import DomainError, ShapeError
from shotmax.simulator.fbm import GridPath, Hurst, sample_fgn_batch
from shotmax.simulator.noise import NoiseParams, sample_perturbations
from shotmax.utils.seeding import (
    STREAM_NOISE,
    STREAM_WALK,
    SeedToken,
    make_rng,
    sub_seed,
)

logger = logging.getLogger(__name__)

IID_GAUSSIAN = "iid-gaussian"
FGN = "fgn"
LINEAR_LONG_MEMORY = "linear-long-memory"


class WalkSpec(BaseModel):
    increments: typing.Literal["iid-gaussian", "fgn", "linear-long-memory"] = (
        Field(default=FGN, description="Increment generator.")
    )
    hurst: float = Field(
        gt=0.0, lt=1.0, description="Target scaling exponent."
    )
    n: int = Field(ge=1, description="Number of steps.")
    memory: typing.Optional[int] = Field(
        default=None,
        ge=1,
        description="Number of linear-process weights, n when omitted.",
    )

    @model_validator(mode="after")
    def check_increments(self) -> "WalkSpec":
        if self.increments == IID_GAUSSIAN and self.hurst != 0.5:
            raise ValueError(
                f"iid-gaussian increments need hurst = 0.5, got {self.hurst}"
            )
        return self


@dataclass(frozen=True)
class PerturbedWalk:
    """Walk s = (S_0, ..., S_n) and perturbations y = (Y_0, ..., Y_n), S_0 = Y_0 = 0."""

    s: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.s.shape != self.y.shape or self.s.ndim != 1:
            raise ShapeError(
                f"Walk shape is incorrect: s has shape {self.s.shape}, y has shape {self.y.shape}"
            )
        if self.s[0] != 0 or self.y[0] != 0:
            raise ShapeError(
                f"Walk origin is incorrect: expected s[0] = y[0] = 0, got {self.s[0]}, {self.y[0]}"
            )

    @property
    def n(self) -> int:
        return self.s.shape[0] - 1


@functools.lru_cache(maxsize=16)
def _linear_weights(
    hurst: float, n: int, memory: int
) -> tuple[np.ndarray, float]:
    """Fractional integration weights and the constant making Var(S_n) = n^{2H}."""
    d = hurst - 0.5
    psi = np.empty(memory)
    psi[0] = 1.0
    for j in range(1, memory):
        psi[j] = psi[j - 1] * ((j - 1 + d) / j)

    # Innovation e_i enters S_n through the partial sums of psi over the
    # lags that land inside steps 1..n.
    cumulative = np.concatenate([[0.0], np.cumsum(psi)])
    i = np.arange(n + memory - 1)
    lo = np.maximum(0, memory - 1 - i)
    hi = np.minimum(memory - 1, n + memory - 2 - i)
    weights = cumulative[hi + 1] - cumulative[lo]
    variance = float(np.sum(weights**2))
    scale = float(n) ** hurst / np.sqrt(variance)
    psi.setflags(write=False)
    return psi, scale


def sample_increments(
    spec: WalkSpec, n_paths: int, rng: np.random.Generator
) -> np.ndarray:
    """Array (n_paths, n) of walk increments X_1..X_n."""
    if spec.increments == IID_GAUSSIAN:
        return rng.standard_normal((n_paths, spec.n))
    if spec.increments == FGN:
        return sample_fgn_batch(spec.hurst, spec.n, n_paths, rng)

    memory = spec.memory or spec.n
    psi, scale = _linear_weights(spec.hurst, spec.n, memory)
    innovations = rng.standard_normal((n_paths, spec.n + memory - 1))
    return scale * fftconvolve(innovations, psi[None, :], mode="valid", axes=1)


def simulate_walks(
    spec: WalkSpec,
    noise: NoiseParams,
    n_paths: int,
    seed: SeedToken,
) -> tuple[np.ndarray, np.ndarray]:
    """Batched walks: arrays s and y of shape (n_paths, n + 1)."""
    walk_rng = make_rng(sub_seed(seed, STREAM_WALK))
    noise_rng = make_rng(sub_seed(seed, STREAM_NOISE))

    s = np.zeros((n_paths, spec.n + 1))
    np.cumsum(sample_increments(spec, n_paths, walk_rng), axis=1, out=s[:, 1:])

    y = np.zeros((n_paths, spec.n + 1))
    y[:, 1:] = sample_perturbations(noise, (n_paths, spec.n), noise_rng)
    return s, y


def simulate_walk(
    spec: WalkSpec, noise: NoiseParams, seed: SeedToken
) -> PerturbedWalk:
    s, y = simulate_walks(spec, noise, 1, seed)
    return PerturbedWalk(s=s[0], y=y[0])


def running_max(
    s: np.ndarray, y: np.ndarray, include_origin: bool = False
) -> np.ndarray:
    """M along the last axis of (batched) arrays, M_0 = 0."""
    out = np.zeros(np.shape(s))
    if out.shape[-1] > 1:
        np.maximum.accumulate(
            s[..., 1:] + y[..., 1:], axis=-1, out=out[..., 1:]
        )
    if include_origin:
        np.maximum(out, 0.0, out=out)
    return out


def max_process(w: PerturbedWalk, include_origin: bool = False) -> np.ndarray:
    """M_0 = 0 and M_i = max_{j=1..i}(S_j + Y_j).

    With ``include_origin`` the maximum also runs over j = 0, where
    S_0 + Y_0 = 0; the one-sided processes are defined that way.
    """
    return running_max(w.s, w.y, include_origin=include_origin)


def scaled_path(
    m: np.ndarray, n: int, hurst: typing.Union[Hurst, float]
) -> GridPath:
    """Z_{n, j/n} = M_j / n^H."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != (n + 1,):
        raise ShapeError(
            f"Maximum process length is incorrect: expected {n + 1}, got {m.shape}"
        )
    return GridPath(m * float(n) ** (-Hurst.of(hurst).value))


def order_statistic(y: np.ndarray, k: int) -> float:
    """k-th largest of y[1..n] (k = 1 is the maximum)."""
    body = np.asarray(y)[1:]
    if not 1 <= k <= body.shape[0]:
        raise DomainError(
            f"Order statistic rank is incorrect: expected 1 <= k <= {body.shape[0]}, got {k}"
        )
    return float(np.partition(body, body.shape[0] - k)[body.shape[0] - k])


def truncated_scaled_path(
    w: PerturbedWalk, k: int, hurst: typing.Union[Hurst, float]
) -> GridPath:
    """Z^(k): keep the perturbations at least as large as the k-th largest.

    Ties with the k-th largest are all kept, so more than k values may survive.
    """
    if not 1 <= k <= w.n:
        raise DomainError(
            f"Truncation level is incorrect: expected 1 <= k <= {w.n}, got {k}"
        )
    threshold = order_statistic(w.y, k)
    kept = np.where(w.y >= threshold, w.y, 0.0)
    kept[0] = 0.0
    m = running_max(w.s, kept)
    return scaled_path(m, w.n, hurst)


def one_sided_maxima(
    s: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Unscaled (M^{-inf}, M^0) along the last axis, origin included."""
    nonneg = y >= 0
    minus_inf = np.where(nonneg, s + y, -np.inf)
    minus_inf[..., 0] = 0.0
    zero = s + np.where(nonneg, y, 0.0)
    zero[..., 0] = 0.0
    return (
        np.maximum.accumulate(minus_inf, axis=-1),
        np.maximum.accumulate(zero, axis=-1),
    )


def one_sided_paths(
    w: PerturbedWalk, hurst: typing.Union[Hurst, float]
) -> tuple[GridPath, GridPath]:
    """(Z^{-inf}, Z^0): negative perturbations set to -inf, resp. to 0.

    Both maxima run over i = 0..[nt] with S_0 + Y_0 = 0, so
    Z^{-inf} <= max_process(w, include_origin=True) / n^H <= Z^0 pathwise.
    """
    lower, upper = one_sided_maxima(w.s, w.y)
    return scaled_path(lower, w.n, hurst), scaled_path(upper, w.n, hurst)


def longest_nonneg_gap(y: np.ndarray) -> int:
    """Largest gap between consecutive indices with y >= 0, closed at n.

    Index 0 always qualifies (Y_0 = 0); the last gap runs to n even when
    Y_n < 0.
    """
    y = np.asarray(y)
    n = y.shape[0] - 1
    if n < 1:
        raise ShapeError(
            f"Sequence length is incorrect: expected n >= 1, got {n}"
        )
    taus = np.flatnonzero(y >= 0)
    if taus.size == 0 or taus[0] != 0:
        taus = np.concatenate([[0], taus])
    taus = np.concatenate([taus, [n]])
    return int(np.diff(taus).max())


def longest_nonneg_gaps(y: np.ndarray) -> np.ndarray:
    """Row-wise ``longest_nonneg_gap`` for a batch of shape (n_paths, n + 1)."""
    y = np.asarray(y)
    n = y.shape[1] - 1
    index = np.arange(n + 1)
    qualifying = y >= 0
    qualifying[:, 0] = True
    # Last qualifying index at or before each position.
    last = np.maximum.accumulate(np.where(qualifying, index, 0), axis=1)
    gaps = np.where(qualifying[:, 1:], index[1:] - last[:, :-1], 0)
    tail = n - last[:, -1]
    return np.maximum(gaps.max(axis=1), tail)
