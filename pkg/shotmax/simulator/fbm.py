"""Exact fractional Gaussian noise and fractional Brownian motion on grids.

The covariance used throughout is the standard one,

    Cov(B_s, B_t) = (s^{2H} + t^{2H} - |s - t|^{2H}) / 2.

Some printed sources carry ``+ |s - t|^{2H}`` in this display. That form is
not positive semidefinite (at H = 1/2 it gives Var(B_s - B_t) = -|s - t|),
so it is read as a typographical slip and the minus sign is used.

Synthesis is circulant embedding: the autocovariance of the increments is
wrapped into a circulant of size 2n whose eigenvalues come from one FFT.
Eigenvalues in [-EIGENVALUE_TOLERANCE * max, 0) are clamped to zero; a more
negative one switches to a Cholesky factorization of the n x n covariance,
allowed up to CHOLESKY_MAX_SIZE points.
"""

import functools
import logging
import typing
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky

from shotmax.errors import DomainError, ShapeError, SynthesisError
from shotmax.utils.seeding import SeedToken, make_rng

logger = logging.getLogger(__name__)

EIGENVALUE_TOLERANCE = 1e-8
CHOLESKY_MAX_SIZE = 4096


@dataclass(frozen=True)
class Hurst:
    value: float

    def __post_init__(self):
        value = float(self.value)
        if not 0.0 < value < 1.0:
            raise DomainError(
                f"Hurst index is incorrect: expected a value in the open interval (0, 1), got {self.value}"
            )
        object.__setattr__(self, "value", value)

    @classmethod
    def of(cls, hurst: typing.Union["Hurst", float]) -> "Hurst":
        if isinstance(hurst, Hurst):
            return hurst
        return cls(float(hurst))

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class GridPath:
    """Piecewise-constant càdlàg path on the uniform grid t_j = j / n_points.

    ``values[j]`` is the value on [t_j, t_{j+1}); ``values[-1]`` is the value
    at t = 1.
    """

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.shape[0] < 2:
            raise ShapeError(
                f"Path shape is incorrect: expected at least 2 grid values, got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_points(self) -> int:
        return self.values.shape[0] - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_points + 1) / self.n_points

    def index_of(self, t: float) -> int:
        if not 0.0 <= t <= 1.0:
            raise DomainError(
                f"Time is incorrect: expected t in [0, 1], got {t}"
            )
        return min(int(np.floor(t * self.n_points + 1e-9)), self.n_points)

    def at(self, t: float) -> float:
        return float(self.values[self.index_of(t)])

    def __len__(self) -> int:
        return self.values.shape[0]


def fbm_covariance(
    hurst: typing.Union[Hurst, float], s: float, t: float
) -> float:
    """Covariance of fBm at times ``s`` and ``t``."""
    if s < 0 or t < 0:
        raise DomainError(
            f"Times are incorrect: expected non-negative s and t, got s={s}, t={t}"
        )
    two_h = 2.0 * Hurst.of(hurst).value
    return 0.5 * (s**two_h + t**two_h - abs(s - t) ** two_h)


def fgn_autocovariance(hurst: float, lags: np.ndarray) -> np.ndarray:
    """Autocovariance of unit-variance fractional Gaussian noise."""
    two_h = 2.0 * hurst
    k = np.abs(np.asarray(lags, dtype=np.float64))
    return 0.5 * (
        np.abs(k + 1) ** two_h - 2.0 * k**two_h + np.abs(k - 1) ** two_h
    )


@functools.lru_cache(maxsize=32)
def _circulant_eigenvalues(hurst: float, n: int) -> np.ndarray:
    """Eigenvalues of the 2n circulant embedding of the fGn covariance."""
    gamma = fgn_autocovariance(hurst, np.arange(n + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eigenvalues = np.fft.fft(row).real
    eigenvalues.setflags(write=False)
    return eigenvalues


@functools.lru_cache(maxsize=8)
def _cholesky_factor(hurst: float, n: int) -> np.ndarray:
    lags = np.subtract.outer(np.arange(n), np.arange(n))
    cov = fgn_autocovariance(hurst, lags)
    factor = cholesky(cov, lower=True)
    factor.setflags(write=False)
    return factor


@functools.lru_cache(maxsize=64)
def _warn_clamped(hurst: float, n: int, smallest: float) -> None:
    logger.warning(
        f"Clamping negative circulant eigenvalues down to {smallest:.3e} "
        f"for H={hurst}, n={n}"
    )


def _embedding_sqrt(hurst: float, n: int) -> np.ndarray | None:
    """Square roots of the clamped eigenvalues, or None when the embedding
    is not nonnegative-definite within tolerance."""
    eigenvalues = _circulant_eigenvalues(hurst, n)
    floor = -EIGENVALUE_TOLERANCE * float(eigenvalues.max())
    smallest = float(eigenvalues.min())
    if smallest < floor:
        if n > CHOLESKY_MAX_SIZE:
            raise SynthesisError(
                f"Circulant embedding failed for H={hurst}, n={n}: eigenvalue {smallest:.3e} "
                f"below tolerance and n exceeds the Cholesky limit {CHOLESKY_MAX_SIZE}",
                eigenvalue=smallest,
            )
        logger.warning(
            f"Circulant embedding has eigenvalue {smallest:.3e} for H={hurst}, n={n}; "
            "falling back to Cholesky factorization"
        )
        return None
    if smallest < 0:
        _warn_clamped(hurst, n, smallest)
    return np.sqrt(np.maximum(eigenvalues, 0.0) / eigenvalues.shape[0])


def sample_fgn_batch(
    hurst: typing.Union[Hurst, float],
    n: int,
    n_paths: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw ``n_paths`` independent fGn sequences of length ``n``.

    Returns an array of shape (n_paths, n).
    """
    h = Hurst.of(hurst).value
    if n < 1:
        raise DomainError(
            f"Sequence length is incorrect: expected n >= 1, got {n}"
        )

    sqrt_eigenvalues = _embedding_sqrt(h, n)
    if sqrt_eigenvalues is None:
        factor = _cholesky_factor(h, n)
        z = rng.standard_normal((n_paths, n))
        return z @ factor.T

    m = sqrt_eigenvalues.shape[0]
    w = rng.standard_normal((n_paths, m)) + 1j * rng.standard_normal(
        (n_paths, m)
    )
    # The real part of F diag(sqrt(lambda / m)) W has the embedded covariance.
    return np.fft.fft(sqrt_eigenvalues * w, axis=1).real[:, :n]


def sample_fgn(
    hurst: typing.Union[Hurst, float], n: int, seed: SeedToken
) -> np.ndarray:
    """Stationary unit-variance increments whose partial sums, scaled by
    n^{-H}, equal fBm in law at the grid points."""
    return sample_fgn_batch(hurst, n, 1, make_rng(seed))[0]


def fbm_paths(
    hurst: typing.Union[Hurst, float],
    n_points: int,
    n_paths: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Array of shape (n_paths, n_points + 1) of fBm grid values, column 0 = 0."""
    h = Hurst.of(hurst).value
    increments = sample_fgn_batch(h, n_points, n_paths, rng)
    paths = np.zeros((n_paths, n_points + 1))
    np.cumsum(increments, axis=1, out=paths[:, 1:])
    paths *= float(n_points) ** (-h)
    return paths


def fbm_path(
    hurst: typing.Union[Hurst, float], n_points: int, seed: SeedToken
) -> GridPath:
    if n_points < 1:
        raise DomainError(
            f"Grid size is incorrect: expected n_points >= 1, got {n_points}"
        )
    return GridPath(fbm_paths(hurst, n_points, 1, make_rng(seed))[0])
