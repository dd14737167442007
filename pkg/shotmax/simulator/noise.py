"""Heavy-tailed perturbations and the Poisson point process behind the shot noise.

Laws of a single perturbation Y (inverse transform of one uniform u):

    pure-pareto                 Y = kappa^H (1 - u)^{-H},  P(Y > x) = kappa x^{-1/H}
    shifted-pareto              Y = kappa^H ((1 - u)^{-H} - 1),
                                P(Y > x) = kappa (x + kappa^H)^{-1/H}
    pareto-with-negative-part   with probability theta a Pareto draw with
                                constant kappa0, otherwise a negative draw

For the signed law the positive branch uses kappa0 so that the overall upper
tail constant is theta * kappa0 = kappa.
"""

import logging
import typing
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field, model_validator

from shotmax.errors import DomainError
from shotmax.simulator.fbm import GridPath
from shotmax.utils.seeding import SeedToken, make_rng, sub_seed

logger = logging.getLogger(__name__)

PURE_PARETO = "pure-pareto"
SHIFTED_PARETO = "shifted-pareto"
SIGNED_PARETO = "pareto-with-negative-part"

NEGATIVE_EXPONENTIAL = "exponential"
NEGATIVE_PARETO = "pareto"

NoiseLaw = typing.Literal[
    "pure-pareto", "shifted-pareto", "pareto-with-negative-part"
]
NegativeLaw = typing.Literal["exponential", "pareto"]


class NoiseParams(BaseModel):
    hurst: float = Field(
        gt=0.0, lt=1.0, description="Hurst index, tail exponent is 1/H."
    )
    kappa: float = Field(gt=0.0, description="Upper tail constant.")
    theta: float = Field(
        default=1.0, ge=0.0, le=1.0, description="Upper-tail weight."
    )
    kappa0: typing.Optional[float] = Field(
        default=None,
        gt=0.0,
        description="Two-sided tail constant, kappa / theta when omitted.",
    )
    law: NoiseLaw = Field(
        default=PURE_PARETO, description="Law of the perturbations."
    )
    negative_law: NegativeLaw = Field(
        default=NEGATIVE_EXPONENTIAL,
        description="Law of the negative branch of the signed law.",
    )

    @model_validator(mode="after")
    def check_tail_constants(self) -> "NoiseParams":
        if self.theta > 0:
            if self.kappa0 is None:
                self.kappa0 = self.kappa / self.theta
            elif not np.isclose(self.kappa, self.kappa0 * self.theta):
                raise ValueError(
                    f"kappa must equal kappa0 * theta: got kappa={self.kappa}, "
                    f"kappa0={self.kappa0}, theta={self.theta}"
                )
        elif self.kappa0 is None:
            raise ValueError("kappa0 is required when theta = 0")
        if self.law != SIGNED_PARETO and self.theta != 1.0:
            raise ValueError(
                f"theta < 1 needs law '{SIGNED_PARETO}', got law '{self.law}'"
            )
        return self


def sample_perturbation(
    params: NoiseParams, u: typing.Union[float, np.ndarray]
) -> typing.Union[float, np.ndarray]:
    """Map uniform variates on [0, 1) to perturbations.

    Accepts a scalar or an array; returns the same shape.
    """
    u_arr = np.asarray(u, dtype=np.float64)
    if np.any((u_arr < 0.0) | (u_arr >= 1.0)) or np.any(np.isnan(u_arr)):
        raise DomainError(
            f"Uniform variate is incorrect: expected values in [0, 1), got {u}"
        )

    h = params.hurst
    if params.law == PURE_PARETO:
        out = params.kappa**h * (1.0 - u_arr) ** (-h)
    elif params.law == SHIFTED_PARETO:
        out = params.kappa**h * ((1.0 - u_arr) ** (-h) - 1.0)
    else:
        out = _signed_perturbation(params, u_arr)

    if np.ndim(u) == 0:
        return float(out)
    return out


def _signed_perturbation(params: NoiseParams, u: np.ndarray) -> np.ndarray:
    h = params.hurst
    theta = params.theta
    kappa0 = typing.cast(float, params.kappa0)
    positive = u < theta

    # Rescale u inside each branch so one uniform drives both the sign and the size.
    u_pos = np.where(positive, u / max(theta, 1e-300), 0.0)
    u_neg = np.where(positive, 0.0, (u - theta) / max(1.0 - theta, 1e-300))
    u_neg = np.minimum(u_neg, np.nextafter(1.0, 0.0))

    upper = kappa0**h * (1.0 - u_pos) ** (-h)
    if params.negative_law == NEGATIVE_PARETO:
        lower = -(kappa0**h) * (1.0 - u_neg) ** (-h)
    else:
        lower = np.log1p(-u_neg)
    return np.where(positive, upper, lower)


def sample_perturbations(
    params: NoiseParams,
    size: typing.Union[int, tuple],
    rng: np.random.Generator,
) -> np.ndarray:
    return typing.cast(
        np.ndarray, sample_perturbation(params, rng.random(size))
    )


def max_order_statistic_cdf(params: NoiseParams, n: int, x: float) -> float:
    """Fréchet limit of P(max_{i<=n} Y_i / n^H <= x), exp(-kappa x^{-1/H})."""
    if x <= 0:
        return 0.0
    if np.isinf(x):
        return 1.0
    return float(np.exp(-params.kappa * x ** (-1.0 / params.hurst)))


@dataclass(frozen=True)
class PointSet:
    """The k largest points of the Poisson process with intensity
    H^{-1} x^{-1-1/H} dx du, built from unit-rate arrivals gamma."""

    eta: np.ndarray
    u: np.ndarray
    epsilon: np.ndarray
    gamma: np.ndarray
    hurst: float

    @property
    def k(self) -> int:
        return int(self.eta.shape[0])

    @property
    def gamma_k(self) -> float:
        """Last arrival time; every omitted point has eta < gamma_k^{-H}."""
        if self.k == 0:
            return 0.0
        return float(self.gamma[-1])

    @property
    def threshold(self) -> float:
        if self.k == 0:
            return float("inf")
        return float(self.gamma[-1] ** (-self.hurst))

    def truncation_bound(self, kappa: float, theta: float = 1.0) -> float:
        """Sup-norm error bound (kappa / theta)^H gamma_k^{-H} of the
        k-truncation, the shot scale times the largest omitted point."""
        if not 0.0 < theta <= 1.0:
            raise DomainError(
                f"Upper-tail weight is incorrect: expected theta in (0, 1], got {theta}"
            )
        return (kappa / theta) ** self.hurst * self.threshold

    def __len__(self) -> int:
        return self.k


def _point_arrays(
    params: NoiseParams, k: int, n_sets: int, seed: SeedToken
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    # Arrivals, locations and signs come from separate streams and are drawn
    # point-major, so the first k points of a draw do not depend on k.
    arrivals = make_rng(sub_seed(seed, 0)).standard_exponential((k, n_sets))
    gamma = np.cumsum(arrivals.T, axis=1)
    eta = gamma ** (-params.hurst)
    u = make_rng(sub_seed(seed, 1)).random((k, n_sets)).T
    coins = make_rng(sub_seed(seed, 2)).random((k, n_sets)).T
    signs = np.where(coins < params.theta, 1, -1).astype(np.int8)
    return gamma, eta, np.ascontiguousarray(u), signs


def sample_point_processes(
    params: NoiseParams, k: int, n_sets: int, seed: SeedToken
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Batched draws: arrays (gamma, eta, u, epsilon) of shape (n_sets, k)."""
    if k < 0:
        raise DomainError(
            f"Point count is incorrect: expected k >= 0, got {k}"
        )
    return _point_arrays(params, k, n_sets, seed)


def sample_point_process(
    params: NoiseParams, k: int, seed: SeedToken
) -> PointSet:
    if k < 1:
        raise DomainError(
            f"Point count is incorrect: expected k >= 1, got {k}"
        )
    gamma, eta, u, signs = _point_arrays(params, k, 1, seed)
    return PointSet(
        eta=eta[0],
        u=u[0],
        epsilon=signs[0],
        gamma=gamma[0],
        hurst=params.hurst,
    )


def extremal_process(ps: PointSet, t: float) -> float:
    """V_t = max of eta_i over points with u_i <= t, 0 when none qualify."""
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Time is incorrect: expected t in [0, 1], got {t}")
    mask = ps.u <= t
    if not np.any(mask):
        return 0.0
    return float(ps.eta[mask].max())


def extremal_path(ps: PointSet, n_points: int) -> GridPath:
    """V on the grid j / n_points, each u_i rounded up to the next grid time."""
    values = np.zeros(n_points + 1)
    if ps.k:
        idx = np.minimum(np.ceil(ps.u * n_points).astype(np.int64), n_points)
        np.maximum.at(values, idx, ps.eta)
    return GridPath(np.maximum.accumulate(values))
