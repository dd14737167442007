import typing

from pydantic import BaseModel, Field, model_validator

from shotmax.simulator.discrete_model import WalkSpec
from shotmax.simulator.noise import (
    NEGATIVE_EXPONENTIAL,
    PURE_PARETO,
    SIGNED_PARETO,
    NegativeLaw,
    NoiseLaw,
    NoiseParams,
)

IncrementLaw = typing.Literal["iid-gaussian", "fgn", "linear-long-memory"]


class ModelParams(BaseModel):
    """Everything an experiment needs to simulate both sides of the limit."""

    hurst: float = Field(
        default=0.5, gt=0.0, lt=1.0, description="Hurst index H."
    )
    kappa: float = Field(
        default=1.0, gt=0.0, description="Upper tail constant kappa."
    )
    theta: float = Field(
        default=1.0, ge=0.0, le=1.0, description="Upper-tail weight theta."
    )
    kappa0: typing.Optional[float] = Field(
        default=None, gt=0.0, description="Two-sided tail constant kappa0."
    )
    law: typing.Optional[NoiseLaw] = Field(
        default=None,
        description="Perturbation law, signed Pareto when theta < 1 and pure Pareto otherwise.",
    )
    negative_law: NegativeLaw = Field(
        default=NEGATIVE_EXPONENTIAL,
        description="Law of the negative perturbations.",
    )
    increments: IncrementLaw = Field(
        default="fgn", description="Increment generator of the random walk."
    )
    n: int = Field(default=1024, ge=1, description="Walk length.")
    k: int = Field(
        default=64, ge=0, description="Number of Poisson points kept in the limit."
    )
    grid_points: int = Field(
        default=4096, ge=2, description="Grid size of limit paths."
    )
    reps: int = Field(
        default=1000, ge=1, description="Monte Carlo replicates."
    )
    seed: int = Field(default=0, ge=0, lt=2**64, description="Master seed.")

    @model_validator(mode="after")
    def check_model(self) -> "ModelParams":
        if self.law is None:
            self.law = SIGNED_PARETO if self.theta < 1.0 else PURE_PARETO
        if self.increments == "iid-gaussian" and self.hurst != 0.5:
            raise ValueError(
                f"iid-gaussian increments need hurst = 0.5, got {self.hurst}"
            )
        # Build the noise model once so its own cross-field checks apply here.
        self.noise_params()
        return self

    def noise_params(self) -> NoiseParams:
        return NoiseParams(
            hurst=self.hurst,
            kappa=self.kappa,
            theta=self.theta,
            kappa0=self.kappa0,
            law=typing.cast(NoiseLaw, self.law),
            negative_law=self.negative_law,
        )

    def walk_spec(self, n: typing.Optional[int] = None) -> WalkSpec:
        return WalkSpec(
            increments=self.increments,
            hurst=self.hurst,
            n=self.n if n is None else n,
        )
