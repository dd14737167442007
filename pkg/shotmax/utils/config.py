import argparse
import typing

from pydantic import BaseModel, Field, ValidationError, model_validator

from shotmax.simulation_input import IncrementLaw, ModelParams
from shotmax.simulator.noise import NegativeLaw, NoiseLaw
from shotmax.validator.experiment_config import PRESETS, preset_from_label

COMMANDS = [
    "simulate",
    "psi",
    "fdd",
    "converge",
    "lepage",
    "sandwich",
    "pathdist",
]

MODEL_FIELDS = [
    "hurst",
    "kappa",
    "theta",
    "kappa0",
    "law",
    "negative_law",
    "increments",
    "n",
    "k",
    "grid_points",
    "reps",
    "seed",
]


def add_model_args(parser: argparse.ArgumentParser):
    """Model parameters; unset flags fall back to the preset, then to the
    ModelParams defaults."""

    parser.add_argument(
        "--hurst",
        type=float,
        help="Hurst index H in (0, 1).",
        default=None,
    )

    parser.add_argument(
        "--kappa",
        type=float,
        help="Upper tail constant kappa > 0.",
        default=None,
    )

    parser.add_argument(
        "--theta",
        type=float,
        help="Probability of a positive perturbation, in [0, 1].",
        default=None,
    )

    parser.add_argument(
        "--kappa0",
        type=float,
        help="Two-sided tail constant, kappa / theta when omitted.",
        default=None,
    )

    parser.add_argument(
        "--law",
        type=str,
        choices=list(typing.get_args(NoiseLaw)),
        help="Perturbation law.",
        default=None,
    )

    parser.add_argument(
        "--negative-law",
        dest="negative_law",
        type=str,
        choices=list(typing.get_args(NegativeLaw)),
        help="Law of the negative perturbations.",
        default=None,
    )

    parser.add_argument(
        "--increments",
        type=str,
        choices=list(typing.get_args(IncrementLaw)),
        help="Increment generator of the random walk.",
        default=None,
    )

    parser.add_argument(
        "--n",
        type=int,
        help="Walk length.",
        default=None,
    )

    parser.add_argument(
        "--k",
        type=int,
        help="Number of Poisson points kept in the limit process.",
        default=None,
    )

    parser.add_argument(
        "--grid",
        "--grid-points",
        dest="grid_points",
        type=int,
        help="Grid size of limit paths and Monte Carlo integrals.",
        default=None,
    )

    parser.add_argument(
        "--reps",
        type=int,
        help="Monte Carlo replicates.",
        default=None,
    )

    parser.add_argument(
        "--seed",
        type=int,
        help="Master seed (unsigned 64-bit).",
        default=None,
    )

    parser.add_argument(
        "--preset",
        type=str,
        choices=[preset.label for preset in PRESETS],
        help="Take unset model parameters from an experiment preset.",
        default=None,
    )


def add_output_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--format",
        dest="out_format",
        type=str,
        choices=["csv", "json"],
        help="Output format.",
        default="csv",
    )

    parser.add_argument(
        "--out",
        dest="out_path",
        type=str,
        help="Output file, standard output when omitted or '-'.",
        default="-",
    )


def add_run_args(parser: argparse.ArgumentParser):
    parser.add_argument(
        "--threads",
        type=int,
        help="Maximum number of worker processes; output does not depend on it.",
        default=1,
    )

    parser.add_argument(
        "--log-level",
        dest="log_level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Level of the diagnostics written to standard error.",
        default="WARNING",
    )

    parser.add_argument(
        "--log-dir",
        dest="log_dir",
        type=str,
        help="If set, experiment rows are also appended to events.log in this directory.",
        default=None,
    )


class RunConfig(BaseModel):
    command: typing.Literal[
        "simulate", "psi", "fdd", "converge", "lepage", "sandwich", "pathdist"
    ]
    hurst: float = Field(
        default=0.5, gt=0.0, lt=1.0, description="Hurst index H in (0, 1)."
    )
    kappa: float = Field(default=1.0, gt=0.0)
    theta: float = Field(default=1.0, ge=0.0, le=1.0)
    kappa0: typing.Optional[float] = Field(default=None, gt=0.0)
    law: typing.Optional[NoiseLaw] = None
    negative_law: typing.Optional[NegativeLaw] = None
    increments: typing.Optional[IncrementLaw] = None
    n: int = Field(default=1024, ge=1)
    k: int = Field(default=64, ge=0)
    grid_points: int = Field(default=4096, ge=2)
    reps: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    threads: int = Field(default=1, ge=1)
    out_format: typing.Literal["csv", "json"] = "csv"
    out_path: str = "-"

    @model_validator(mode="after")
    def check_model(self) -> "RunConfig":
        try:
            self.model_params()
        except ValidationError as e:
            raise ValueError(first_error(e)) from None
        return self

    def model_params(self) -> ModelParams:
        values = {
            name: getattr(self, name)
            for name in MODEL_FIELDS
            if getattr(self, name) is not None
        }
        return ModelParams(**values)


def first_error(e: ValidationError) -> str:
    """One-line description of the first validation error."""
    error = e.errors()[0]
    location = ".".join(str(part) for part in error.get("loc", ()))
    message = error.get("msg", str(e))
    if location:
        return f"{location}: {message} (got {error.get('input')!r})"
    return message


def run_config_from_args(args: argparse.Namespace) -> RunConfig:
    """Merge parsed flags over the preset and validate."""
    values: dict[str, typing.Any] = {}
    if getattr(args, "preset", None):
        defaults = preset_from_label(args.preset).model_defaults()
        values.update(
            {k: v for k, v in defaults.items() if k in MODEL_FIELDS}
        )
    values.update(
        {
            name: getattr(args, name)
            for name in MODEL_FIELDS
            if getattr(args, name, None) is not None
        }
    )
    return RunConfig(
        command=args.command,
        threads=args.threads,
        out_format=args.out_format,
        out_path=args.out_path,
        **values,
    )
