from dataclasses import dataclass


@dataclass
class ExperimentConfig:
    label: str
    hurst: float
    kappa: float
    theta: float
    n_list: list[int]
    reps: int
    n: int = 1 << 14
    k: int = 64  # points kept in the limit process
    grid_points: int = 1 << 12
    ranks: int = 10

    def model_defaults(self) -> dict:
        """Argument defaults for the command line parser."""
        return {
            "hurst": self.hurst,
            "kappa": self.kappa,
            "theta": self.theta,
            "n": self.n,
            "k": self.k,
            "grid_points": self.grid_points,
            "reps": self.reps,
            "n_list": self.n_list,
        }


ACCEPTANCE_CONVERGENCE = ExperimentConfig(
    label="convergence",
    hurst=0.5,
    kappa=1.0,
    theta=1.0,
    n_list=[1 << 8, 1 << 10, 1 << 12, 1 << 14],
    reps=5000,
)

ACCEPTANCE_SANDWICH = ExperimentConfig(
    label="sandwich",
    hurst=0.5,
    kappa=1.0,
    theta=0.5,
    n_list=[1 << 8, 1 << 10, 1 << 12, 1 << 14],
    reps=5000,
)

ACCEPTANCE_LEPAGE = ExperimentConfig(
    label="lepage",
    hurst=0.5,
    kappa=1.0,
    theta=1.0,
    n_list=[1 << 14],
    reps=5000,
    ranks=10,
)

SMOKE = ExperimentConfig(
    label="smoke",
    hurst=0.7,
    kappa=1.0,
    theta=0.5,
    n_list=[1 << 6, 1 << 8],
    reps=200,
    n=1 << 8,
    k=16,
    grid_points=1 << 8,
    ranks=3,
)

PRESETS = [
    ACCEPTANCE_CONVERGENCE,
    ACCEPTANCE_SANDWICH,
    ACCEPTANCE_LEPAGE,
    SMOKE,
]


def preset_from_label(label: str) -> ExperimentConfig:
    """Return the experiment preset registered under ``label``."""
    for preset in PRESETS:
        if preset.label == label:
            return preset
    raise ValueError(
        f"preset_from_label: unknown label {label!r} "
        f"(known: {', '.join(p.label for p in PRESETS)})"
    )
