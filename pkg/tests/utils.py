import io

import numpy as np
import pandas as pd

from shotmax.simulator.discrete_model import PerturbedWalk
from shotmax.simulator.fbm import GridPath


def walk_from_steps(steps, perturbations) -> PerturbedWalk:
    """Walk with S_0 = Y_0 = 0 built from X_1..X_n and Y_1..Y_n."""
    s = np.concatenate([[0.0], np.cumsum(np.asarray(steps, dtype=float))])
    y = np.concatenate([[0.0], np.asarray(perturbations, dtype=float)])
    return PerturbedWalk(s=s, y=y)


def step_path(values) -> GridPath:
    return GridPath(np.asarray(values, dtype=float))


def data_lines(text: str) -> list[str]:
    """Lines of an emitted CSV table without the metadata block."""
    return [line for line in text.splitlines() if not line.startswith("#")]


def meta_lines(text: str) -> dict:
    meta = {}
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            meta[key] = value
    return meta


def csv_frame(text: str) -> pd.DataFrame:
    return pd.read_csv(io.StringIO(text), comment="#")
