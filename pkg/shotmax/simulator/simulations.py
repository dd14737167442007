import typing

from shotmax.simulation_input import ModelParams
from shotmax.simulator.discrete_model import (
    max_process,
    scaled_path,
    simulate_walk,
)
from shotmax.simulator.fbm import GridPath
from shotmax.simulator.limit_process import sample_limit_path
from shotmax.simulator.noise import extremal_path, sample_point_process
from shotmax.utils.seeding import STREAM_LIMIT, STREAM_POINTS, sub_seed

WHICH_DISCRETE = "discrete"
WHICH_LIMIT = "limit"
WHICH_EXTREMAL = "extremal"
WHICH_CHOICES = [WHICH_DISCRETE, WHICH_LIMIT, WHICH_EXTREMAL]


def generate_path(
    which: str,
    params: ModelParams,
    seed: typing.Optional[int] = None,
) -> GridPath:
    """
    Generate one sample path.

    Parameters:
        which (str): "discrete" for Z_{n,.} on the grid j / n, "limit" for
            Z^H on the grid j / grid_points, "extremal" for V_t.
        params (ModelParams): Model and grid parameters.
        seed (int): Master seed, params.seed when omitted.

    Returns:
        GridPath: The sampled path.
    """
    seed = params.seed if seed is None else seed

    if which == WHICH_DISCRETE:
        walk = simulate_walk(params.walk_spec(), params.noise_params(), seed)
        return scaled_path(max_process(walk), params.n, params.hurst)

    if which == WHICH_LIMIT:
        path, _ = sample_limit_path(
            params.hurst,
            params.kappa,
            params.k,
            params.grid_points,
            sub_seed(seed, STREAM_LIMIT),
            theta=params.theta,
        )
        return path

    if which == WHICH_EXTREMAL:
        points = sample_point_process(
            params.noise_params(),
            max(params.k, 1),
            sub_seed(seed, STREAM_POINTS),
        )
        return extremal_path(points, params.grid_points)

    raise ValueError(
        f"Path kind is incorrect: expected one of {WHICH_CHOICES}, got {which}"
    )
