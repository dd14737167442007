from shotmax.simulation_input import ModelParams
from shotmax.simulator.simulations import WHICH_CHOICES, generate_path
from shotmax.utils.helpers import path_table
from shotmax.validator.experiment_config import SMOKE
from shotmax.validator.output_validation import validate_table

# python shotmax/simulator/run.py


def smoke_run(seed: int = 7) -> dict[str, str]:
    """Sample every path kind with the smoke preset and validate the tables."""
    params = ModelParams(**{**SMOKE.model_defaults(), "seed": seed})
    results = {}
    for which in WHICH_CHOICES:
        path = generate_path(which, params)
        print(which, "terminal value", path.values[-1])
        results[which] = validate_table("simulate", path_table(path))
    return results


if __name__ == "__main__":
    print(smoke_run())
