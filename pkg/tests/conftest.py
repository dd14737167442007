import logging

import pytest

from shotmax.simulation_input import ModelParams


@pytest.fixture(autouse=True)
def quiet_events_logger():
    """Drop handlers a test attached to the events logger."""
    events = logging.getLogger("shotmax.event")
    handlers = list(events.handlers)
    level = events.level
    yield
    events.setLevel(level)
    for handler in list(events.handlers):
        if handler not in handlers:
            events.removeHandler(handler)
            handler.close()


@pytest.fixture
def small_params() -> ModelParams:
    return ModelParams(
        hurst=0.5,
        kappa=1.0,
        n=64,
        k=8,
        grid_points=64,
        reps=100,
        seed=11,
    )


@pytest.fixture
def signed_params() -> ModelParams:
    return ModelParams(
        hurst=0.7,
        kappa=1.0,
        theta=0.5,
        n=64,
        k=8,
        grid_points=64,
        reps=100,
        seed=12,
    )
