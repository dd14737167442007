import asyncio
import inspect
import logging

from rich.logging import RichHandler

from shotmax.simulation_input import ModelParams
from shotmax.utils.logging import (
    EVENTS_LEVEL_NUM,
    log_event,
    print_execution_time,
    setup_events_logger,
    setup_logging,
)
from shotmax.validator.experiments import truncation_experiment


def test_setup_logging_installs_a_single_rich_handler():
    setup_logging("INFO")
    root = setup_logging("DEBUG")

    rich_handlers = [h for h in root.handlers if isinstance(h, RichHandler)]
    assert len(rich_handlers) == 1
    assert root.level == logging.DEBUG
    root.setLevel(logging.WARNING)


def test_events_are_written_to_file(tmp_path):
    events = setup_events_logger(str(tmp_path))
    assert events.level == EVENTS_LEVEL_NUM

    log_event("hello %s", "world")
    params = ModelParams(n=32, seed=1)
    truncation_experiment(params, [2], 20, 1)
    for handler in events.handlers:
        handler.flush()

    text = (tmp_path / "events.log").read_text()
    assert "| EVENT | hello world" in text
    assert "truncation {'k': 2" in text


def test_print_execution_time_keeps_result(caplog):
    @print_execution_time
    def add(a, b):
        return a + b

    with caplog.at_level(logging.INFO, logger="shotmax.utils.logging"):
        assert add(1, 2) == 3
    assert "Execution time for add" in caplog.text


def test_print_execution_time_wraps_coroutines(caplog):
    @print_execution_time
    async def delayed_add(a, b):
        await asyncio.sleep(0)
        return a + b

    assert inspect.iscoroutinefunction(delayed_add)
    with caplog.at_level(logging.INFO, logger="shotmax.utils.logging"):
        assert asyncio.run(delayed_add(2, 3)) == 5
    assert "Execution time for delayed_add" in caplog.text
