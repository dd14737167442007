import math

import pandas as pd

from shotmax.validator.output_validation import (
    CORRECT,
    PSI_COLUMNS,
    validate_path_table,
    validate_payload,
    validate_table,
)


def test_validate_table_correct():
    table = pd.DataFrame(
        {
            "x": [1.0],
            "psi_hat": [0.5],
            "std_error": [0.01],
            "replicates": [100],
            "grid_points": [64],
        }
    )
    assert list(table.columns) == PSI_COLUMNS
    assert validate_table("psi", table) == CORRECT


def test_validate_table_unknown_command():
    result = validate_table("plot", pd.DataFrame({"a": [1]}))
    assert result.startswith("Command is incorrect")


def test_validate_table_incorrect_type():
    result = validate_table("psi", [1, 2, 3])  # type: ignore[arg-type]
    assert result.startswith("Table format is incorrect")


def test_validate_table_wrong_columns():
    table = pd.DataFrame({"psi_hat": [0.5], "x": [1.0]})
    assert validate_table("psi", table).startswith("Columns are incorrect")


def test_validate_table_extra_columns_allowed():
    table = pd.DataFrame(
        {
            "n": [16],
            "ks_statistic": [0.1],
            "p_value": [0.5],
            "reps": [10],
            "fdd_ks_t0.5": [0.2],
        }
    )
    assert validate_table("converge", table) == CORRECT


def test_validate_table_empty():
    table = pd.DataFrame(
        {"n": [], "ks_statistic": [], "p_value": [], "reps": []}
    )
    assert validate_table("converge", table) == "Table is empty"


def test_validate_path_table():
    good = pd.DataFrame({"t": [0.0, 0.5, 1.0], "value": [0.0, 1.0, 1.0]})
    assert validate_path_table(good) == CORRECT

    short = pd.DataFrame({"t": [0.0], "value": [0.0]})
    assert validate_path_table(short).startswith("Number of grid points")

    uneven = pd.DataFrame({"t": [0.0, 0.3, 1.0], "value": [0.0, 1.0, 1.0]})
    assert validate_path_table(uneven).startswith("Time grid is incorrect")

    infinite = pd.DataFrame({"t": [0.0, 1.0], "value": [0.0, math.inf]})
    assert validate_path_table(infinite).startswith(
        "Path values are incorrect"
    )


def test_validate_payload():
    payload = {
        "meta": {"schema_version": 1, "command": "fdd"},
        "rows": [
            {
                "probability": 0.5,
                "std_error": None,
                "replicates": 10,
                "grid_points": 64,
            }
        ],
    }
    assert validate_payload(payload) == CORRECT


def test_validate_payload_errors():
    assert validate_payload([]).startswith("Payload format is incorrect")
    assert validate_payload({"rows": [{}]}).startswith("Metadata format")
    assert validate_payload(
        {"meta": {"command": "psi"}, "rows": [{"x": 1}]}
    ).startswith("Metadata is incorrect")
    assert (
        validate_payload({"meta": {"schema_version": 1}, "rows": []})
        == "Rows are empty"
    )
    assert validate_payload(
        {"meta": {"schema_version": 1}, "rows": [{"a": 1}, {"b": 2}]}
    ).startswith("Row keys are incorrect")
    assert validate_payload(
        {"meta": {"schema_version": 1, "command": "psi"}, "rows": [{"a": 1}]}
    ).startswith("Columns are incorrect")
