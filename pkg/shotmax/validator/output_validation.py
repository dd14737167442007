import math
import typing

import numpy as np
import pandas as pd

CORRECT = "CORRECT"

PATH_COLUMNS = ["t", "value"]
PSI_COLUMNS = ["x", "psi_hat", "std_error", "replicates", "grid_points"]
CONVERGE_COLUMNS = ["n", "ks_statistic", "p_value", "reps"]
FDD_COLUMNS = ["probability", "std_error", "replicates", "grid_points"]
LEPAGE_COLUMNS = [
    "rank",
    "mean_discrete",
    "mean_limit",
    "ks_statistic",
    "p_value",
    "cdf_ks_statistic",
    "cdf_p_value",
]
SANDWICH_COLUMNS = [
    "n",
    "reps",
    "gap_q95",
    "violations",
    "run_median",
    "run_iqr",
]
PATHDIST_COLUMNS = ["skorohod_j1", "sup_distance", "a", "b"]

TABLE_COLUMNS = {
    "simulate": PATH_COLUMNS,
    "psi": PSI_COLUMNS,
    "fdd": FDD_COLUMNS,
    "converge": CONVERGE_COLUMNS,
    "lepage": LEPAGE_COLUMNS,
    "sandwich": SANDWICH_COLUMNS,
    "pathdist": PATHDIST_COLUMNS,
}


def validate_columns(
    table: pd.DataFrame, expected: typing.Sequence[str]
) -> typing.Optional[str]:
    if not isinstance(table, pd.DataFrame):
        return f"Table format is incorrect: expected DataFrame, got {type(table)}"

    columns = list(table.columns)
    if columns[: len(expected)] != list(expected):
        return f"Columns are incorrect: expected {list(expected)} first, got {columns}"

    if len(table) == 0:
        return "Table is empty"

    return None


def validate_table(command: str, table: pd.DataFrame) -> str:
    """Check an output table against the column contract of ``command``.

    Return a string with the error message if the table does not follow the
    contract, otherwise return "CORRECT".
    """
    if command not in TABLE_COLUMNS:
        return f"Command is incorrect: expected one of {sorted(TABLE_COLUMNS)}, got {command}"

    error_message = validate_columns(table, TABLE_COLUMNS[command])
    if error_message:
        return error_message

    if command == "simulate":
        return validate_path_table(table)

    return CORRECT


def validate_path_table(table: pd.DataFrame) -> str:
    """A step path table: rows (t, value) on the uniform grid j / N."""
    error_message = validate_columns(table, PATH_COLUMNS)
    if error_message:
        return error_message

    if len(table) < 2:
        return f"Number of grid points is incorrect: expected at least 2, got {len(table)}"

    times = table["t"].to_numpy(dtype=np.float64)
    values = table["value"].to_numpy(dtype=np.float64)
    if not np.all(np.isfinite(values)):
        return "Path values are incorrect: found non-finite values"

    n_points = len(table) - 1
    expected = np.arange(n_points + 1) / n_points
    if not np.allclose(times, expected, rtol=0.0, atol=1e-12):
        return f"Time grid is incorrect: expected uniform grid of {n_points} intervals on [0, 1]"

    return CORRECT


def validate_payload(payload: typing.Any) -> str:
    """A JSON payload of the form {"meta": {...}, "rows": [{...}, ...]}."""
    if not isinstance(payload, dict):
        return f"Payload format is incorrect: expected dict, got {type(payload)}"

    meta = payload.get("meta")
    if not isinstance(meta, dict):
        return f"Metadata format is incorrect: expected dict, got {type(meta)}"
    if "schema_version" not in meta:
        return "Metadata is incorrect: schema_version is missing"

    rows = payload.get("rows")
    if not isinstance(rows, list):
        return f"Rows format is incorrect: expected list, got {type(rows)}"
    if len(rows) == 0:
        return "Rows are empty"

    keys = None
    for row in rows:
        if not isinstance(row, dict):
            return f"Row format is incorrect: expected dict, got {type(row)}"
        if keys is None:
            keys = list(row)
        elif list(row) != keys:
            return f"Row keys are incorrect: expected {keys}, got {list(row)}"
        for value in row.values():
            if isinstance(value, float) and math.isinf(value):
                return f"Row value is incorrect: got {value}"

    command = meta.get("command")
    if command in TABLE_COLUMNS:
        expected = TABLE_COLUMNS[command]
        if typing.cast(list, keys)[: len(expected)] != expected:
            return f"Columns are incorrect: expected {expected} first, got {keys}"

    return CORRECT
