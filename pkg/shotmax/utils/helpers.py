import io
import json
import math
import sys
import typing

import numpy as np
import pandas as pd

from shotmax import SCHEMA_VERSION
from shotmax.errors import ShapeError
from shotmax.simulator.fbm import GridPath
from shotmax.validator.output_validation import CORRECT, validate_path_table

FLOAT_FORMAT = "%.17g"


def format_real(num: float) -> str:
    """Locale-free text with 17 significant digits (round-trips a double)."""
    return FLOAT_FORMAT % num


def _format_meta_value(value: typing.Any) -> str:
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_format_meta_value(v) for v in value)
    return str(value)


def build_meta(command: str, params: dict, seed: int) -> dict:
    """Metadata block of an emitted table; no clock or host values."""
    meta = {"schema_version": SCHEMA_VERSION, "command": command}
    meta.update(params)
    meta["seed"] = seed
    return meta


def _json_value(value: typing.Any) -> typing.Any:
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if math.isnan(value) else value
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def table_to_csv(table: pd.DataFrame, meta: dict) -> str:
    buffer = io.StringIO()
    for key, value in meta.items():
        buffer.write(f"# {key}={_format_meta_value(value)}\n")
    table.to_csv(
        buffer, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    return buffer.getvalue()


def table_to_payload(table: pd.DataFrame, meta: dict) -> dict:
    rows = [
        {column: _json_value(value) for column, value in record.items()}
        for record in table.to_dict(orient="records")
    ]
    return {
        "meta": {key: _json_value(value) for key, value in meta.items()},
        "rows": rows,
    }


def emit_table(
    table: pd.DataFrame,
    meta: dict,
    out_format: str = "csv",
    out_path: typing.Optional[str] = None,
) -> str:
    """Render ``table`` and write it to ``out_path`` (standard output when
    None or "-")."""
    if out_format == "json":
        text = json.dumps(table_to_payload(table, meta)) + "\n"
    else:
        text = table_to_csv(table, meta)

    if out_path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(
            typing.cast(str, out_path), "w", encoding="utf-8", newline="\n"
        ) as f:
            f.write(text)
    return text


def path_table(path: GridPath) -> pd.DataFrame:
    return pd.DataFrame({"t": path.times, "value": path.values})


def read_path_csv(file_path: str) -> GridPath:
    """Read a (t, value) table written by ``simulate``."""
    try:
        table = pd.read_csv(file_path, comment="#")
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
        reason = " ".join(str(e).split())
        raise ShapeError(f"{file_path}: not a path table ({reason})") from e
    error_message = validate_path_table(table)
    if error_message != CORRECT:
        raise ShapeError(f"{file_path}: {error_message}")
    return GridPath(table["value"].to_numpy(dtype=np.float64))
