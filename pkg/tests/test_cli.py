import json
from unittest.mock import patch

import numpy as np
import pytest

from shotmax.cli import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main
from shotmax.validator.output_validation import CORRECT, validate_payload
from tests.utils import csv_frame, data_lines, meta_lines


def run_cli(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_simulate_discrete(capsys):
    code, out, _ = run_cli(
        capsys, "simulate", "--which", "discrete", "--n", "16", "--seed", "3"
    )

    assert code == EXIT_OK
    lines = data_lines(out)
    assert lines[0] == "t,value"
    assert len(lines) == 18
    meta = meta_lines(out)
    assert meta["schema_version"] == "1"
    assert meta["command"] == "simulate"
    assert meta["seed"] == "3"
    assert meta["which"] == "discrete"


def test_simulate_is_deterministic(capsys):
    args = (
        "simulate",
        "--which",
        "limit",
        "--grid",
        "64",
        "--k",
        "8",
        "--seed",
        "4",
    )
    _, first, _ = run_cli(capsys, *args)
    _, second, _ = run_cli(capsys, *args)
    _, other, _ = run_cli(capsys, *args[:-1], "5")

    assert first == second
    assert first != other
    table = csv_frame(first)
    assert table["value"].iloc[0] == 0.0
    assert np.all(np.diff(table["value"].to_numpy()) >= 0)


def test_invalid_hurst_exits_with_usage_error(capsys):
    code, out, err = run_cli(capsys, "simulate", "--hurst", "1.2")
    assert code == EXIT_USAGE
    assert out == ""
    assert "hurst" in err


def test_inconsistent_noise_exits_with_usage_error(capsys):
    code, _, err = run_cli(
        capsys, "simulate", "--theta", "0.5", "--law", "pure-pareto"
    )
    assert code == EXIT_USAGE
    assert err.startswith("shotmax: error:")


def test_missing_required_flag_is_argparse_error():
    with pytest.raises(SystemExit) as excinfo:
        main(["psi"])
    assert excinfo.value.code == 2


def test_psi(capsys):
    code, out, _ = run_cli(
        capsys,
        "psi",
        "--x",
        "-1",
        "1",
        "--reps",
        "50",
        "--grid",
        "64",
        "--seed",
        "1",
    )
    assert code == EXIT_OK
    table = csv_frame(out)
    assert list(table.columns) == [
        "x",
        "psi_hat",
        "std_error",
        "replicates",
        "grid_points",
    ]
    assert table["psi_hat"].iloc[0] == 0.0
    assert 0.0 < table["psi_hat"].iloc[1] < 1.0
    assert table["replicates"].tolist() == [50, 50]


def test_fdd(capsys):
    code, out, _ = run_cli(
        capsys,
        "fdd",
        "--times",
        "0.5",
        "1",
        "--thresholds",
        "1",
        "1.5",
        "--reps",
        "50",
        "--grid",
        "64",
    )
    assert code == EXIT_OK
    table = csv_frame(out)
    assert len(table) == 1
    assert 0.0 <= table["probability"].iloc[0] <= 1.0


def test_fdd_with_unsorted_times_exits_with_usage_error(capsys):
    code, _, err = run_cli(
        capsys, "fdd", "--times", "1", "0.5", "--thresholds", "1", "1"
    )
    assert code == EXIT_USAGE
    assert "increasing" in err


def test_converge_header_and_threads(capsys):
    args = (
        "converge",
        "--n-list",
        "16",
        "32",
        "--reps",
        "80",
        "--grid",
        "64",
        "--k",
        "8",
        "--seed",
        "2",
    )
    code, out, _ = run_cli(capsys, *args)
    _, threaded, _ = run_cli(capsys, *args, "--threads", "2")

    assert code == EXIT_OK
    assert data_lines(out)[0] == "n,ks_statistic,p_value,reps"
    assert len(data_lines(out)) == 3
    assert out == threaded


def test_lepage_and_sandwich(capsys):
    code, out, _ = run_cli(
        capsys, "lepage", "--n", "64", "--ranks", "2", "--reps", "50"
    )
    assert code == EXIT_OK
    assert len(csv_frame(out)) == 2

    code, out, _ = run_cli(
        capsys,
        "sandwich",
        "--theta",
        "0.5",
        "--n-list",
        "16",
        "32",
        "--reps",
        "50",
    )
    assert code == EXIT_OK
    assert csv_frame(out)["violations"].tolist() == [0, 0]


def test_json_output(capsys):
    code, out, _ = run_cli(
        capsys,
        "simulate",
        "--which",
        "extremal",
        "--grid",
        "32",
        "--format",
        "json",
    )
    assert code == EXIT_OK
    payload = json.loads(out)
    assert validate_payload(payload) == CORRECT
    assert len(payload["rows"]) == 33
    assert payload["meta"]["command"] == "simulate"


def test_pathdist(capsys, tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    run_cli(
        capsys,
        "simulate",
        "--which",
        "discrete",
        "--n",
        "8",
        "--out",
        str(first),
    )
    run_cli(
        capsys,
        "simulate",
        "--which",
        "discrete",
        "--n",
        "4",
        "--out",
        str(second),
    )

    code, out, _ = run_cli(capsys, "pathdist", str(first), str(first))
    assert code == EXIT_OK
    table = csv_frame(out)
    assert table["skorohod_j1"].iloc[0] == 0.0
    assert table["sup_distance"].iloc[0] == 0.0

    code, out, _ = run_cli(capsys, "pathdist", str(first), str(second))
    assert code == EXIT_OK
    table = csv_frame(out)
    assert table["skorohod_j1"].iloc[0] >= 0.0
    assert np.isnan(table["sup_distance"].iloc[0])


def test_pathdist_with_malformed_file(capsys, tmp_path):
    broken = tmp_path / "broken.csv"
    broken.write_text("t,value\n0,0\n0.3,1\n1,1\n")
    code, _, err = run_cli(capsys, "pathdist", str(broken), str(broken))
    assert code == EXIT_USAGE
    assert "grid" in err


def test_pathdist_with_missing_files(capsys, tmp_path):
    missing = tmp_path / "missing.csv"
    code, out, err = run_cli(capsys, "pathdist", str(missing), str(missing))
    assert code == EXIT_USAGE
    assert out == ""
    assert err.startswith("shotmax: error:")
    assert "missing.csv" in err
    assert len(err.strip().splitlines()) == 1


def test_pathdist_with_empty_file(capsys, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    code, _, err = run_cli(capsys, "pathdist", str(empty), str(empty))
    assert code == EXIT_USAGE
    assert "empty.csv" in err
    assert len(err.strip().splitlines()) == 1


def test_pathdist_with_unparsable_file(capsys, tmp_path):
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("t,value\n0,0\n0.5,1,7,8\n1,1\n")
    code, _, err = run_cli(capsys, "pathdist", str(ragged), str(ragged))
    assert code == EXIT_USAGE
    assert "ragged.csv" in err
    assert len(err.strip().splitlines()) == 1


def test_unwritable_output_path(capsys, tmp_path):
    target = tmp_path / "no_such_dir" / "path.csv"
    code, out, err = run_cli(
        capsys,
        "simulate",
        "--which",
        "discrete",
        "--n",
        "8",
        "--out",
        str(target),
    )
    assert code == EXIT_USAGE
    assert out == ""
    assert "path.csv" in err
    assert not target.exists()


@patch(
    "shotmax.simulator.fbm._circulant_eigenvalues",
    return_value=np.array([4.0, -0.5, 1.0, 1.0]),
)
def test_failed_synthesis_exits_with_numerical_error(mock_eigenvalues, capsys):
    code, out, err = run_cli(
        capsys, "simulate", "--which", "limit", "--grid", "5000", "--k", "4"
    )
    assert code == EXIT_NUMERICAL
    assert out == ""
    assert "Cholesky" in err
