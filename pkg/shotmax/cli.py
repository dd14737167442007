"""Command line front end.

    shotmax simulate --which limit --hurst 0.5 --kappa 1 --k 64 --grid 4096 --seed 7
    shotmax psi --x -1 0.5 1 2 --reps 10000
    shotmax converge --n-list 256 1024 4096 16384 --reps 5000 --threads 8

Tables go to standard output (or --out), diagnostics to standard error.
Exit status is 0 on success, 2 on invalid input and 3 when exact Gaussian
synthesis fails.
"""

import argparse
import logging
import sys
import typing

import pandas as pd
from pydantic import ValidationError

from shotmax import __version__
from shotmax.errors import (
    ContractError,
    DomainError,
    QueryError,
    ShapeError,
    SynthesisError,
)
from shotmax.simulator.limit_process import FddQuery, fdd_estimate, psi_curve
from shotmax.simulator.simulations import WHICH_CHOICES, generate_path
from shotmax.utils.config import (
    RunConfig,
    add_model_args,
    add_output_args,
    add_run_args,
    first_error,
    run_config_from_args,
)
from shotmax.utils.helpers import (
    build_meta,
    emit_table,
    path_table,
    read_path_csv,
)
from shotmax.utils.logging import setup_events_logger, setup_logging
from shotmax.validator.experiment_config import preset_from_label
from shotmax.validator.experiments import (
    convergence_experiment,
    lepage_check,
    sandwich_experiment,
)
from shotmax.validator.output_validation import CORRECT, validate_table
from shotmax.validator.pathspace import skorohod_j1, sup_distance

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

DEFAULT_N_LIST = [1 << 8, 1 << 10, 1 << 12, 1 << 14]


def _subparser(
    subparsers, name: str, help_text: str
) -> argparse.ArgumentParser:
    parser = subparsers.add_parser(name, help=help_text)
    add_model_args(parser)
    add_output_args(parser)
    add_run_args(parser)
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shotmax",
        description="Simulate the maximum of a perturbed random walk and its fBm shot-noise limit.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = _subparser(subparsers, "simulate", "Emit one sampled path.")
    simulate.add_argument(
        "--which",
        type=str,
        choices=WHICH_CHOICES,
        help="Discrete Z_n, limit Z^H or the extremal process V.",
        default="limit",
    )

    psi = _subparser(subparsers, "psi", "Estimate Psi_H(x) = P(Z^H_1 <= x).")
    psi.add_argument(
        "--x",
        dest="x_list",
        type=float,
        nargs="+",
        required=True,
        help="Points at which to estimate Psi_H.",
    )

    fdd = _subparser(
        subparsers, "fdd", "Estimate P(Z_{t_1} <= x_1, ..., Z_{t_d} <= x_d)."
    )
    fdd.add_argument("--times", type=float, nargs="+", required=True)
    fdd.add_argument("--thresholds", type=float, nargs="+", required=True)

    converge = _subparser(
        subparsers, "converge", "Terminal KS distance between Z_n and Z^H."
    )
    converge.add_argument("--n-list", dest="n_list", type=int, nargs="+")
    converge.add_argument(
        "--fdd-times",
        dest="fdd_times",
        type=float,
        nargs="+",
        default=[],
        help="Also emit KS columns of Z_{n,t} against the Monte Carlo CDF of Z^H_t.",
    )

    lepage = _subparser(
        subparsers, "lepage", "Compare top order statistics with Gamma_i^{-H}."
    )
    lepage.add_argument("--ranks", type=int, default=None)

    sandwich = _subparser(
        subparsers, "sandwich", "Percentiles of sup(Z^0 - Z^{-inf})."
    )
    sandwich.add_argument("--n-list", dest="n_list", type=int, nargs="+")

    pathdist = _subparser(
        subparsers, "pathdist", "Skorohod J1 distance of two path CSV files."
    )
    pathdist.add_argument("path_a", type=str)
    pathdist.add_argument("path_b", type=str)
    pathdist.add_argument("--a", type=float, default=0.0)
    pathdist.add_argument("--b", type=float, default=1.0)
    return parser


def _n_list(args: argparse.Namespace) -> list[int]:
    if args.n_list:
        return list(args.n_list)
    if args.preset:
        return list(preset_from_label(args.preset).n_list)
    return list(DEFAULT_N_LIST)


def _meta_params(cfg: RunConfig, extra: dict) -> dict:
    params = cfg.model_params().model_dump(exclude={"seed"})
    params.update(extra)
    return params


def cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> pd.DataFrame:
    path = generate_path(args.which, cfg.model_params(), cfg.seed)
    return path_table(path)


def cmd_psi(cfg: RunConfig, args: argparse.Namespace) -> pd.DataFrame:
    estimates = psi_curve(
        cfg.hurst,
        cfg.kappa,
        args.x_list,
        cfg.reps,
        cfg.grid_points,
        cfg.seed,
        threads=cfg.threads,
    )
    return pd.DataFrame(
        {
            "x": [e.x for e in estimates],
            "psi_hat": [e.value for e in estimates],
            "std_error": [e.std_error for e in estimates],
            "replicates": [e.replicates for e in estimates],
            "grid_points": [e.grid_points for e in estimates],
        }
    )


def cmd_fdd(cfg: RunConfig, args: argparse.Namespace) -> pd.DataFrame:
    query = FddQuery(tuple(args.times), tuple(args.thresholds))
    probability, std_error = fdd_estimate(
        cfg.hurst,
        cfg.kappa,
        query,
        cfg.reps,
        cfg.grid_points,
        cfg.seed,
        threads=cfg.threads,
    )
    return pd.DataFrame(
        [
            {
                "probability": probability,
                "std_error": std_error,
                "replicates": cfg.reps,
                "grid_points": cfg.grid_points,
            }
        ]
    )


def cmd_converge(cfg: RunConfig, args: argparse.Namespace) -> pd.DataFrame:
    return convergence_experiment(
        cfg.model_params(),
        _n_list(args),
        cfg.reps,
        cfg.seed,
        threads=cfg.threads,
        fdd_times=tuple(args.fdd_times),
    )


def cmd_lepage(cfg: RunConfig, args: argparse.Namespace) -> pd.DataFrame:
    ranks = args.ranks
    if ranks is None:
        ranks = preset_from_label(args.preset).ranks if args.preset else 10
    return lepage_check(
        cfg.model_params(), ranks, cfg.reps, cfg.seed, threads=cfg.threads
    )


def cmd_sandwich(cfg: RunConfig, args: argparse.Namespace) -> pd.DataFrame:
    return sandwich_experiment(
        cfg.model_params(),
        _n_list(args),
        cfg.reps,
        cfg.seed,
        threads=cfg.threads,
    )


def cmd_pathdist(cfg: RunConfig, args: argparse.Namespace) -> pd.DataFrame:
    x = read_path_csv(args.path_a)
    y = read_path_csv(args.path_b)
    distance = skorohod_j1(x, y, args.a, args.b)
    uniform = (
        sup_distance(x, y, args.a, args.b)
        if x.n_points == y.n_points
        else float("nan")
    )
    return pd.DataFrame(
        [
            {
                "skorohod_j1": distance,
                "sup_distance": uniform,
                "a": args.a,
                "b": args.b,
            }
        ]
    )


COMMAND_HANDLERS: dict[
    str, typing.Callable[[RunConfig, argparse.Namespace], pd.DataFrame]
] = {
    "simulate": cmd_simulate,
    "psi": cmd_psi,
    "fdd": cmd_fdd,
    "converge": cmd_converge,
    "lepage": cmd_lepage,
    "sandwich": cmd_sandwich,
    "pathdist": cmd_pathdist,
}


def _command_extras(args: argparse.Namespace) -> dict:
    extras: dict[str, typing.Any] = {}
    for name in ("which", "x_list", "times", "thresholds", "ranks", "a", "b"):
        if getattr(args, name, None) is not None:
            extras[name] = getattr(args, name)
    if args.command in ("converge", "sandwich"):
        extras["n_list"] = _n_list(args)
    if getattr(args, "fdd_times", None):
        extras["fdd_times"] = args.fdd_times
    if args.command == "pathdist":
        extras["path_a"] = args.path_a
        extras["path_b"] = args.path_b
    return extras


def _fail(code: int, message: str) -> int:
    sys.stderr.write(f"shotmax: error: {message}\n")
    return code


def main(argv: typing.Optional[typing.Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    setup_logging(args.log_level)
    if args.log_dir:
        setup_events_logger(args.log_dir)

    try:
        cfg = run_config_from_args(args)
        table = COMMAND_HANDLERS[args.command](cfg, args)

        error_message = validate_table(args.command, table)
        if error_message != CORRECT:
            logger.warning(
                f"Output table failed validation: {error_message}"
            )

        meta = build_meta(
            args.command, _meta_params(cfg, _command_extras(args)), cfg.seed
        )
        emit_table(table, meta, cfg.out_format, cfg.out_path)
    except ValidationError as e:
        return _fail(EXIT_USAGE, first_error(e))
    except (DomainError, QueryError, ShapeError, ContractError) as e:
        return _fail(EXIT_USAGE, str(e))
    except OSError as e:
        return _fail(EXIT_USAGE, str(e))
    except SynthesisError as e:
        return _fail(EXIT_NUMERICAL, str(e))
    return EXIT_OK


def run():
    sys.exit(main())
