"""Command-line entry point: ``mmimo-alloc {solve,sweep,convergence,oracle}``.

Exit codes: 0 success, 1 internal error, 2 bad configuration or arguments,
3 infeasible budgets.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import replace

from . import kernels
from .channel import asymptotic_capacity, dbm_to_watt, sample_channel, watt_to_dbm
from .config import RunConfig, load_config
from .errors import ConfigError, DomainError, InfeasibleError
from .montecarlo import convergence_trace, run_campaign, trial_seed
from .oracle import (brute_force_chunk, default_grid, finite_difference_curvature,
                     hessian_eigenvalues, stationarity_residual)
from .solver import DualState, solve

log = logging.getLogger("mmimo_alloc")

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

SWEEP_COLUMNS = ["p_pg_dbm", "p_max_dbm", "mean_se_bps_hz", "stderr_se", "mean_antennas",
                 "stderr_antennas", "mean_power_ratio", "stderr_ratio", "infeasible_count",
                 "trials"]
CONVERGENCE_COLUMNS = ["p_pg_dbm", "p_max_dbm", "iteration", "mean_se_bps_hz", "bound_se_bps_hz"]


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError("arguments", message)


def _dbm_list(text):
    try:
        values = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated dBm values, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="base seed for all randomness")
    common.add_argument("--trials", type=int, help="Monte Carlo trials per cell")
    common.add_argument("--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--iterations", type=int, help="maximum master iterations")
    common.add_argument("--backend", choices=sorted(kernels.BACKENDS), help="kernel backend")
    common.add_argument("--ppg-dbm", type=_dbm_list, help="grid supply budget(s), dBm")
    common.add_argument("--pmax-dbm", type=_dbm_list, help="transmit power allowance(s), dBm")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _ArgumentParser(prog="mmimo-alloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    sub.add_parser("solve", parents=[common], help="solve one channel drop, emit JSON report")
    sub.add_parser("sweep", parents=[common], help="Monte Carlo sweep over budgets, emit CSV")
    conv = sub.add_parser("convergence", parents=[common], help="mean objective per iteration")
    conv.add_argument("--iteration-cap", type=int, help="iterations to trace")
    orc = sub.add_parser("oracle", parents=[common], help="compare solver with exhaustive search")
    orc.add_argument("--power-points", type=int, default=200)
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    params, solver, sweep = cfg.params, cfg.solver, cfg.sweep
    try:
        if args.iterations is not None:
            solver = replace(solver, max_iterations=args.iterations)
        if args.backend is not None:
            solver = replace(solver, backend=args.backend)
        if args.ppg_dbm is not None:
            sweep = replace(sweep, p_pg_values=tuple(dbm_to_watt(v) for v in args.ppg_dbm))
            params = params.replace(p_pg=dbm_to_watt(args.ppg_dbm[0]))
        if args.pmax_dbm is not None:
            sweep = replace(sweep, p_max_values=tuple(dbm_to_watt(v) for v in args.pmax_dbm))
            params = params.replace(p_max=dbm_to_watt(args.pmax_dbm[0]))
        if args.trials is not None:
            sweep = replace(sweep, trials=args.trials)
        if args.seed is not None:
            sweep = replace(sweep, base_seed=args.seed)
        if getattr(args, "iteration_cap", None) is not None:
            sweep = replace(sweep, iteration_cap=args.iteration_cap)
    except DomainError as exc:
        raise ConfigError("arguments", str(exc)) from None
    out = args.output if args.output is not None else cfg.output_path
    fmt = args.format if args.format is not None else cfg.output_format
    return RunConfig(params, solver, sweep, out, fmt)


def _emit(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv(rows, columns) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row[k] for k in columns})
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _params_dict(params) -> dict:
    return {
        "n_f": params.n_f,
        "bandwidth_hz": params.bandwidth_total,
        "noise_dbm": watt_to_dbm(params.noise_power_per_subcarrier),
        "p_max_dbm": watt_to_dbm(params.p_max),
        "p_pg_dbm": watt_to_dbm(params.p_pg),
        "p_0_dbm": watt_to_dbm(params.p_0),
        "p_ac_dbm": watt_to_dbm(params.p_ac),
        "epsilon": params.epsilon,
        "n_min": params.n_min,
        "n_max": params.n_max,
        "distance_m": params.distance,
        "carrier_freq_hz": params.carrier_freq,
        "shadowing_sigma_db": params.shadowing_sigma_db,
        "pathloss_exponent": params.pathloss_exponent,
    }


def cmd_solve(cfg: RunConfig) -> int:
    seed = trial_seed(cfg.sweep.base_seed, -1, 0)
    realization = sample_channel(cfg.params, seed)
    relaxed, integer = solve(realization, cfg.params, cfg.solver)
    out = {
        "params": _params_dict(cfg.params),
        "seed": cfg.sweep.base_seed,
        "large_scale_gain": realization.large_scale_gain,
        "relaxed": relaxed.to_dict(),
        "integer": integer.to_dict(),
        "spectral_efficiency_bps_hz": integer.objective / cfg.params.bandwidth_total,
    }
    _emit(_json(out), cfg.output_path)
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    result = run_campaign(cfg.params, cfg.sweep, cfg.solver)
    summary = {"params": _params_dict(cfg.params)} | result.summary()
    if cfg.output_format == "json":
        _emit(_json(summary), cfg.output_path)
    else:
        _emit(_csv([c.row() for c in result.cells], SWEEP_COLUMNS), cfg.output_path)
        if cfg.output_path is not None:
            _emit(_json(summary), cfg.output_path + ".summary.json")
    if all(c.trials == 0 for c in result.cells):
        log.error("every trial was infeasible")
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_convergence(cfg: RunConfig) -> int:
    traces = convergence_trace(cfg.params, cfg.sweep, cfg.solver)
    rows = [r for t in traces for r in t.rows()]
    if cfg.output_format == "json":
        _emit(_json({"params": _params_dict(cfg.params), "rows": rows}), cfg.output_path)
    else:
        _emit(_csv(rows, CONVERGENCE_COLUMNS), cfg.output_path)
    if all(t.trials == 0 for t in traces):
        return EXIT_INFEASIBLE
    return EXIT_OK


def oracle_report(cfg: RunConfig, power_points: int = 200) -> dict:
    """Solver-versus-exhaustive-search comparison on one drop."""
    params = cfg.params
    realization = sample_channel(params, trial_seed(cfg.sweep.base_seed, -1, 0))
    lg = realization.large_scale_gain
    relaxed, integer = solve(realization, params, cfg.solver)
    best = brute_force_chunk(params, lg, default_grid(params, power_points),
                             backend=cfg.solver.backend)
    if not best.feasible:
        raise InfeasibleError("no feasible grid point")
    gap = (relaxed.objective - best.objective) / abs(best.objective)

    last = relaxed.trace[-1]
    dual = DualState(last.lam, last.beta)
    d_p, d_n = stationarity_residual(last.p, last.n_t, dual, params)
    scale_p = params.n_f * (dual.lam + dual.beta * params.epsilon)
    scale_n = dual.beta * params.p_ac
    interior_p = last.p < params.p_max
    interior_n = params.n_min < last.n_t < params.n_max

    p = float(relaxed.allocation.power[0])
    n = relaxed.allocation.active_antennas
    eig = hessian_eigenvalues(p, n, params)

    fd = finite_difference_curvature(lambda x, y: asymptotic_capacity(x, lg, y, params), p, n)
    return {
        "params": _params_dict(params),
        "seed": cfg.sweep.base_seed,
        "solver_objective_bps": relaxed.objective,
        "solver_integer_objective_bps": integer.objective,
        "solver_p_w": p,
        "solver_n_t": n,
        "oracle_objective_bps": best.objective,
        "oracle_p_w": best.p,
        "oracle_n_t": best.n_t,
        "oracle_grid": {"power_points": power_points,
                        "antenna_values": params.n_max - params.n_min + 1},
        "relative_gap": gap,
        "gap_within_2pct": abs(gap) <= 0.02,
        "stationarity": {
            "dl_dp": d_p, "dl_dn": d_n,
            "dl_dp_relative": abs(d_p) / scale_p if interior_p else None,
            "dl_dn_relative": abs(d_n) / scale_n if interior_n and scale_n > 0 else None,
            "interior_p": interior_p, "interior_n": interior_n,
        },
        "hessian": {
            "eigenvalues": list(eig),
            "finite_difference": list(fd),
            "relative_error": [abs(a - b) / abs(a) for a, b in zip(eig, fd)],
            "negative_definite": all(e < 0 for e in eig),
        },
    }


def cmd_oracle(cfg: RunConfig, power_points: int) -> int:
    _emit(_json(oracle_report(cfg, power_points)), cfg.output_path)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
        if args.verbose:
            log.setLevel(logging.INFO)
        cfg = _apply_overrides(load_config(args.config), args)
        log.info("kernel backend: %s", cfg.solver.backend or kernels.BACKEND_NAME)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        if args.command == "convergence":
            return cmd_convergence(cfg)
        return cmd_oracle(cfg, args.power_points)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG if getattr(exc, "filename", None) else EXIT_INTERNAL
    except InfeasibleError as exc:
        log.error("infeasible: %s", exc)
        return EXIT_INFEASIBLE
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
