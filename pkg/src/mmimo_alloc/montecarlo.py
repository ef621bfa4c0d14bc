"""Seeded Monte Carlo campaigns over shadowing and fading.

Every trial is solved (relaxed, then floor-rounded) for each
``(p_pg, p_max)`` cell of a sweep. Trial seeds come from a stable mix of the
base seed, trial index and (unless seeds are matched across cells) the cell
index, so any single trial can be replayed in isolation.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import SystemParams, sample_channel, watt_to_dbm
from .errors import DomainError, InfeasibleError
from .solver import SolverConfig, solve, solve_relaxed

BOUND_CONFIG = SolverConfig(max_iterations=2000, convergence_tol=1e-10)


@dataclass(frozen=True)
class SweepSpec:
    """Budget grid and trial count.

    With ``matched_seeds`` every cell sees the same channel drops, which
    makes cell-to-cell comparisons paired.
    """

    p_pg_values: tuple
    p_max_values: tuple
    trials: int = 1000
    base_seed: int = 0
    iteration_cap: int = 5
    matched_seeds: bool = True

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError("trials must be >= 1")
        if not self.p_pg_values or not self.p_max_values:
            raise DomainError("sweep value lists must be non-empty")
        if any(v <= 0 for v in (*self.p_pg_values, *self.p_max_values)):
            raise DomainError("sweep powers must be positive")
        if self.iteration_cap < 1:
            raise DomainError("iteration_cap must be >= 1")
        object.__setattr__(self, "p_pg_values", tuple(float(v) for v in self.p_pg_values))
        object.__setattr__(self, "p_max_values", tuple(float(v) for v in self.p_max_values))

    def cells(self) -> list:
        return list(itertools.product(self.p_pg_values, self.p_max_values))


def trial_seed(base_seed: int, cell: int, trial: int) -> int:
    """64-bit seed for one trial; pass ``cell = -1`` for seeds shared by all cells."""
    # SeedSequence ignores trailing zero words, hence cell + 1
    entropy = [int(base_seed) % (1 << 64), trial]
    if cell >= 0:
        entropy.append(cell + 1)
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    if values.size == 0:
        return math.nan, math.nan
    mean = float(np.mean(values))
    if values.size == 1:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / math.sqrt(values.size))


@dataclass
class CellStats:
    p_pg: float
    p_max: float
    trials: int
    infeasible: int
    mean_se: float
    stderr_se: float
    mean_antennas: float
    stderr_antennas: float
    mean_power_ratio: float
    stderr_power_ratio: float
    mean_se_relaxed: float
    mean_se_exact: float
    mean_trace: np.ndarray
    min_slack_c1: float
    min_slack_c2: float
    all_feasible: bool
    se: np.ndarray = field(repr=False)
    se_relaxed: np.ndarray = field(repr=False)

    @property
    def p_pg_dbm(self) -> float:
        return watt_to_dbm(self.p_pg)

    @property
    def p_max_dbm(self) -> float:
        return watt_to_dbm(self.p_max)

    def row(self) -> dict:
        """Flat record using the CSV column names."""
        return {
            "p_pg_dbm": round(self.p_pg_dbm, 10),
            "p_max_dbm": round(self.p_max_dbm, 10),
            "mean_se_bps_hz": self.mean_se,
            "stderr_se": self.stderr_se,
            "mean_antennas": self.mean_antennas,
            "stderr_antennas": self.stderr_antennas,
            "mean_power_ratio": self.mean_power_ratio,
            "stderr_ratio": self.stderr_power_ratio,
            "infeasible_count": self.infeasible,
            "trials": self.trials,
        }


@dataclass
class SweepResult:
    cells: list
    trials: int
    base_seed: int

    def cell(self, p_pg: float, p_max: float) -> CellStats:
        for c in self.cells:
            if math.isclose(c.p_pg, p_pg) and math.isclose(c.p_max, p_max):
                return c
        raise KeyError((p_pg, p_max))

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "base_seed": self.base_seed,
            "cells": [
                c.row() | {
                    "mean_se_relaxed_bps_hz": c.mean_se_relaxed,
                    "mean_se_exact_bps_hz": c.mean_se_exact,
                    "mean_trace_se_bps_hz": c.mean_trace.tolist(),
                    "min_slack_c1_w": c.min_slack_c1,
                    "min_slack_c2_w": c.min_slack_c2,
                    "all_feasible": c.all_feasible,
                }
                for c in self.cells
            ],
        }


def _realizations(params, spec):
    """Yield ``(trial, cell_index, realization)`` in fixed trial-major order."""
    n_cells = len(spec.cells())
    for t in range(spec.trials):
        if spec.matched_seeds:
            shared = sample_channel(params, trial_seed(spec.base_seed, -1, t))
            for c in range(n_cells):
                yield t, c, shared
        else:
            for c in range(n_cells):
                yield t, c, sample_channel(params, trial_seed(spec.base_seed, c, t))


def run_campaign(params: SystemParams, spec: SweepSpec,
                 config: SolverConfig = SolverConfig()) -> SweepResult:
    """Solve every trial of every cell and aggregate per cell.

    Trials whose idle consumption already exceeds ``p_pg`` are counted as
    infeasible and left out of the means.
    """
    cells = spec.cells()
    cell_params = [params.replace(p_pg=pg, p_max=pm) for pg, pm in cells]
    n_iter = config.max_iterations
    records = [{"se": [], "se_relaxed": [], "se_exact": [], "antennas": [], "ratio": [],
                "trace": [], "slack1": [], "slack2": [], "feasible": [], "infeasible": 0} for _ in cells]

    for _, c, realization in _realizations(params, spec):
        cp, rec = cell_params[c], records[c]
        try:
            relaxed, integer = solve(realization, cp, config)
        except InfeasibleError:
            rec["infeasible"] += 1
            continue
        bw = cp.bandwidth_total
        rec["se"].append(integer.objective / bw)
        rec["se_relaxed"].append(relaxed.objective / bw)
        rec["se_exact"].append(integer.objective_exact / bw)
        rec["antennas"].append(integer.allocation.active_antennas)
        rec["ratio"].append(integer.power.pa_to_antenna_ratio)
        trace = [e.feasible_objective / bw for e in relaxed.trace]
        trace += [trace[-1]] * (n_iter - len(trace))
        rec["trace"].append(trace)
        rec["slack1"].append(min(relaxed.feasibility.slack_c1, integer.feasibility.slack_c1))
        rec["slack2"].append(min(relaxed.feasibility.slack_c2, integer.feasibility.slack_c2))
        rec["feasible"].append(relaxed.feasibility.feasible and integer.feasibility.feasible)

    out = []
    for (pg, pm), rec in zip(cells, records):
        se = np.asarray(rec["se"])
        antennas = np.asarray(rec["antennas"])
        ratio = np.asarray(rec["ratio"])
        trace = np.asarray(rec["trace"]).reshape(-1, n_iter)
        m_se, s_se = _mean_stderr(se)
        m_a, s_a = _mean_stderr(antennas)
        m_r, s_r = _mean_stderr(ratio)
        out.append(CellStats(
            p_pg=pg, p_max=pm, trials=int(se.size), infeasible=rec["infeasible"],
            mean_se=m_se, stderr_se=s_se, mean_antennas=m_a, stderr_antennas=s_a,
            mean_power_ratio=m_r, stderr_power_ratio=s_r,
            mean_se_relaxed=_mean_stderr(np.asarray(rec["se_relaxed"]))[0],
            mean_se_exact=_mean_stderr(np.asarray(rec["se_exact"]))[0],
            mean_trace=trace.mean(axis=0) if se.size else np.full(n_iter, math.nan),
            min_slack_c1=min(rec["slack1"], default=math.nan),
            min_slack_c2=min(rec["slack2"], default=math.nan),
            all_feasible=all(rec["feasible"]),
            se=se, se_relaxed=np.asarray(rec["se_relaxed"]),
        ))
    return SweepResult(out, spec.trials, spec.base_seed)


@dataclass
class ConvergenceTrace:
    """Mean suboptimal spectral efficiency after each master iteration.

    ``bound_se`` is the converged relaxed optimum averaged over the same
    trials; ``mean_se[k]`` is the floor-rounded feasible objective if the
    algorithm stops after ``k + 1`` iterations.
    """

    p_pg: float
    p_max: float
    trials: int
    infeasible: int
    mean_se: np.ndarray
    stderr_se: np.ndarray
    bound_se: float
    bound_stderr: float

    def rows(self) -> list:
        return [
            {
                "p_pg_dbm": round(watt_to_dbm(self.p_pg), 10),
                "p_max_dbm": round(watt_to_dbm(self.p_max), 10),
                "iteration": k + 1,
                "mean_se_bps_hz": float(v),
                "bound_se_bps_hz": self.bound_se,
            }
            for k, v in enumerate(self.mean_se)
        ]


def convergence_trace(params: SystemParams, spec: SweepSpec,
                      config: SolverConfig = SolverConfig(),
                      bound_config: SolverConfig = BOUND_CONFIG) -> list:
    """Per-iteration mean objective for each cell, plus the relaxed bound.

    The iterative run stops after ``spec.iteration_cap`` master iterations
    (earlier if the multipliers settle, in which case the last value is
    carried forward).
    """
    cap = spec.iteration_cap
    capped = replace(config, max_iterations=cap)
    cells = spec.cells()
    cell_params = [params.replace(p_pg=pg, p_max=pm) for pg, pm in cells]
    traces = [[] for _ in cells]
    bounds = [[] for _ in cells]
    infeasible = [0] * len(cells)

    for _, c, realization in _realizations(params, spec):
        cp = cell_params[c]
        try:
            short = solve_relaxed(realization, cp, capped)
            long = solve_relaxed(realization, cp, bound_config)
        except InfeasibleError:
            infeasible[c] += 1
            continue
        bw = cp.bandwidth_total
        tr = [e.feasible_objective / bw for e in short.trace]
        tr += [tr[-1]] * (cap - len(tr))
        traces[c].append(tr)
        bounds[c].append(long.objective / bw)

    out = []
    for (pg, pm), tr, bd, inf in zip(cells, traces, bounds, infeasible):
        tr = np.asarray(tr).reshape(-1, cap)
        n = tr.shape[0]
        mean = tr.mean(axis=0) if n else np.full(cap, math.nan)
        stderr = tr.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(cap)
        b_mean, b_err = _mean_stderr(np.asarray(bd))
        out.append(ConvergenceTrace(pg, pm, n, inf, mean, stderr, b_mean, b_err))
    return out
