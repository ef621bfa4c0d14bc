"""Dual decomposition solver for the relaxed power/antenna allocation problem.

With many antennas every subcarrier sees the same hardened gain, so the
optimal policy is chunk based: one power level ``p`` and one antenna count
``n_t`` shared by all subcarriers. The inner problem then has the closed
form::

    p   = W / (ln 2 (lam + beta eps))             capped at p_max
    n_t = B / (ln 2 p_ac beta)                    clamped to [n_min, n_max]

and the multipliers of the transmit-power and grid-supply budgets follow
projected subgradient steps with diminishing step sizes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .channel import ChannelRealization, SystemParams, asymptotic_capacity, exact_capacity
from .errors import DomainError, InfeasibleError
from .powermodel import (INTEGER, RELAXED, Allocation, FeasibilityReport, PowerBreakdown,
                         check_feasibility, total_power)

LN2 = math.log(2.0)
ASYMPTOTIC = "asymptotic"
EXACT = "exact"


def multiplier_unit(params: SystemParams) -> float:
    """``W / ln 2`` per watt: the multiplier value giving a 1 W water level."""
    return params.subcarrier_bandwidth / LN2


@dataclass(frozen=True)
class DualState:
    lam: float
    beta: float
    iteration: int = 0

    def __post_init__(self):
        if self.lam < 0 or self.beta < 0:
            raise DomainError(f"multipliers must be non-negative, got {self.lam}, {self.beta}")

    @classmethod
    def initial(cls, params: SystemParams) -> "DualState":
        u = multiplier_unit(params)
        return cls(u, u, 0)


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls.

    Step sizes are ``step_scale * s / sqrt(m + 1)``. With ``relative_steps``
    (default) ``s`` is the current multiplier, floored at
    ``step_floor * W / ln 2`` so a zero multiplier can grow again; otherwise
    ``s = W / ln 2``. ``None`` step scales resolve to ``1 / p_max`` and
    ``1 / p_pg``.
    """

    max_iterations: int = 50
    step_scale_1: Optional[float] = None
    step_scale_2: Optional[float] = None
    convergence_tol: float = 1e-6
    multiplier_floor: float = 1e-12
    relative_steps: bool = True
    step_floor: float = 1e-3
    backend: Optional[str] = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")
        for name in ("step_scale_1", "step_scale_2"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("convergence_tol", "multiplier_floor", "step_floor"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")

    def steps(self, params: SystemParams) -> tuple[float, float]:
        s1 = self.step_scale_1 if self.step_scale_1 is not None else 1.0 / params.p_max
        s2 = self.step_scale_2 if self.step_scale_2 is not None else 1.0 / params.p_pg
        return s1, s2


@dataclass(frozen=True)
class TraceEntry:
    """One master iteration.

    ``objective`` is the asymptotic capacity of the raw subproblem solution,
    which may violate the budgets; ``feasible_objective`` is that of the
    projected, floor-rounded allocation the iterate would yield if the
    algorithm stopped here.
    """

    iteration: int
    lam: float
    beta: float
    p: float
    n_t: float
    objective: float
    feasible_objective: float

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "lambda": self.lam,
            "beta": self.beta,
            "p_w": self.p,
            "n_t": self.n_t,
            "objective_bps": self.objective,
            "feasible_objective_bps": self.feasible_objective,
        }


@dataclass(frozen=True)
class SolveReport:
    allocation: Allocation
    dual: DualState
    objective: float
    objective_exact: float
    trace: list
    converged: bool
    power: PowerBreakdown
    feasibility: FeasibilityReport
    realization: ChannelRealization = field(repr=False, compare=False)

    def spectral_efficiency(self, params: SystemParams) -> float:
        return self.objective / params.bandwidth_total

    def to_dict(self) -> dict:
        return {
            "mode": self.allocation.mode,
            "allocation": self.allocation.to_dict(),
            "dual": {"lambda": self.dual.lam, "beta": self.dual.beta,
                     "iteration": self.dual.iteration},
            "objective_bps": self.objective,
            "objective_exact_bps": self.objective_exact,
            "converged": self.converged,
            "power": self.power.to_dict(),
            "feasibility": self.feasibility.to_dict(),
            "trace": [t.to_dict() for t in self.trace],
        }


def subproblem_solution(dual: DualState, params: SystemParams,
                        config: SolverConfig = SolverConfig()) -> tuple[float, float]:
    """Closed-form maximiser of the Lagrangian for fixed multipliers.

    Returns the common per-subcarrier power (W) and the real-valued antenna
    count. A vanishing denominator falls back to ``p_max`` (power) or
    ``n_max`` (antennas).
    """
    s = dual.lam + dual.beta * params.epsilon
    if s < config.multiplier_floor:
        p = params.p_max
    else:
        p = min(params.subcarrier_bandwidth / (LN2 * s), params.p_max)
    if dual.beta < config.multiplier_floor:
        n = float(params.n_max)
    else:
        n = params.bandwidth_total / (LN2 * params.p_ac * dual.beta)
        n = min(max(n, float(params.n_min)), float(params.n_max))
    return p, n


def update_multipliers(dual: DualState, p: float, n_t: float, params: SystemParams,
                       config: SolverConfig = SolverConfig()) -> DualState:
    """One projected subgradient step on both multipliers."""
    s1, s2 = config.steps(params)
    unit = multiplier_unit(params)
    d = math.sqrt(dual.iteration + 1.0)
    if config.relative_steps:
        lo = config.step_floor * unit
        xi_1 = s1 * max(dual.lam, lo) / d
        xi_2 = s2 * max(dual.beta, lo) / d
    else:
        xi_1 = s1 * unit / d
        xi_2 = s2 * unit / d
    g1 = params.p_max - params.n_f * p
    g2 = params.p_pg - n_t * params.p_ac - params.n_f * params.epsilon * p - params.p_0
    return DualState(max(0.0, dual.lam - xi_1 * g1), max(0.0, dual.beta - xi_2 * g2),
                     dual.iteration + 1)


def project_feasible(p, n_t, params: SystemParams):
    """Pull a chunk allocation ``(p, n_t)`` back inside the budgets.

    The antenna count is clamped to its range and, only if the antennas alone
    would exhaust the grid supply, lowered one antenna at a time. The power
    is then scaled down by the largest factor <= 1 that meets both budgets.
    Works elementwise on arrays.
    """
    p = np.asarray(p, dtype=float)
    n = np.clip(np.asarray(n_t, dtype=float), params.n_min, params.n_max)
    over = n * params.p_ac + params.p_0 - params.p_pg
    steps = np.where(over >= 0, np.floor(over / params.p_ac) + 1.0, 0.0)
    n = np.maximum(n - steps, params.n_min)
    pa_budget = (params.p_pg - params.p_0 - n * params.p_ac) / (params.n_f * params.epsilon)
    p = np.minimum(np.minimum(p, params.p_max / params.n_f), pa_budget)
    if p.ndim == 0:
        return float(p), float(n)
    return p, n


def capacity_of(alloc: Allocation, realization: ChannelRealization, params: SystemParams,
                model: str = ASYMPTOTIC) -> float:
    """Aggregate capacity (bit/s), summed over subcarriers.

    The exact model needs whole antennas; a relaxed count is rounded down.
    """
    lg = realization.large_scale_gain
    if model == ASYMPTOTIC:
        return float(np.sum(asymptotic_capacity(alloc.power, lg, alloc.antennas, params)))
    if model == EXACT:
        idx = np.floor(alloc.antennas).astype(int) - 1
        gains = realization.cumulative_gains()[np.arange(realization.n_f), idx]
        return float(np.sum(exact_capacity(alloc.power, lg, gains, params)))
    raise ValueError(f"unknown capacity model {model!r}")


def _require_feasible_floor(params: SystemParams):
    if params.idle_power >= params.p_pg:
        raise InfeasibleError(
            f"idle consumption {params.idle_power:.6g} W (n_min antennas + static) "
            f"leaves no transmit power under p_pg = {params.p_pg:.6g} W")


def _report(p, n, mode, dual, trace, converged, realization, params) -> SolveReport:
    alloc = Allocation.chunk(p, n, params.n_f, mode)
    feas = check_feasibility(alloc, params)
    if not feas.feasible:
        raise AssertionError(f"internal error: emitted allocation infeasible: {feas}")
    return SolveReport(
        allocation=alloc,
        dual=dual,
        objective=capacity_of(alloc, realization, params, ASYMPTOTIC),
        objective_exact=capacity_of(alloc, realization, params, EXACT),
        trace=trace,
        converged=converged,
        power=total_power(alloc, params),
        feasibility=feas,
        realization=realization,
    )


def solve_relaxed(realization: ChannelRealization, params: SystemParams,
                  config: SolverConfig = SolverConfig()) -> SolveReport:
    """Run the dual decomposition to convergence or ``config.max_iterations``.

    Raises
    ------
    InfeasibleError
        If ``n_min`` antennas plus static power already use the whole supply.
    """
    _require_feasible_floor(params)
    k = kernels.get_backend(config.backend)
    start = DualState.initial(params)
    s1, s2 = config.steps(params)
    lams, betas, ps, ns, lam, beta, converged = k.dual_iterations(
        start.lam, start.beta, params.n_f, params.subcarrier_bandwidth, params.bandwidth_total,
        params.epsilon, params.p_ac, params.p_0, params.p_max, params.p_pg,
        params.n_min, params.n_max, s1, s2, multiplier_unit(params),
        config.relative_steps, config.step_floor, config.multiplier_floor,
        config.max_iterations, config.convergence_tol)

    lg = realization.large_scale_gain
    raw = params.n_f * asymptotic_capacity(ps, lg, ns, params)
    pf, nf = project_feasible(ps, ns, params)
    feasible = params.n_f * asymptotic_capacity(pf, lg, np.floor(nf), params)
    trace = [TraceEntry(m + 1, float(lams[m]), float(betas[m]), float(ps[m]), float(ns[m]),
                        float(raw[m]), float(feasible[m]))
             for m in range(len(ps))]
    dual = DualState(float(lam), float(beta), len(ps))
    return _report(float(pf[-1]), float(nf[-1]), RELAXED, dual, trace, bool(converged),
                   realization, params)


def integerize(report: SolveReport, params: SystemParams) -> SolveReport:
    """Round the antenna count down to a whole number, keeping the powers."""
    if report.allocation.mode != RELAXED:
        raise ValueError("integerize expects a relaxed-mode report")
    alloc = report.allocation
    n = max(math.floor(alloc.active_antennas), params.n_min)
    return _report(float(alloc.power[0]), float(n), INTEGER, report.dual, report.trace,
                   report.converged, report.realization, params)


def solve(realization: ChannelRealization, params: SystemParams,
          config: SolverConfig = SolverConfig()) -> tuple[SolveReport, SolveReport]:
    """Relaxed solve followed by floor rounding; returns ``(relaxed, integer)``."""
    relaxed = solve_relaxed(realization, params, config)
    return relaxed, integerize(relaxed, params)


__all__ = [
    "ASYMPTOTIC", "EXACT", "DualState", "SolverConfig", "SolveReport", "TraceEntry",
    "capacity_of", "integerize", "multiplier_unit", "project_feasible", "solve",
    "solve_relaxed", "subproblem_solution", "update_multipliers",
]
