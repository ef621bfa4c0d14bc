"""Independent checks on the solver.

Everything here avoids the closed-form multiplier machinery of
:mod:`mmimo_alloc.solver`: exhaustive grid searches evaluate the
large-array objective directly, and the derivative checks work from the
Lagrangian written out term by term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .channel import SystemParams
from .errors import DomainError
from .powermodel import DEFAULT_TOL
from .solver import DualState

LN2 = math.log(2.0)


@dataclass(frozen=True)
class GridSpec:
    """Search grid: log-spaced per-subcarrier powers and explicit antenna counts.

    ``extra_powers`` are merged into the log-spaced axis (useful to make sure
    specific budget-limited powers are representable).
    """

    power_points: int
    power_range: tuple
    antenna_values: Sequence[int]
    extra_powers: Sequence[float] = field(default=())

    def __post_init__(self):
        lo, hi = self.power_range
        if self.power_points < 2:
            raise DomainError("power_points must be >= 2")
        if not 0 < lo < hi:
            raise DomainError(f"power_range must satisfy 0 < min < max, got {self.power_range}")
        if len(self.antenna_values) == 0:
            raise DomainError("antenna_values must not be empty")
        if any(int(a) != a for a in self.antenna_values):
            raise DomainError("antenna_values must be integers")
        if any(p <= 0 for p in self.extra_powers):
            raise DomainError("extra_powers must be positive")

    def powers(self) -> np.ndarray:
        lo, hi = self.power_range
        grid = np.geomspace(lo, hi, self.power_points)
        if len(self.extra_powers):
            grid = np.union1d(grid, np.asarray(self.extra_powers, dtype=float))
        return np.ascontiguousarray(grid)

    def antennas(self) -> np.ndarray:
        return np.ascontiguousarray(np.unique(np.asarray(self.antenna_values, dtype=float)))

    def check_against(self, params: SystemParams):
        a = self.antennas()
        if a[0] < params.n_min or a[-1] > params.n_max:
            raise DomainError(f"antenna_values must lie in [{params.n_min}, {params.n_max}]")


def default_grid(params: SystemParams, power_points: int = 200, decades: float = 3.0) -> GridSpec:
    """``power_points`` log-spaced powers below the largest feasible level, all antenna counts."""
    top = min(params.p_max, (params.p_pg - params.idle_power) / params.epsilon) / params.n_f
    if top <= 0:
        top = params.p_max / params.n_f
    return GridSpec(power_points, (top * 10.0 ** -decades, top),
                    list(range(params.n_min, params.n_max + 1)))


def budget_split_powers(params: SystemParams, antenna_values) -> list:
    """Per-subcarrier powers that spend the whole budget evenly, one per antenna count."""
    out = []
    for n in antenna_values:
        total = min(params.p_max, (params.p_pg - params.p_0 - n * params.p_ac) / params.epsilon)
        if total > 0:
            out.append(total / params.n_f)
    return out


def _term_table(params, lg, powers, antennas):
    """``out[k, j]``: per-subcarrier large-array capacity at ``antennas[k]``, ``powers[j]``."""
    snr = powers[None, :] * lg * antennas[:, None] / params.noise_power_per_subcarrier
    return np.ascontiguousarray(params.subcarrier_bandwidth * np.log2(snr))


@dataclass(frozen=True)
class ChunkResult:
    feasible: bool
    p: float
    n_t: int
    objective: float


@dataclass(frozen=True)
class FullResult:
    feasible: bool
    power: np.ndarray
    antennas: np.ndarray
    objective: float

    @property
    def symmetric(self) -> bool:
        return bool(np.all(self.power == self.power[0]) and np.all(self.antennas == self.antennas[0]))


def brute_force_chunk(params: SystemParams, lg: float, grid: Optional[GridSpec] = None,
                      tol: float = DEFAULT_TOL, backend: Optional[str] = None) -> ChunkResult:
    """Best common ``(p, n_t)`` on a grid, by exhaustive evaluation.

    Infeasible grid points (budgets exceeded beyond ``tol``) are skipped.
    Ties resolve to the fewest antennas, then the lowest power. If no point
    is feasible the result has ``feasible=False`` and objective ``-inf``.
    """
    grid = grid or default_grid(params)
    grid.check_against(params)
    powers, antennas = grid.powers(), grid.antennas()
    term = _term_table(params, lg, powers, antennas)
    k, j, best = kernels.get_backend(backend).chunk_search(
        term, powers, antennas, params.n_f, params.epsilon, params.p_ac, params.p_0,
        params.p_max, params.p_pg, tol)
    if k < 0:
        return ChunkResult(False, math.nan, -1, -math.inf)
    return ChunkResult(True, float(powers[j]), int(antennas[k]), float(best))


def brute_force_full(params: SystemParams, lg: float, grid: GridSpec, tol: float = DEFAULT_TOL,
                     backend: Optional[str] = None) -> FullResult:
    """Exhaustive search letting every subcarrier pick its own ``(p, n_t)``.

    All subcarriers draw from the same grid. The antenna circuit term uses the
    largest count in the tuple. Cost grows as ``len(grid) ** n_f``, so only
    ``n_f <= 3`` is accepted.
    """
    if params.n_f > 3:
        raise DomainError(f"full search is exponential in n_f; got n_f = {params.n_f}")
    grid.check_against(params)
    powers, antennas = grid.powers(), grid.antennas()
    term = _term_table(params, lg, powers, antennas)
    idx, best = kernels.get_backend(backend).full_search(
        term, powers, antennas, params.n_f, params.epsilon, params.p_ac, params.p_0,
        params.p_max, params.p_pg, tol)
    if len(idx) == 0:
        empty = np.full(params.n_f, math.nan)
        return FullResult(False, empty, empty.copy(), -math.inf)
    k, j = np.divmod(np.asarray(idx), powers.shape[0])
    return FullResult(True, powers[j], antennas[k], float(best))


def hessian_eigenvalues(p: float, n_t: float, params: SystemParams) -> tuple[float, float]:
    """Eigenvalues of the Hessian of one subcarrier's large-array capacity in ``(p, n_t)``.

    The Hessian is diagonal, so these are ``-W / (p**2 ln 2)`` and
    ``-W / (n_t**2 ln 2)``.
    """
    if p <= 0 or n_t <= 0:
        raise DomainError("hessian_eigenvalues needs p > 0 and n_t > 0")
    w = params.subcarrier_bandwidth
    return -w / (p * p * LN2), -w / (n_t * n_t * LN2)


def lagrangian(p: float, n_t: float, dual: DualState, params: SystemParams, lg: float) -> float:
    """Lagrangian of the relaxed problem at a chunk allocation."""
    w = params.subcarrier_bandwidth
    cap = params.n_f * w * math.log2(p * lg * n_t / params.noise_power_per_subcarrier)
    c1 = params.n_f * p - params.p_max
    c2 = n_t * params.p_ac + params.n_f * params.epsilon * p + params.p_0 - params.p_pg
    return cap - dual.lam * c1 - dual.beta * c2


def stationarity_residual(p: float, n_t: float, dual: DualState,
                          params: SystemParams) -> tuple[float, float]:
    """Analytic ``(dL/dp, dL/dn_t)`` with ``p`` shared by all subcarriers."""
    if p <= 0 or n_t <= 0:
        raise DomainError("stationarity_residual needs p > 0 and n_t > 0")
    n_f, w = params.n_f, params.subcarrier_bandwidth
    d_p = n_f * w / (LN2 * p) - n_f * (dual.lam + dual.beta * params.epsilon)
    d_n = params.bandwidth_total / (LN2 * n_t) - dual.beta * params.p_ac
    return d_p, d_n


def finite_difference_gradient(fn, x: float, y: float, rel_step: float = 1e-5) -> tuple[float, float]:
    """Central differences of ``fn(x, y)`` with steps proportional to each coordinate."""
    hx, hy = rel_step * x, rel_step * y
    gx = (fn(x + hx, y) - fn(x - hx, y)) / (2 * hx)
    gy = (fn(x, y + hy) - fn(x, y - hy)) / (2 * hy)
    return gx, gy


def finite_difference_curvature(fn, x: float, y: float, rel_step: float = 1e-3) -> tuple[float, float]:
    """Second central differences along each coordinate."""
    hx, hy = rel_step * x, rel_step * y
    f0 = fn(x, y)
    cxx = (fn(x + hx, y) - 2 * f0 + fn(x - hx, y)) / (hx * hx)
    cyy = (fn(x, y + hy) - 2 * f0 + fn(x, y - hy)) / (hy * hy)
    return cxx, cyy
