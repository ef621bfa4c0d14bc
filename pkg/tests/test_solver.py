import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mmimo_alloc.channel import SystemParams, dbm_to_watt, sample_channel
from mmimo_alloc.errors import DomainError, InfeasibleError
from mmimo_alloc.montecarlo import BOUND_CONFIG, trial_seed
from mmimo_alloc.oracle import brute_force_chunk, lagrangian
from mmimo_alloc.powermodel import INTEGER, RELAXED, Allocation
from mmimo_alloc.solver import (ASYMPTOTIC, EXACT, DualState, SolverConfig, capacity_of,
                                integerize, multiplier_unit, project_feasible, solve,
                                solve_relaxed, subproblem_solution, update_multipliers)

LN2 = math.log(2.0)


def budgets(p_pg_dbm, p_max_dbm, **kw):
    return SystemParams(p_pg=dbm_to_watt(p_pg_dbm), p_max=dbm_to_watt(p_max_dbm), **kw)


@pytest.fixture(scope="module")
def drop():
    return sample_channel(SystemParams(), trial_seed(0, -1, 0))


# -- subproblem ---------------------------------------------------------------

def test_subproblem_unit_water_level(params):
    u = multiplier_unit(params)
    p, _ = subproblem_solution(DualState(0.5 * u, 0.2 * u), params)
    assert p == pytest.approx(1.0, rel=1e-14)


def test_subproblem_antenna_clamp_boundary(params):
    beta = params.bandwidth_total / (LN2 * params.p_ac * params.n_max)
    _, n = subproblem_solution(DualState(1.0, beta), params)
    assert n == pytest.approx(params.n_max, rel=1e-14)
    assert n <= params.n_max
    _, n = subproblem_solution(DualState(1.0, beta / 2), params)
    assert n == params.n_max
    _, n = subproblem_solution(DualState(1.0, beta * 1000), params)
    assert n == params.n_min


def test_subproblem_guards(params):
    p, n = subproblem_solution(DualState(0.0, 0.0), params)
    assert p == params.p_max
    assert n == params.n_max


def test_subproblem_power_cap(params):
    p, _ = subproblem_solution(DualState(1e-9, 0.0), params)
    assert p == params.p_max


def test_dual_state_rejects_negative():
    with pytest.raises(DomainError):
        DualState(-1.0, 0.0)


# -- multiplier updates ---------------------------------------------------------

@pytest.mark.parametrize("relative", [True, False])
def test_update_zero_subgradients(params, relative):
    cfg = SolverConfig(relative_steps=relative)
    u = multiplier_unit(params)
    p = params.p_max / params.n_f
    n = params.p_pg - params.p_0 - params.n_f * params.epsilon * p
    new = update_multipliers(DualState(u, u, 3), p, n / params.p_ac, params, cfg)
    assert new.lam == pytest.approx(u, rel=1e-12)
    assert new.beta == pytest.approx(u, rel=1e-12)
    assert new.iteration == 4


@pytest.mark.parametrize("relative", [True, False])
def test_update_signs(params, relative):
    cfg = SolverConfig(relative_steps=relative)
    u = multiplier_unit(params)
    start = DualState(u, u)
    over = update_multipliers(start, 2 * params.p_max / params.n_f, params.n_max, params, cfg)
    assert over.lam > u and over.beta > u
    under = update_multipliers(start, 1e-6, params.n_min, params, cfg)
    assert under.lam < u and under.beta < u


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e8), st.floats(0, 1e8), st.floats(0, 10), st.floats(10, 500),
       st.integers(0, 100), st.booleans())
def test_update_keeps_multipliers_nonnegative(lam, beta, p, n, m, relative):
    params = SystemParams()
    new = update_multipliers(DualState(lam, beta, m), p, n, params,
                             SolverConfig(relative_steps=relative))
    assert new.lam >= 0 and new.beta >= 0


# -- projection -----------------------------------------------------------------

def test_projection_keeps_feasible_points(params):
    p, n = project_feasible(0.1, 45.0, params)
    assert (p, n) == (0.1, 45.0)


def test_projection_scales_power(params):
    p, n = project_feasible(1.0, 45.0, params)
    assert n == 45.0
    assert params.n_f * p * params.epsilon + n * params.p_ac + params.p_0 == pytest.approx(params.p_pg)


def test_projection_lowers_antennas_when_circuits_alone_exceed(params):
    p, n = project_feasible(0.1, 95.0, params)
    assert n == 89.0
    assert p > 0
    assert n * params.p_ac + params.n_f * params.epsilon * p + params.p_0 <= params.p_pg * (1 + 1e-12)


# -- solve_relaxed ----------------------------------------------------------------

def test_infeasible_idle_floor(drop):
    with pytest.raises(InfeasibleError):
        solve_relaxed(drop, SystemParams(p_pg=15.0))
    with pytest.raises(InfeasibleError):
        solve_relaxed(drop, SystemParams(p_pg=20.0))


def test_huge_budgets(drop):
    params = budgets(80, 60)
    report = solve_relaxed(drop, params, BOUND_CONFIG)
    assert report.allocation.active_antennas == params.n_max
    assert np.sum(report.allocation.power) == pytest.approx(params.p_max, rel=1e-6)


@pytest.mark.parametrize("p_pg_dbm,p_max_dbm,n_expected,psum_expected", [
    # budget split evenly between circuits and PAs: n = R / 2, sum p = R / (2 eps), R = p_pg - p_0
    (50, 46, 45.0, 18.0),
    # transmit allowance binds: sum p = p_max, n = R - eps p_max
    (54, 40, dbm_to_watt(54) - 10 - 25, 10.0),
])
def test_relaxed_optimum_matches_hand_solution(drop, p_pg_dbm, p_max_dbm, n_expected, psum_expected):
    report = solve_relaxed(drop, budgets(p_pg_dbm, p_max_dbm), BOUND_CONFIG)
    assert report.allocation.active_antennas == pytest.approx(n_expected, rel=1e-3)
    assert np.sum(report.allocation.power) == pytest.approx(psum_expected, rel=1e-3)


def test_report_invariants(drop, params):
    cfg = SolverConfig(max_iterations=20)
    report = solve_relaxed(drop, params, cfg)
    assert 1 <= len(report.trace) <= cfg.max_iterations
    assert report.objective == capacity_of(report.allocation, drop, params)
    assert report.objective_exact == capacity_of(report.allocation, drop, params, EXACT)
    assert report.allocation.mode == RELAXED
    assert report.feasibility.feasible
    assert np.all(report.allocation.power == report.allocation.power[0])
    assert np.all(report.allocation.antennas == report.allocation.antennas[0])
    assert all(t.lam >= 0 and t.beta >= 0 for t in report.trace)
    assert report.dual.lam >= 0 and report.dual.beta >= 0


def test_solver_matches_oracle_48_46(drop):
    params = budgets(48, 46)
    report = solve_relaxed(drop, params)
    best = brute_force_chunk(params, drop.large_scale_gain)
    assert abs(report.objective - best.objective) / best.objective <= 0.02


def test_solver_trace_matches_composed_operations(drop, params, backend):
    cfg = SolverConfig(max_iterations=15, backend=backend)
    report = solve_relaxed(drop, params, cfg)
    dual = DualState.initial(params)
    for entry in report.trace:
        p, n = subproblem_solution(dual, params, cfg)
        assert entry.lam == pytest.approx(dual.lam, rel=1e-12)
        assert entry.beta == pytest.approx(dual.beta, rel=1e-12)
        assert entry.p == pytest.approx(p, rel=1e-12)
        assert entry.n_t == pytest.approx(n, rel=1e-12)
        dual = update_multipliers(dual, p, n, params, cfg)
    assert report.dual.lam == pytest.approx(dual.lam, rel=1e-12)


def test_backends_agree(drop, params):
    a = solve_relaxed(drop, params, SolverConfig(backend="python"))
    b = solve_relaxed(drop, params, SolverConfig(backend="cython"))
    assert a.objective == pytest.approx(b.objective, rel=1e-12)
    assert [t.n_t for t in a.trace] == pytest.approx([t.n_t for t in b.trace], rel=1e-12)


def test_additive_steps_still_feasible(drop, params):
    report = solve_relaxed(drop, params, SolverConfig(relative_steps=False))
    assert report.feasibility.feasible


def test_converged_flag(drop, params):
    assert solve_relaxed(drop, params, BOUND_CONFIG).converged
    assert not solve_relaxed(drop, params, SolverConfig(max_iterations=2)).converged


def test_weak_duality(drop, params):
    best = solve_relaxed(drop, params, BOUND_CONFIG).objective
    lg = drop.large_scale_gain
    rng = np.random.default_rng(3)
    u = multiplier_unit(params)
    for lam, beta in u * rng.uniform(0.01, 5, size=(50, 2)):
        dual = DualState(lam, beta)
        p, n = subproblem_solution(dual, params)
        assert lagrangian(p, n, dual, params, lg) >= best * (1 - 1e-9)


def test_dual_value_decreases_overall(drop, params):
    report = solve_relaxed(drop, params, BOUND_CONFIG)
    lg = drop.large_scale_gain
    values = [lagrangian(t.p, t.n_t, DualState(t.lam, t.beta), params, lg) for t in report.trace]
    assert values[-1] <= values[0]
    assert values[-1] == pytest.approx(report.objective, rel=1e-4)


# -- integerize --------------------------------------------------------------------

def test_integerize_floors(drop):
    params = budgets(60, 46)
    relaxed = solve_relaxed(drop, params)
    fake = dataclasses.replace(relaxed, allocation=Allocation.chunk(0.01, 237.8, params.n_f))
    out = integerize(fake, params)
    assert out.allocation.mode == INTEGER
    assert out.allocation.active_antennas == 237.0
    assert np.all(out.allocation.power == 0.01)


def test_integerize_n_min_fixed_point(drop):
    params = budgets(44, 46)
    relaxed = solve_relaxed(drop, params)
    fake = dataclasses.replace(relaxed, allocation=Allocation.chunk(0.001, params.n_min, params.n_f))
    assert integerize(fake, params).allocation.active_antennas == params.n_min


def test_integerize_requires_relaxed(drop, params):
    _, integer = solve(drop, params)
    with pytest.raises(ValueError):
        integerize(integer, params)


@settings(max_examples=40, deadline=None)
@given(st.floats(43.5, 56), st.floats(38, 52), st.integers(0, 2**32))
def test_integer_never_beats_relaxed(p_pg_dbm, p_max_dbm, seed):
    params = budgets(p_pg_dbm, p_max_dbm, n_f=16)
    realization = sample_channel(params, seed)
    relaxed, integer = solve(realization, params, SolverConfig(max_iterations=10))
    assert integer.objective <= relaxed.objective
    assert integer.feasibility.feasible and relaxed.feasibility.feasible
    assert integer.power.total <= relaxed.power.total


@settings(max_examples=30, deadline=None)
@given(st.floats(44, 55), st.floats(38, 52), st.floats(0.1, 3.0), st.booleans())
def test_objective_monotone_in_budgets(p_pg_dbm, p_max_dbm, delta_db, which):
    drop = sample_channel(SystemParams(n_f=4), 99)
    lo = budgets(p_pg_dbm, p_max_dbm, n_f=4)
    hi = budgets(p_pg_dbm + delta_db, p_max_dbm, n_f=4) if which else \
        budgets(p_pg_dbm, p_max_dbm + delta_db, n_f=4)
    a = solve_relaxed(drop, lo, BOUND_CONFIG).objective
    b = solve_relaxed(drop, hi, BOUND_CONFIG).objective
    assert b >= a - 1e-6 * abs(a)


# -- capacity_of ---------------------------------------------------------------------

def test_capacity_of_models(drop, params):
    zero = Allocation.chunk(0.0, 20, params.n_f)
    assert capacity_of(zero, drop, params, EXACT) == 0.0
    with pytest.raises(DomainError):
        capacity_of(zero, drop, params, ASYMPTOTIC)
    with pytest.raises(ValueError):
        capacity_of(zero, drop, params, "other")


def test_asymptotic_close_to_exact_on_solver_output():
    params = SystemParams()
    gaps = []
    for t in range(60):
        drop = sample_channel(params, trial_seed(1, -1, t))
        _, integer = solve(drop, params)
        a = integer.allocation
        snr = a.power[0] * drop.large_scale_gain * a.active_antennas / params.noise_power_per_subcarrier
        if snr > 100:
            gaps.append(abs(integer.objective - integer.objective_exact) / integer.objective_exact)
    assert len(gaps) >= 20
    assert np.mean(gaps) < 0.01
