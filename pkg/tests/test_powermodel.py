import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mmimo_alloc.channel import SystemParams
from mmimo_alloc.powermodel import (INTEGER, RELAXED, Allocation, check_feasibility,
                                    total_power)


def test_total_power_example():
    params = SystemParams(n_f=4)
    alloc = Allocation.chunk(0.5, 10, 4)
    b = total_power(alloc, params)
    assert b.antenna_power == 10.0
    assert b.pa_power == pytest.approx(5.0)
    assert b.total == pytest.approx(25.0)
    assert b.total == b.antenna_power + b.pa_power + b.static_power


def test_idle_floor():
    params = SystemParams()
    b = total_power(Allocation.chunk(0.0, params.n_min, params.n_f), params)
    assert b.total == pytest.approx(params.n_min * params.p_ac + params.p_0)


def test_antenna_power_uses_max_not_sum():
    params = SystemParams(n_f=4)
    alloc = Allocation(np.zeros(4), np.array([10.0, 20.0, 10.0, 10.0]))
    assert total_power(alloc, params).antenna_power == 20 * params.p_ac


def test_zero_power_allocation_feasible():
    params = SystemParams()
    rep = check_feasibility(Allocation.chunk(0.0, params.n_min, params.n_f), params)
    assert rep.feasible
    assert rep.slack_c3 == 0.0


def test_c1_boundary_zero_slack():
    params = SystemParams(n_f=4, p_max=2.0)
    rep = check_feasibility(Allocation.chunk(0.5, 10, 4), params)
    assert rep.c1 and rep.slack_c1 == 0.0


def test_violations_detected():
    params = SystemParams(n_f=4, p_max=2.0, p_pg=30.0)
    rep = check_feasibility(Allocation.chunk(1.0, 10, 4), params)
    assert not rep.c1 and rep.slack_c1 == pytest.approx(-2.0)
    rep = check_feasibility(Allocation.chunk(0.4, 20, 4), params)
    assert rep.c1 and not rep.c2
    rep = check_feasibility(Allocation(np.array([0.1, -0.1, 0.0, 0.0]), np.full(4, 10.0)), params)
    assert not rep.c3
    rep = check_feasibility(Allocation.chunk(0.1, 9, 4), params)
    assert not rep.c4


def test_tolerance_absorbs_rounding():
    params = SystemParams(n_f=4, p_max=2.0)
    alloc = Allocation.chunk(0.5 + 1e-10, 10, 4)
    assert check_feasibility(alloc, params).c1
    assert not check_feasibility(alloc, params, tol=0.0).c1


def test_integer_mode_requires_integrality():
    params = SystemParams(n_f=2)
    assert check_feasibility(Allocation.chunk(0.1, 12.0, 2, INTEGER), params).c4
    assert not check_feasibility(Allocation.chunk(0.1, 12.5, 2, INTEGER), params).c4
    assert check_feasibility(Allocation.chunk(0.1, 12.5, 2, RELAXED), params).c4


def test_allocation_validation():
    with pytest.raises(ValueError):
        Allocation(np.zeros(3), np.zeros(2))
    with pytest.raises(ValueError):
        Allocation(np.zeros(2), np.full(2, 10.0), "fractional")


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=3, max_size=3),
       st.lists(st.floats(10, 500), min_size=3, max_size=3),
       st.integers(0, 2), st.floats(0, 5), st.floats(0, 50))
def test_total_power_monotone(power, antennas, i, dp, dn):
    params = SystemParams(n_f=3)
    base = Allocation(np.array(power), np.array(antennas))
    p2 = np.array(power)
    p2[i] += dp
    a2 = np.array(antennas)
    a2[int(np.argmax(a2))] += dn
    assert total_power(Allocation(p2, np.array(antennas)), params).total >= total_power(base, params).total
    assert total_power(Allocation(np.array(power), a2), params).total >= total_power(base, params).total


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.floats(10, 500))
def test_flooring_never_increases_power(p, n):
    params = SystemParams(n_f=8)
    relaxed = Allocation.chunk(p, n, 8)
    floored = Allocation.chunk(p, np.floor(n), 8, INTEGER)
    assert total_power(floored, params).total <= total_power(relaxed, params).total
    if check_feasibility(relaxed, params).c2:
        assert check_feasibility(floored, params).c2
