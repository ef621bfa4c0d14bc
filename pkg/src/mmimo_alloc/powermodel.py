"""Three-term power consumption model and constraint checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SystemParams

RELAXED = "relaxed"
INTEGER = "integer"

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class Allocation:
    """Per-subcarrier transmit powers (W) and active antenna counts."""

    power: np.ndarray
    antennas: np.ndarray
    mode: str = RELAXED

    def __post_init__(self):
        if self.mode not in (RELAXED, INTEGER):
            raise ValueError(f"unknown allocation mode {self.mode!r}")
        object.__setattr__(self, "power", np.asarray(self.power, dtype=float))
        object.__setattr__(self, "antennas", np.asarray(self.antennas, dtype=float))
        if self.power.shape != self.antennas.shape or self.power.ndim != 1:
            raise ValueError("power and antennas must be 1-D arrays of equal length")

    @classmethod
    def chunk(cls, p: float, n_t: float, n_f: int, mode: str = RELAXED) -> "Allocation":
        """Same power and antenna count on every subcarrier."""
        return cls(np.full(n_f, float(p)), np.full(n_f, float(n_t)), mode)

    @property
    def active_antennas(self) -> float:
        return float(np.max(self.antennas))

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "power_w": self.power.tolist(),
            "antennas": [int(a) if self.mode == INTEGER else float(a) for a in self.antennas],
        }


@dataclass(frozen=True)
class PowerBreakdown:
    antenna_power: float
    pa_power: float
    static_power: float
    total: float

    @property
    def pa_to_antenna_ratio(self) -> float:
        return self.pa_power / self.antenna_power

    def to_dict(self) -> dict:
        return {
            "antenna_power_w": self.antenna_power,
            "pa_power_w": self.pa_power,
            "static_power_w": self.static_power,
            "total_w": self.total,
        }


def total_power(alloc: Allocation, params: SystemParams) -> PowerBreakdown:
    """Circuit power of the active antennas, PA power and static power.

    An antenna used by any subcarrier is powered, so the antenna term uses
    the maximum count over subcarriers rather than the sum.
    """
    antenna = float(np.max(alloc.antennas)) * params.p_ac
    pa = params.epsilon * float(np.sum(alloc.power))
    return PowerBreakdown(antenna, pa, params.p_0, antenna + pa + params.p_0)


@dataclass(frozen=True)
class FeasibilityReport:
    """Per-constraint satisfaction flags and slacks (positive = room left).

    ``c1`` is the transmit power allowance, ``c2`` the grid supply, ``c3``
    non-negative powers and ``c4`` the antenna range (plus integrality in
    integer mode).
    """

    c1: bool
    c2: bool
    c3: bool
    c4: bool
    slack_c1: float
    slack_c2: float
    slack_c3: float
    slack_c4: float

    @property
    def feasible(self) -> bool:
        return self.c1 and self.c2 and self.c3 and self.c4

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__} | {"feasible": self.feasible}


def check_feasibility(alloc: Allocation, params: SystemParams, tol: float = DEFAULT_TOL) -> FeasibilityReport:
    slack1 = params.p_max - float(np.sum(alloc.power))
    slack2 = params.p_pg - total_power(alloc, params).total
    slack3 = float(np.min(alloc.power))
    a = alloc.antennas
    slack4 = float(min(np.min(a) - params.n_min, params.n_max - np.max(a)))
    c4 = slack4 >= -tol
    if alloc.mode == INTEGER:
        c4 = c4 and bool(np.all(a == np.floor(a)))
    return FeasibilityReport(
        c1=slack1 >= -tol,
        c2=slack2 >= -tol,
        c3=slack3 >= -tol,
        c4=bool(c4),
        slack_c1=slack1,
        slack_c2=slack2,
        slack_c3=slack3,
        slack_c4=slack4,
    )
