"""System constants, channel drops and per-subcarrier capacity.

All quantities are linear SI: watts, hertz, metres. Conversion from dBm/dB
happens once, at configuration time, through :func:`dbm_to_watt` and
:func:`db_to_linear`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt: float) -> float:
    return 10.0 * math.log10(watt) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Physical constants and power budgets of one base station.

    Defaults follow the reference scenario: 128 subcarriers over 5 MHz,
    -118 dBm noise per subcarrier, 40 dBm static processing power, 30 dBm
    circuit power per antenna, 40 % PA efficiency and 10 to 500 antennas.
    ``p_max`` and ``p_pg`` default to 46 dBm and 50 dBm.
    """

    n_f: int = 128
    bandwidth_total: float = 5e6
    noise_power_per_subcarrier: float = dbm_to_watt(-118.0)
    p_max: float = dbm_to_watt(46.0)
    p_pg: float = dbm_to_watt(50.0)
    p_0: float = dbm_to_watt(40.0)
    p_ac: float = dbm_to_watt(30.0)
    epsilon: float = 2.5
    n_min: int = 10
    n_max: int = 500
    distance: float = 500.0
    carrier_freq: float = 2.5e9
    shadowing_sigma_db: float = 8.0
    pathloss_exponent: float = 3.6
    subcarrier_bandwidth: float = field(init=False)

    def __post_init__(self):
        if int(self.n_f) != self.n_f or self.n_f < 1:
            raise DomainError(f"n_f must be a positive integer, got {self.n_f}")
        if not self.bandwidth_total > 0:
            raise DomainError("bandwidth_total must be positive")
        if not self.epsilon >= 1:
            raise DomainError(f"epsilon must be >= 1, got {self.epsilon}")
        if int(self.n_min) != self.n_min or int(self.n_max) != self.n_max:
            raise DomainError("antenna bounds must be integers")
        if not 0 < self.n_min <= self.n_max:
            raise DomainError(f"need 0 < n_min <= n_max, got {self.n_min}, {self.n_max}")
        for name in ("noise_power_per_subcarrier", "p_max", "p_pg", "p_0", "p_ac",
                     "distance", "carrier_freq", "pathloss_exponent"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        if not self.shadowing_sigma_db >= 0:
            raise DomainError("shadowing_sigma_db must be non-negative")
        object.__setattr__(self, "n_f", int(self.n_f))
        object.__setattr__(self, "n_min", int(self.n_min))
        object.__setattr__(self, "n_max", int(self.n_max))
        object.__setattr__(self, "subcarrier_bandwidth", self.bandwidth_total / self.n_f)

    @property
    def idle_power(self) -> float:
        """Consumption with zero transmit power and ``n_min`` antennas."""
        return self.n_min * self.p_ac + self.p_0

    def path_loss(self) -> float:
        """Linear path gain of a log-distance model with 1 m free-space reference."""
        ref_db = 20.0 * math.log10(4.0 * math.pi * self.carrier_freq / SPEED_OF_LIGHT)
        loss_db = ref_db + 10.0 * self.pathloss_exponent * math.log10(self.distance)
        return db_to_linear(-loss_db)

    def replace(self, **changes) -> "SystemParams":
        values = {k: getattr(self, k) for k in self.__dataclass_fields__
                  if k != "subcarrier_bandwidth"}
        values.update(changes)
        return SystemParams(**values)


@dataclass(frozen=True)
class ChannelRealization:
    """One drop: small-scale fading per subcarrier plus large-scale gains.

    ``fading`` has shape ``(n_f, n_max)``; an allocation of ``n`` antennas
    uses the first ``n`` columns on every subcarrier.
    """

    fading: np.ndarray
    path_loss: float
    shadowing: float

    @property
    def large_scale_gain(self) -> float:
        return self.path_loss * self.shadowing

    @property
    def n_f(self) -> int:
        return self.fading.shape[0]

    @property
    def n_max(self) -> int:
        return self.fading.shape[1]

    @cached_property
    def _cumulative(self) -> np.ndarray:
        return np.cumsum(self.fading.real ** 2 + self.fading.imag ** 2, axis=1)

    def cumulative_gains(self) -> np.ndarray:
        """``out[i, k]`` is the MRT gain of subcarrier ``i`` with ``k + 1`` antennas."""
        return self._cumulative


def sample_channel(params: SystemParams, seed: int) -> ChannelRealization:
    """Draw a Rayleigh-fading, log-normally shadowed drop.

    Fading entries are CN(0, 1). Shadowing is ``10**(X/10)`` with
    ``X ~ N(0, sigma_db**2)``. The result is a pure function of
    ``(params, seed)``; any integer seed is reduced modulo 2**64.
    """
    rng = np.random.default_rng(int(seed) % (1 << 64))
    x_db = rng.normal(0.0, params.shadowing_sigma_db) if params.shadowing_sigma_db > 0 else 0.0
    parts = rng.standard_normal((params.n_f, params.n_max, 2))
    fading = (parts[..., 0] + 1j * parts[..., 1]) * math.sqrt(0.5)
    shadowing = 1.0 if x_db == 0.0 else db_to_linear(x_db)
    return ChannelRealization(fading=fading, path_loss=params.path_loss(), shadowing=shadowing)


def mrt_gain(realization: ChannelRealization, subcarrier: int, n_t: int) -> float:
    """``|h^T f|^2`` for the conjugate beamformer ``f = conj(h) / ||h||``.

    That equals ``||h||^2`` over the first ``n_t`` antennas. ``subcarrier`` is
    a zero-based index.
    """
    if not 0 <= subcarrier < realization.n_f:
        raise DomainError(f"subcarrier {subcarrier} outside [0, {realization.n_f})")
    if int(n_t) != n_t or not 1 <= n_t <= realization.n_max:
        raise DomainError(f"n_t must be an integer in [1, {realization.n_max}], got {n_t}")
    h = realization.fading[subcarrier, : int(n_t)]
    return float(np.vdot(h, h).real)


def exact_capacity(p, lg, gain, params: SystemParams):
    """Shannon capacity ``W log2(1 + p lg gain / (N0 W))`` in bit/s.

    Works elementwise on arrays.
    """
    snr = np.asarray(p, dtype=float) * lg * np.asarray(gain, dtype=float) / params.noise_power_per_subcarrier
    out = params.subcarrier_bandwidth * np.log1p(snr) / math.log(2.0)
    return float(out) if np.ndim(out) == 0 else out


def asymptotic_capacity(p, lg, n_t, params: SystemParams):
    """Large-array capacity ``W log2(p lg n_t / (W N0))`` in bit/s.

    Negative when the hardened SNR is below one.

    Raises
    ------
    DomainError
        If any ``p`` or ``n_t`` is not strictly positive.
    """
    p = np.asarray(p, dtype=float)
    n_t = np.asarray(n_t, dtype=float)
    if np.any(p <= 0) or np.any(n_t <= 0):
        raise DomainError("asymptotic capacity needs p > 0 and n_t > 0")
    out = params.subcarrier_bandwidth * np.log2(p * lg * n_t / params.noise_power_per_subcarrier)
    return float(out) if np.ndim(out) == 0 else out
