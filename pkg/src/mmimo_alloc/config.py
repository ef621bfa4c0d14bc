"""Flat ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment. Power-like keys come in
a ``_dbm`` and a ``_w`` flavour and are converted to watts here, so nothing
downstream sees logarithmic units. Unspecified keys keep the reference
scenario defaults.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .channel import SystemParams, dbm_to_watt, watt_to_dbm
from .errors import ConfigError, DomainError
from .montecarlo import SweepSpec
from .solver import SolverConfig

DEFAULT_PPG_DBM = (44.0, 46.0, 48.0, 50.0, 52.0, 54.0)
FORMATS = ("csv", "json")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    return int(text.strip())


def _float_list(text: str) -> tuple:
    items = [s for s in text.replace(" ", "").split(",") if s]
    if not items:
        raise ValueError("empty list")
    return tuple(float(s) for s in items)


def _positive(v):
    return v > 0


# key -> (section, field, parser, check, check description)
_KEYS = {
    "n_f": ("system", "n_f", _int, _positive, "must be >= 1"),
    "bandwidth_hz": ("system", "bandwidth_total", float, _positive, "must be > 0"),
    "noise_dbm": ("system", "noise_power_per_subcarrier", lambda s: dbm_to_watt(float(s)), None, ""),
    "noise_w": ("system", "noise_power_per_subcarrier", float, _positive, "must be > 0"),
    "p_max_dbm": ("system", "p_max", lambda s: dbm_to_watt(float(s)), None, ""),
    "p_max_w": ("system", "p_max", float, _positive, "must be > 0"),
    "p_pg_dbm": ("system", "p_pg", lambda s: dbm_to_watt(float(s)), None, ""),
    "p_pg_w": ("system", "p_pg", float, _positive, "must be > 0"),
    "p_0_dbm": ("system", "p_0", lambda s: dbm_to_watt(float(s)), None, ""),
    "p_0_w": ("system", "p_0", float, _positive, "must be > 0"),
    "p_ac_dbm": ("system", "p_ac", lambda s: dbm_to_watt(float(s)), None, ""),
    "p_ac_w": ("system", "p_ac", float, _positive, "must be > 0"),
    "epsilon": ("system", "epsilon", float, lambda v: v >= 1, "must be >= 1"),
    "n_min": ("system", "n_min", _int, _positive, "must be >= 1"),
    "n_max": ("system", "n_max", _int, _positive, "must be >= 1"),
    "distance_m": ("system", "distance", float, _positive, "must be > 0"),
    "carrier_freq_hz": ("system", "carrier_freq", float, _positive, "must be > 0"),
    "shadowing_sigma_db": ("system", "shadowing_sigma_db", float, lambda v: v >= 0, "must be >= 0"),
    "pathloss_exponent": ("system", "pathloss_exponent", float, _positive, "must be > 0"),
    "max_iterations": ("solver", "max_iterations", _int, _positive, "must be >= 1"),
    "step_scale_1": ("solver", "step_scale_1", float, _positive, "must be > 0"),
    "step_scale_2": ("solver", "step_scale_2", float, _positive, "must be > 0"),
    "convergence_tol": ("solver", "convergence_tol", float, _positive, "must be > 0"),
    "multiplier_floor": ("solver", "multiplier_floor", float, _positive, "must be > 0"),
    "relative_steps": ("solver", "relative_steps", _bool, None, ""),
    "step_floor": ("solver", "step_floor", float, _positive, "must be > 0"),
    "backend": ("solver", "backend", str.strip, lambda v: v in ("cython", "python"),
                "must be 'cython' or 'python'"),
    "sweep_ppg_dbm": ("sweep", "p_pg_dbm", _float_list, None, ""),
    "sweep_pmax_dbm": ("sweep", "p_max_dbm", _float_list, None, ""),
    "trials": ("sweep", "trials", _int, _positive, "must be >= 1"),
    "base_seed": ("sweep", "base_seed", _int, None, ""),
    "iteration_cap": ("sweep", "iteration_cap", _int, _positive, "must be >= 1"),
    "matched_seeds": ("sweep", "matched_seeds", _bool, None, ""),
    "output_path": ("output", "output_path", str.strip, None, ""),
    "output_format": ("output", "output_format", lambda s: s.strip().lower(),
                      lambda v: v in FORMATS, "must be 'csv' or 'json'"),
}

KNOWN_KEYS = tuple(sorted(_KEYS))


@dataclass
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    solver: SolverConfig = field(default_factory=SolverConfig)
    sweep: SweepSpec = None
    output_path: Optional[str] = None
    output_format: Optional[str] = None

    def __post_init__(self):
        if self.sweep is None:
            self.sweep = SweepSpec(tuple(dbm_to_watt(v) for v in DEFAULT_PPG_DBM),
                                   (self.params.p_max,))


def parse_config(text: str) -> RunConfig:
    """Parse configuration text.

    Raises
    ------
    ConfigError
        For unknown keys, unparsable values and violated constraints; the
        error names the offending key.
    """
    sections = {"system": {}, "solver": {}, "sweep": {}, "output": {}}
    origin = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _KEYS:
            raise ConfigError(key, "unknown key")
        section, name, parse, check, why = _KEYS[key]
        try:
            parsed = parse(value)
        except ValueError as exc:
            raise ConfigError(key, f"cannot parse {value!r} ({exc})") from None
        if check is not None and not check(parsed):
            raise ConfigError(key, f"{why}, got {value}")
        if name in sections[section]:
            raise ConfigError(key, f"duplicates {origin[(section, name)]}")
        sections[section][name] = parsed
        origin[(section, name)] = key

    def build(section, factory, **extra):
        try:
            return factory(**sections[section], **extra)
        except DomainError as exc:
            msg = str(exc)
            blamed = next((k for (sec, name), k in origin.items()
                           if sec == section and name in msg), section)
            raise ConfigError(blamed, msg) from None

    params = build("system", SystemParams)
    solver = build("solver", SolverConfig)
    sw = dict(sections["sweep"])
    ppg = sw.pop("p_pg_dbm", DEFAULT_PPG_DBM)
    pmax = sw.pop("p_max_dbm", (watt_to_dbm(params.p_max),))
    sections["sweep"] = sw
    sweep = build("sweep", SweepSpec,
                  p_pg_values=tuple(dbm_to_watt(v) for v in ppg),
                  p_max_values=tuple(dbm_to_watt(v) for v in pmax))
    return RunConfig(params, solver, sweep, **sections["output"])


def load_config(path: Optional[str]) -> RunConfig:
    if path is None:
        return parse_config("")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
