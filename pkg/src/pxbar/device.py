"""Nonvolatile junction device: pulse-driven state machine and conductance readout.

The state variable ``s`` in [0, 1] is the crystalline fraction (PCM), filament
completion (CB-RRAM) or switched polarization fraction (FTJ). Set pulses above
threshold accrete ``duration / tau_set`` of state (or jump to 1 for binary
devices); reset pulses above threshold return the cell to ``s = 0``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, replace
from enum import Enum
from importlib import resources
from typing import Literal

import numpy as np

from .errors import DomainError

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

TECHNOLOGIES = ("PCM", "RRAM_CB", "FTJ")


class ResistanceClass(str, Enum):
    HRS = "HRS"
    LRS = "LRS"
    INTERMEDIATE = "INTERMEDIATE"


@dataclass(frozen=True)
class Pulse:
    """One programming stimulus. Amplitude in V (electrical) or W (optical)."""

    domain: Literal["electrical", "optical"]
    polarity: Literal["set", "reset"]
    amplitude: float
    duration: float

    def __post_init__(self):
        if self.domain not in ("electrical", "optical"):
            raise ValueError(f"unknown pulse domain {self.domain!r}")
        if self.polarity not in ("set", "reset"):
            raise ValueError(f"unknown pulse polarity {self.polarity!r}")
        if not (self.amplitude >= 0):
            raise ValueError(f"pulse amplitude must be >= 0, got {self.amplitude}")
        if not (self.duration > 0):
            raise ValueError(f"pulse duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class DeviceParams:
    technology: str
    v_set: float
    v_reset: float
    tau_set: float
    g_a: float
    g_c: float
    analog: bool = True
    n_endurance: int = 10**15
    drift_nu: float = 0.0
    hrs_max: float = 0.05
    lrs_min: float = 0.95

    def __post_init__(self):
        if self.technology not in TECHNOLOGIES:
            raise ValueError(f"technology must be one of {TECHNOLOGIES}, got {self.technology!r}")
        if not (self.g_c > self.g_a > 0):
            raise ValueError(f"need g_c > g_a > 0, got g_a={self.g_a}, g_c={self.g_c}")
        if not (self.tau_set > 0):
            raise ValueError("tau_set must be > 0")
        if self.v_set < 0 or self.v_reset < 0:
            raise ValueError("thresholds must be >= 0")
        if self.n_endurance < 1:
            raise ValueError("n_endurance must be >= 1")
        if self.drift_nu < 0:
            raise ValueError("drift_nu must be >= 0")
        if not (0 <= self.hrs_max < self.lrs_min <= 1):
            raise ValueError("need 0 <= hrs_max < lrs_min <= 1")

    @property
    def on_off_ratio(self) -> float:
        return self.g_c / self.g_a

    @classmethod
    def from_config(cls, block: dict) -> "DeviceParams":
        """Build params from a config block, filling gaps from the technology preset."""
        tech = block.get("technology", "PCM")
        presets = technology_presets()
        if tech not in presets:
            raise ValueError(f"technology must be one of {TECHNOLOGIES}, got {tech!r}")
        merged = {**presets[tech], **block}
        return cls(
            technology=tech,
            v_set=float(merged["v_set"]),
            v_reset=float(merged["v_reset"]),
            tau_set=float(merged["tau_set_s"]),
            g_a=float(merged["g_a_S"]),
            g_c=float(merged["g_c_S"]),
            analog=bool(merged["analog"]),
            n_endurance=int(merged["n_endurance"]),
            drift_nu=float(merged["drift_nu"]),
            hrs_max=float(merged.get("hrs_max", 0.05)),
            lrs_min=float(merged.get("lrs_min", 0.95)),
        )


@functools.lru_cache(maxsize=None)
def _load_presets() -> dict[str, dict]:
    text = (resources.files("pxbar") / "data" / "technologies.toml").read_text()
    return tomllib.loads(text)


def technology_presets() -> dict[str, dict]:
    """Default parameter blocks keyed by technology, from the bundled TOML."""
    return {k: dict(v) for k, v in _load_presets().items()}


def default_params(technology: str) -> DeviceParams:
    return DeviceParams.from_config({"technology": technology})


@dataclass(frozen=True)
class CellState:
    technology: str
    s: float = 0.0
    cycle_count: int = 0
    stuck: bool = False

    def __post_init__(self):
        if not (0.0 <= self.s <= 1.0):
            raise ValueError(f"state s must be in [0, 1], got {self.s}")
        if self.cycle_count < 0:
            raise ValueError("cycle_count must be >= 0")


def apply_pulse(state: CellState, pulse: Pulse, params: DeviceParams) -> CellState:
    """Return the state after ``pulse``; the input state is not modified."""
    if state.stuck:
        return state
    if pulse.polarity == "set":
        if pulse.amplitude < params.v_set:
            return state
        new_s = min(1.0, state.s + pulse.duration / params.tau_set) if params.analog else 1.0
    else:
        if pulse.amplitude < params.v_reset:
            return state
        new_s = 0.0
    if new_s == state.s:
        return state
    count = state.cycle_count + 1
    return replace(state, s=new_s, cycle_count=count, stuck=count >= params.n_endurance)


def conductance(state: CellState, params: DeviceParams, t_since_reset: float | None = None) -> float:
    """Cell conductance (S), geometric interpolation between the endpoints in ``s``.

    With ``drift_nu > 0`` and a time given, the partially amorphous part drifts
    as ``(t / 1 s) ** (-nu * (1 - s))``.
    """
    return conductance_from_s(state.s, params, t_since_reset)


def conductance_from_s(s, params: DeviceParams, t_since_reset: float | None = None):
    """Vectorized core of :func:`conductance`; ``s`` may be a float or an array."""
    s_arr = np.asarray(s, dtype=float)
    log_g = (1.0 - s_arr) * math.log(params.g_a) + s_arr * math.log(params.g_c)
    drifting = params.drift_nu > 0 and t_since_reset is not None
    if drifting:
        if t_since_reset <= 0:
            raise DomainError(f"t_since_reset must be > 0 with drift enabled, got {t_since_reset}")
        log_g = log_g - params.drift_nu * (1.0 - s_arr) * math.log(t_since_reset)
    # clip rounding excursions past the endpoints so G stays monotone in s,
    # then pin the endpoints so they read back bit-exact
    g = np.minimum(np.exp(log_g), params.g_c)
    if not drifting:
        g = np.maximum(g, params.g_a)
    g = np.where(s_arr == 1.0, params.g_c, g)
    if not drifting:
        g = np.where(s_arr == 0.0, params.g_a, g)
    return float(g) if g.ndim == 0 else g


def state_for_conductance(g: float, params: DeviceParams) -> float:
    """Inverse of the drift-free conductance law: the ``s`` that reads back ``g``."""
    if not (params.g_a <= g <= params.g_c):
        raise DomainError(f"conductance {g} outside [{params.g_a}, {params.g_c}]")
    if g == params.g_a:
        return 0.0
    if g == params.g_c:
        return 1.0
    s = math.log(g / params.g_a) / math.log(params.g_c / params.g_a)
    return min(1.0, max(0.0, s))


def resistance_class(state: CellState, params: DeviceParams) -> ResistanceClass:
    if state.s <= params.hrs_max:
        return ResistanceClass.HRS
    if state.s >= params.lrs_min:
        return ResistanceClass.LRS
    return ResistanceClass.INTERMEDIATE
