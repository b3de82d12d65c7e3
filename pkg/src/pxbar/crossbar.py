"""R x C plasmonic memristive crossbar: electrical VMM, optical row readout,
closed-loop programming and multi-layer stacking metadata."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import nodal
from .device import (
    CellState,
    DeviceParams,
    Pulse,
    ResistanceClass,
    apply_pulse,
    conductance,
    conductance_from_s,
    resistance_class,
    state_for_conductance,
)
from .energy import Trace, energy_report
from .errors import (
    AngleOutOfRange,
    DimensionError,
    MaxPulsesExceeded,
    PxbarError,
    TargetOutOfRange,
)
from .materials import MaterialRecord
from .optics import WaveguideCellGeometry, cell_transmission


@dataclass
class CrossbarArray:
    rows: int
    cols: int
    device_params: DeviceParams
    geom: WaveguideCellGeometry
    material: MaterialRecord
    r_row: float = 0.0
    r_col: float = 0.0
    t_read: float = 10e-9
    cells: list[list[CellState]] = field(default=None)

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"array dimensions must be positive, got {self.rows}x{self.cols}")
        if self.r_row < 0 or self.r_col < 0:
            raise ValueError("wire resistances must be >= 0")
        if self.cells is None:
            fresh = CellState(self.device_params.technology)
            self.cells = [[fresh] * self.cols for _ in range(self.rows)]
        if len(self.cells) != self.rows or any(len(r) != self.cols for r in self.cells):
            raise DimensionError(f"cell grid does not match {self.rows}x{self.cols}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def states(self) -> np.ndarray:
        return np.array([[c.s for c in row] for row in self.cells], dtype=float)

    def write_states(self, s: np.ndarray) -> None:
        """Overwrite state variables directly (fixture loading; bypasses pulses)."""
        s = np.asarray(s, dtype=float)
        if s.shape != self.shape:
            raise DimensionError(f"state matrix shape {s.shape} != {self.shape}")
        tech = self.device_params.technology
        self.cells = [[CellState(tech, float(s[n, m])) for m in range(self.cols)] for n in range(self.rows)]

    def write_conductances(self, g: np.ndarray) -> None:
        """Set every cell to the state whose drift-free read-back equals ``g``."""
        g = np.asarray(g, dtype=float)
        if g.shape != self.shape:
            raise DimensionError(f"conductance matrix shape {g.shape} != {self.shape}")
        p = self.device_params
        self.write_states(np.vectorize(lambda x: state_for_conductance(x, p))(g))

    def copy(self) -> "CrossbarArray":
        return CrossbarArray(
            self.rows, self.cols, self.device_params, self.geom, self.material,
            self.r_row, self.r_col, self.t_read, [list(r) for r in self.cells],
        )


def conductance_matrix(array: CrossbarArray) -> np.ndarray:
    return conductance_from_s(array.states(), array.device_params)


def _check_drive(array: CrossbarArray, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim not in (1, 2) or v.shape[0] != array.rows:
        raise DimensionError(f"expected {array.rows} row voltages, got shape {v.shape}")
    return v


def _record_reads(trace, v, g, t_read):
    if trace is None:
        return
    if v.ndim == 1:
        trace.record_read(v, g, t_read)
    else:
        for k in range(v.shape[1]):
            trace.record_read(v[:, k], g, t_read)


def vmm_ideal(array: CrossbarArray, v, trace: Trace | None = None) -> np.ndarray:
    """Column currents ``I_m = sum_n G_nm V_n`` with ideal wires.

    ``v`` may be (R,) or (R, K) for K drives; every drive is one read in ``trace``.
    """
    v = _check_drive(array, v)
    g = conductance_matrix(array)
    _record_reads(trace, v, g, array.t_read)
    return g.T @ v


def vmm_nonideal(array: CrossbarArray, v, trace: Trace | None = None) -> np.ndarray:
    """Column currents with row/column wire resistance, by nodal analysis."""
    v = _check_drive(array, v)
    g = conductance_matrix(array)
    _record_reads(trace, v, g, array.t_read)
    return nodal.column_currents(g, v, array.r_row, array.r_col)


def vmm(array: CrossbarArray, v, mode: str = "ideal", trace: Trace | None = None) -> np.ndarray:
    if mode == "ideal":
        return vmm_ideal(array, v, trace)
    if mode == "nonideal":
        return vmm_nonideal(array, v, trace)
    raise ValueError(f"mode must be 'ideal' or 'nonideal', got {mode!r}")


def optical_read_row(array: CrossbarArray, n: int, p_in: float) -> float:
    """Optical power leaving row ``n`` after crossing every cell on it."""
    if not (0 <= n < array.rows):
        raise IndexError(f"row {n} out of range for {array.rows} rows")
    if p_in < 0:
        raise ValueError("input power must be >= 0")
    total = 1.0
    for cell in array.cells[n]:
        total *= cell_transmission(array.geom, array.material, cell.s)[0]
    return p_in * total


# ---------------------------------------------------------------- programming


@dataclass
class ProgramLog:
    target: float
    pulses: list[Pulse] = field(default_factory=list)
    readbacks: list[float] = field(default_factory=list)  # G just before each pulse
    final_state: CellState | None = None
    final_conductance: float = math.nan
    success: bool = False

    @property
    def n_pulses(self) -> int:
        return len(self.pulses)


def _at_endpoint(target, params, tol):
    return abs(target - params.g_a) <= tol * target or abs(target - params.g_c) <= tol * target


def program_cell(
    array: CrossbarArray,
    n: int,
    m: int,
    target_g: float,
    tol: float = 0.01,
    max_pulses: int = 64,
    domain: str = "electrical",
    trace: Trace | None = None,
) -> ProgramLog:
    """Drive cell (n, m) to ``target_g`` with a program-and-verify loop.

    The controller only sees read-back conductance and its own pulse history.
    Set pulses start at ``tau_set/16`` and halve on every overshoot (floor
    ``tau_set/1024``). An overshoot is undone by a reset followed by a single
    set pulse replaying the total set duration that, since the last reset, was
    verified to still read below target.

    Raises:
        TargetOutOfRange: target outside [g_a, g_c], or intermediate target on
            a binary device.
        MaxPulsesExceeded: tolerance not met within ``max_pulses``; the
            partial log is attached as ``exc.log`` and the cell keeps its state.
    """
    p = array.device_params
    if not (tol > 0):
        raise ValueError("tol must be > 0")
    if not (p.g_a <= target_g <= p.g_c):
        raise TargetOutOfRange(f"target {target_g} S outside [{p.g_a}, {p.g_c}] S")
    if not p.analog and not _at_endpoint(target_g, p, tol):
        raise TargetOutOfRange(f"binary {p.technology} device can only reach g_a or g_c")

    log = ProgramLog(target=target_g)
    state = array.cells[n][m]
    step = p.tau_set / 16
    step_floor = p.tau_set / 1024
    verified_below = 0.0
    hi = target_g * (1 + tol)

    def fire(pulse):
        nonlocal state
        g_now = conductance(state, p)
        log.pulses.append(pulse)
        log.readbacks.append(g_now)
        if trace is not None:
            trace.record_program(pulse, g_now)
        state = apply_pulse(state, pulse, p)

    def set_pulse(duration):
        return Pulse(domain, "set", p.v_set, duration)

    try:
        while True:
            g = conductance(state, p)
            if abs(g - target_g) <= tol * target_g:
                log.success = True
                return log
            if log.n_pulses >= max_pulses:
                raise MaxPulsesExceeded(
                    f"cell ({n},{m}): {g:.6g} S after {max_pulses} pulses, target {target_g:.6g} S",
                    log,
                )
            if g < target_g:
                fire(set_pulse(step))
                g_after = conductance(state, p)
                if g_after < target_g:
                    verified_below += step
                elif g_after > hi:
                    step = max(step / 2, step_floor)
            else:
                fire(Pulse(domain, "reset", p.v_reset, p.tau_set))
                if verified_below > 0 and log.n_pulses < max_pulses:
                    fire(set_pulse(verified_below))
    finally:
        array.cells[n][m] = state
        log.final_state = state
        log.final_conductance = conductance(state, p)


@dataclass
class ProgramReport:
    success: np.ndarray
    pulses: np.ndarray
    total_pulses: int
    program_energy: float
    errors: dict[tuple[int, int], str]
    logs: dict[tuple[int, int], ProgramLog]


def program_array(
    array: CrossbarArray,
    target: np.ndarray,
    tol: float = 0.01,
    max_pulses: int = 64,
    domain: str = "electrical",
    trace: Trace | None = None,
) -> ProgramReport:
    """Program every cell towards ``target``; per-cell failures do not stop the batch."""
    target = np.asarray(target, dtype=float)
    if target.shape != array.shape:
        raise DimensionError(f"target shape {target.shape} != {array.shape}")
    local = Trace()
    success = np.zeros(array.shape, dtype=bool)
    pulses = np.zeros(array.shape, dtype=int)
    errors, logs = {}, {}
    for n in range(array.rows):
        for m in range(array.cols):
            try:
                log = program_cell(array, n, m, target[n, m], tol, max_pulses, domain, local)
            except MaxPulsesExceeded as exc:
                log = exc.log
                errors[(n, m)] = str(exc)
            except PxbarError as exc:
                errors[(n, m)] = str(exc)
                continue
            logs[(n, m)] = log
            success[n, m] = log.success
            pulses[n, m] = log.n_pulses
    if trace is not None:
        trace.extend(local)
    return ProgramReport(
        success=success,
        pulses=pulses,
        total_pulses=int(pulses.sum()),
        program_energy=energy_report(local).program_energy,
        errors=errors,
        logs=logs,
    )


# ------------------------------------------------------------------ snapshot


@dataclass(frozen=True)
class CellSnapshot:
    row: int
    col: int
    s: float
    conductance: float
    resistance_class: ResistanceClass
    transmission: float
    phase: float


SNAPSHOT_HEADER = ("row", "col", "s", "conductance_S", "class", "transmission", "phase_rad")


def electro_optic_snapshot(array: CrossbarArray) -> list[CellSnapshot]:
    """Electrical and optical view of every cell, computed from the same states."""
    p = array.device_params
    optical_cache: dict[float, tuple[float, float]] = {}
    out = []
    for n, row in enumerate(array.cells):
        for m, cell in enumerate(row):
            if cell.s not in optical_cache:
                optical_cache[cell.s] = cell_transmission(array.geom, array.material, cell.s)
            t, phi = optical_cache[cell.s]
            out.append(CellSnapshot(n, m, cell.s, conductance(cell, p), resistance_class(cell, p), t, phi))
    return out


# ------------------------------------------------------------------ stacking


@dataclass
class LayerStack:
    layers: list[CrossbarArray]
    angles: list[float]  # crossing angle (deg) between layer k and k+1
    crossings: list[int]  # inter-layer stripe crossings between layer k and k+1

    def __len__(self):
        return len(self.layers)


def _segments_cross(p1, p2, q1, q2) -> bool:
    d1 = p2 - p1
    d2 = q2 - q1
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < 1e-12:
        return False
    w = q1 - p1
    t = (w[0] * d2[1] - w[1] * d2[0]) / denom
    u = (w[0] * d1[1] - w[1] * d1[0]) / denom
    return 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0


def crossing_count(lower: CrossbarArray, upper: CrossbarArray, angle_deg: float) -> int:
    """Number of lower-layer column stripes crossed by upper-layer row stripes.

    Both footprints are centred on a common origin with unit stripe pitch; the
    upper row stripes make ``angle_deg`` with the lower column stripes.
    """
    if not (0.0 < angle_deg < 180.0):
        raise AngleOutOfRange(f"crossing angle must be in (0, 180) degrees, got {angle_deg}")
    half_len = lower.rows / 2
    cols = [
        (np.array([i - (lower.cols - 1) / 2, -half_len]), np.array([i - (lower.cols - 1) / 2, half_len]))
        for i in range(lower.cols)
    ]
    phi = math.radians(90.0 - angle_deg)
    rot = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    half_row = upper.cols / 2
    rows = []
    for j in range(upper.rows):
        y = j - (upper.rows - 1) / 2
        rows.append((rot @ np.array([-half_row, y]), rot @ np.array([half_row, y])))
    return sum(_segments_cross(a, b, c, d) for a, b in cols for c, d in rows)


def stack_layers(arrays: list[CrossbarArray], angles: list[float]) -> LayerStack:
    """Stack arrays bottom-up; ``angles`` holds one angle per adjacent pair."""
    arrays = list(arrays)
    angles = [float(a) for a in angles]
    if not arrays:
        raise ValueError("a stack needs at least one layer")
    if len(angles) != len(arrays) - 1:
        raise ValueError(f"{len(arrays)} layers need {len(arrays) - 1} angles, got {len(angles)}")
    for a in angles:
        if not (0.0 < a < 180.0):
            raise AngleOutOfRange(f"crossing angle must be in (0, 180) degrees, got {a}")
    crossings = [crossing_count(arrays[k], arrays[k + 1], angles[k]) for k in range(len(angles))]
    return LayerStack(arrays, angles, crossings)
