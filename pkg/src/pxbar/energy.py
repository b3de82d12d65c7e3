"""Event trace of array reads and programming pulses, and the energy/MAC report."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .device import Pulse


@dataclass(frozen=True)
class ReadEvent:
    """One physical read of an array: row voltages applied for ``t_read`` seconds."""

    voltages: np.ndarray
    conductances: np.ndarray
    t_read: float

    @property
    def macs(self) -> int:
        rows, cols = self.conductances.shape
        return rows * cols

    @property
    def energy(self) -> float:
        return float(self.t_read * np.sum((self.voltages**2)[:, None] * self.conductances))

    @property
    def duration(self) -> float:
        return self.t_read


@dataclass(frozen=True)
class ProgramEvent:
    """One programming pulse and the read-back conductance just before it."""

    pulse: Pulse
    g_at_pulse: float

    macs = 0

    @property
    def energy(self) -> float:
        p = self.pulse
        if p.domain == "optical":
            return p.amplitude * p.duration
        return p.amplitude**2 * self.g_at_pulse * p.duration

    @property
    def duration(self) -> float:
        return self.pulse.duration


@dataclass
class Trace:
    reads: list[ReadEvent] = field(default_factory=list)
    programs: list[ProgramEvent] = field(default_factory=list)

    def record_read(self, voltages, conductances, t_read: float) -> None:
        self.reads.append(ReadEvent(np.asarray(voltages, dtype=float), conductances, float(t_read)))

    def record_program(self, pulse: Pulse, g_at_pulse: float) -> None:
        self.programs.append(ProgramEvent(pulse, float(g_at_pulse)))

    def extend(self, other: "Trace") -> None:
        self.reads.extend(other.reads)
        self.programs.extend(other.programs)

    def __add__(self, other: "Trace") -> "Trace":
        return Trace(self.reads + other.reads, self.programs + other.programs)

    def summary_rows(self) -> list[tuple[str, int, float, float]]:
        """Per-event ``(kind, macs, energy_J, duration_s)`` rows, reads first."""
        rows = [("read", e.macs, e.energy, e.duration) for e in self.reads]
        rows += [("program", 0, e.energy, e.duration) for e in self.programs]
        return rows


@dataclass(frozen=True)
class EnergyReport:
    mac_count: int = 0
    read_energy: float = 0.0
    program_energy: float = 0.0
    wall_model_time: float = 0.0

    @property
    def total_energy(self) -> float:
        return self.read_energy + self.program_energy

    @property
    def macs_per_second_per_watt(self) -> float:
        """MAC/s/W, i.e. MACs per joule. ``inf`` if MACs ran at zero energy."""
        if self.mac_count == 0:
            return 0.0
        if self.total_energy == 0:
            return math.inf
        return self.mac_count / self.total_energy

    def __add__(self, other: "EnergyReport") -> "EnergyReport":
        return EnergyReport(
            self.mac_count + other.mac_count,
            self.read_energy + other.read_energy,
            self.program_energy + other.program_energy,
            self.wall_model_time + other.wall_model_time,
        )

    def as_dict(self) -> dict[str, float]:
        return {
            "mac_count": self.mac_count,
            "read_energy_J": self.read_energy,
            "program_energy_J": self.program_energy,
            "total_energy_J": self.total_energy,
            "wall_model_time_s": self.wall_model_time,
            "macs_per_second_per_watt": self.macs_per_second_per_watt,
        }

    def to_text(self) -> str:
        lines = ["energy report"]
        for key, value in self.as_dict().items():
            lines.append(f"  {key:<26} {value:.12g}" if key != "mac_count" else f"  {key:<26} {value}")
        return "\n".join(lines)


def energy_report(trace: Trace) -> EnergyReport:
    return EnergyReport(
        mac_count=sum(e.macs for e in trace.reads),
        read_energy=math.fsum(e.energy for e in trace.reads),
        program_energy=math.fsum(e.energy for e in trace.programs),
        wall_model_time=math.fsum(e.duration for e in trace.reads)
        + math.fsum(e.duration for e in trace.programs),
    )


def report_from_rows(rows) -> EnergyReport:
    """Rebuild a report from :meth:`Trace.summary_rows`-style rows."""
    rows = list(rows)
    return EnergyReport(
        mac_count=sum(int(r[1]) for r in rows if r[0] == "read"),
        read_energy=math.fsum(float(r[2]) for r in rows if r[0] == "read"),
        program_energy=math.fsum(float(r[2]) for r in rows if r[0] == "program"),
        wall_model_time=math.fsum(float(r[3]) for r in rows),
    )
