"""Desk-scale simulator of dual-mode (electrical/optical) plasmonic memristive crossbars."""

from .crossbar import (
    CrossbarArray,
    LayerStack,
    conductance_matrix,
    electro_optic_snapshot,
    optical_read_row,
    program_array,
    program_cell,
    stack_layers,
    vmm_ideal,
    vmm_nonideal,
)
from .device import CellState, DeviceParams, Pulse, apply_pulse, conductance, resistance_class
from .energy import EnergyReport, Trace, energy_report
from .materials import MaterialRecord, load_material, lookup_nk, mixed_index
from .optics import WaveguideCellGeometry, cell_transmission, imbalance, loss_coefficient, propagation_length

__version__ = "0.1.0"

__all__ = [
    "CellState",
    "CrossbarArray",
    "DeviceParams",
    "EnergyReport",
    "LayerStack",
    "MaterialRecord",
    "Pulse",
    "Trace",
    "WaveguideCellGeometry",
    "apply_pulse",
    "cell_transmission",
    "conductance",
    "conductance_matrix",
    "electro_optic_snapshot",
    "energy_report",
    "imbalance",
    "load_material",
    "lookup_nk",
    "loss_coefficient",
    "mixed_index",
    "optical_read_row",
    "program_array",
    "program_cell",
    "propagation_length",
    "resistance_class",
    "stack_layers",
    "vmm_ideal",
    "vmm_nonideal",
]
