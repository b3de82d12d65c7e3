"""Phenomenological LR-DLSPP waveguide cell.

The cell is balanced (minimum metal absorption) when the switching material is
fully amorphous. Crystallization shifts the index on one side of the metal
stripe by ``gamma * fill * (Re n(x) - Re n(0))``; the resulting imbalance adds
a quadratic metal-loss term, and any extra material extinction adds a bulk
absorption term.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from .errors import DomainError
from .materials import MaterialRecord, lookup_nk, mixed_index


@dataclass(frozen=True)
class WaveguideCellGeometry:
    length: float  # m
    wavelength: float  # nm
    gamma: float
    fill: float
    pcm_side: Literal["ridge", "buffer"] = "ridge"
    alpha_min: float = 100.0  # 1/m
    c2: float = 1.0e6  # 1/m per RIU^2
    n_mode0: float = 1.5

    def __post_init__(self):
        if not (self.length > 0):
            raise ValueError("length must be > 0")
        if not (self.wavelength > 0):
            raise ValueError("wavelength must be > 0")
        if not (0 < self.gamma <= 1):
            raise ValueError("gamma must be in (0, 1]")
        if not (0 < self.fill <= 1):
            raise ValueError("fill must be in (0, 1]")
        if self.pcm_side not in ("ridge", "buffer"):
            raise ValueError(f"pcm_side must be 'ridge' or 'buffer', got {self.pcm_side!r}")
        if self.alpha_min < 0 or self.c2 < 0:
            raise ValueError("alpha_min and c2 must be >= 0")
        if not (self.n_mode0 > 0):
            raise ValueError("n_mode0 must be > 0")

    @property
    def side_sign(self) -> int:
        return 1 if self.pcm_side == "ridge" else -1

    @property
    def wavelength_m(self) -> float:
        return self.wavelength * 1e-9

    @classmethod
    def from_config(cls, block: dict) -> "WaveguideCellGeometry":
        return cls(
            length=float(block["length_um"]) * 1e-6,
            wavelength=float(block["wavelength_nm"]),
            gamma=float(block["gamma"]),
            fill=float(block["fill"]),
            pcm_side=block.get("pcm_side", "ridge"),
            alpha_min=float(block["alpha_min_per_m"]),
            c2=float(block["c2_per_m_riu2"]),
            n_mode0=float(block["n_mode0"]),
        )


def _index_shift(geom: WaveguideCellGeometry, mat: MaterialRecord, x: float) -> complex:
    """Overlap-weighted change of the material index relative to the amorphous phase."""
    idx_a = lookup_nk(mat, "amorphous", geom.wavelength)
    idx_c = lookup_nk(mat, "crystalline", geom.wavelength)
    return geom.gamma * geom.fill * (mixed_index(x, idx_a, idx_c) - mixed_index(0.0, idx_a, idx_c))


def imbalance(geom: WaveguideCellGeometry, mat: MaterialRecord, x: float) -> float:
    """Signed effective-index imbalance across the metal stripe (RIU); zero at x=0."""
    return geom.side_sign * _index_shift(geom, mat, x).real


def metal_loss(geom: WaveguideCellGeometry, dn: float) -> float:
    """Metal absorption coefficient (1/m) for a given imbalance; even in ``dn``."""
    return geom.alpha_min + geom.c2 * dn * dn


def loss_coefficient(geom: WaveguideCellGeometry, mat: MaterialRecord, x: float) -> float:
    """Total power loss coefficient (1/m): metal term plus material absorption.

    Clamped below at ``alpha_min * 1e-3`` so synthetic materials whose
    extinction drops on crystallization cannot produce gain.
    """
    shift = _index_shift(geom, mat, x)
    dn = geom.side_sign * shift.real
    material = 4.0 * math.pi / geom.wavelength_m * shift.imag
    return max(metal_loss(geom, dn) + material, geom.alpha_min * 1e-3)


def propagation_length(alpha_prop: float) -> float:
    """1/e power decay length (m)."""
    if not (alpha_prop > 0):
        raise DomainError(f"loss coefficient must be > 0, got {alpha_prop}")
    return 1.0 / alpha_prop


def mode_index(geom: WaveguideCellGeometry, mat: MaterialRecord, x: float) -> float:
    return geom.n_mode0 + _index_shift(geom, mat, x).real


def cell_transmission(geom: WaveguideCellGeometry, mat: MaterialRecord, x: float) -> tuple[float, float]:
    """Power transmission and accumulated phase (rad, wrapped to [0, 2π)) of one cell."""
    alpha = loss_coefficient(geom, mat, x)
    transmission = math.exp(-alpha * geom.length)
    phase = 2.0 * math.pi / geom.wavelength_m * mode_index(geom, mat, x) * geom.length
    return transmission, math.fmod(phase, 2.0 * math.pi)
