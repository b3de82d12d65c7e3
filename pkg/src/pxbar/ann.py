"""Neural-network layers mapped onto differential crossbar pairs.

A signed weight matrix W (R x C) is stored on two arrays: positive weights
raise the conductance of the ``pos`` cell above ``g_a``, negative weights raise
the ``neg`` cell, and the other cell of the pair stays at ``g_a``. Inputs are
applied in two read phases (positive and negative lobe) so every row voltage
stays nonnegative, and the four partial currents are combined as

    y = (I_pos(v+) - I_pos(v-) - I_neg(v+) + I_neg(v-)) / (s_w * v_scale)

which recovers ``W.T @ x`` exactly in ideal mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.special import expit

from .crossbar import CrossbarArray, conductance_matrix, program_array, vmm
from .device import DeviceParams
from .energy import Trace
from .errors import DegenerateWeightsWarning, DimensionError, SaturationWarning, SchemaError

Activation = Literal["none", "relu", "sigmoid", "tanh"]
ACTIVATIONS = ("none", "relu", "sigmoid", "tanh")


def activation_apply(kind: Activation, z):
    if kind == "none":
        return z
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "sigmoid":
        return expit(z)
    if kind == "tanh":
        return np.tanh(z)
    raise ValueError(f"unknown activation {kind!r}")


def weights_to_conductances(
    w: np.ndarray, params: DeviceParams, fallback_scale: float | None = None
) -> tuple[np.ndarray, np.ndarray, float]:
    """Differential conductance targets ``(G_pos, G_neg, s_w)`` for weights ``w``.

    ``s_w = (g_c - g_a) / max|w|`` maps the largest weight magnitude to full
    scale. An all-zero ``w`` warns and uses ``fallback_scale`` (default
    ``g_c - g_a``).
    """
    w = np.asarray(w, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    w_max = np.max(np.abs(w)) if w.size else 0.0
    if w_max == 0:
        warnings.warn("all weights are zero; using fallback conductance scale", DegenerateWeightsWarning)
        s_w = fallback_scale if fallback_scale is not None else params.g_c - params.g_a
    else:
        s_w = (params.g_c - params.g_a) / w_max
    g_pos = np.where(w > 0, params.g_a + s_w * w, params.g_a)
    g_neg = np.where(w < 0, params.g_a + s_w * np.abs(w), params.g_a)
    # full-scale entries land exactly on g_c
    g_pos = np.where(w == w_max, params.g_c, g_pos) if w_max else g_pos
    g_neg = np.where(-w == w_max, params.g_c, g_neg) if w_max else g_neg
    return g_pos, g_neg, float(s_w)


def conductances_to_weights(g_pos, g_neg, s_w: float) -> np.ndarray:
    if not (s_w > 0):
        raise ValueError("s_w must be > 0")
    return (np.asarray(g_pos, dtype=float) - np.asarray(g_neg, dtype=float)) / s_w


@dataclass
class LayerMapping:
    weights: np.ndarray
    scale: float
    pos_array: CrossbarArray
    neg_array: CrossbarArray
    activation: Activation = "none"

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        if self.pos_array.shape != self.weights.shape or self.neg_array.shape != self.weights.shape:
            raise DimensionError("pos/neg arrays must match the weight matrix shape")
        if not (self.scale > 0):
            raise ValueError("scale must be > 0")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.weights.shape

    def read_back_weights(self) -> np.ndarray:
        return conductances_to_weights(
            conductance_matrix(self.pos_array), conductance_matrix(self.neg_array), self.scale
        )


def map_layer(
    weights: np.ndarray,
    make_array: Callable[[int, int], CrossbarArray],
    activation: Activation = "none",
    program_tol: float | None = None,
    max_pulses: int = 64,
    trace: Trace | None = None,
) -> LayerMapping:
    """Create the array pair for one layer and store the weights on it.

    With ``program_tol=None`` cell states are written directly to the exact
    targets; otherwise every cell goes through program-and-verify at that
    tolerance (pulses are recorded in ``trace``).
    """
    weights = np.asarray(weights, dtype=float)
    rows, cols = weights.shape
    pos, neg = make_array(rows, cols), make_array(rows, cols)
    g_pos, g_neg, s_w = weights_to_conductances(weights, pos.device_params)
    for arr, target in ((pos, g_pos), (neg, g_neg)):
        if program_tol is None:
            arr.write_conductances(target)
        else:
            program_array(arr, target, program_tol, max_pulses, trace=trace)
    return LayerMapping(weights, s_w, pos, neg, activation)


def _encode(x: np.ndarray, v_read: float, v_scale: float | None) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample volts-per-unit scale and the encoded (possibly clipped) inputs."""
    if v_scale is None:
        peak = np.max(np.abs(x), axis=1)
        scale = np.where(peak > 0, v_read / np.where(peak > 0, peak, 1.0), 1.0)
        return scale, x * scale[:, None]
    scale = np.full(x.shape[0], float(v_scale))
    v = x * v_scale
    if np.any(np.abs(v) > v_read):
        warnings.warn(f"encoded input exceeds v_read={v_read} V; clipping", SaturationWarning)
        v = np.clip(v, -v_read, v_read)
    return scale, v


def layer_forward(
    layer: LayerMapping,
    x: np.ndarray,
    mode: str = "ideal",
    v_read: float = 0.2,
    v_scale: float | None = None,
    trace: Trace | None = None,
) -> np.ndarray:
    """Pre-activation crossbar output for a batch ``x`` of shape (N, R)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != layer.shape[0]:
        raise DimensionError(f"layer expects {layer.shape[0]} inputs, got {x.shape[1]}")
    scale, v = _encode(x, v_read, v_scale)
    v_plus = np.maximum(v, 0.0).T
    v_minus = np.maximum(-v, 0.0).T
    i_pos = vmm(layer.pos_array, v_plus, mode, trace) - vmm(layer.pos_array, v_minus, mode, trace)
    i_neg = vmm(layer.neg_array, v_plus, mode, trace) - vmm(layer.neg_array, v_minus, mode, trace)
    return ((i_pos - i_neg) / (layer.scale * scale[None, :])).T


def forward(
    mappings: Sequence[LayerMapping],
    x,
    mode: str = "ideal",
    v_read: float = 0.2,
    v_scale: float | None = None,
    trace: Trace | None = None,
) -> np.ndarray:
    """Run ``x`` (one vector or an (N, R) batch) through the mapped layers.

    ``v_scale=None`` scales each sample so its largest magnitude maps to
    ``v_read``; a fixed ``v_scale`` (V per input unit) clips with a
    SaturationWarning when ``|v| > v_read``.
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    h = np.atleast_2d(x)
    for layer in mappings:
        h = activation_apply(layer.activation, layer_forward(layer, h, mode, v_read, v_scale, trace))
    return h[0] if single else h


def float_forward(weights: Sequence[np.ndarray], activations: Sequence[str], x) -> np.ndarray:
    """Reference floating-point forward pass, ``act(W.T @ h)`` per layer."""
    h = np.asarray(x, dtype=float)
    for w, act in zip(weights, activations):
        h = activation_apply(act, h @ np.asarray(w, dtype=float))
    return h


# ------------------------------------------------------------------ fixtures


def write_weights_csv(path: str | Path, w: np.ndarray, activation: str) -> None:
    w = np.atleast_2d(np.asarray(w, dtype=float))
    lines = ["# rows,cols,activation", f"# {w.shape[0]},{w.shape[1]},{activation}"]
    lines += [",".join(f"{v:.12g}" for v in row) for row in w]
    Path(path).write_text("\n".join(lines) + "\n")


def read_weights_csv(path: str | Path) -> tuple[np.ndarray, str]:
    """Parse a weights fixture; raises SchemaError with line context."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read weights file ({exc})") from exc
    dims = None
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("#"):
            fields = [f.strip() for f in s.lstrip("#").split(",")]
            if len(fields) == 3 and fields[0].isdigit() and fields[1].isdigit():
                if fields[2] not in ACTIVATIONS:
                    raise SchemaError(f"{path}:{lineno}: unknown activation {fields[2]!r}")
                dims = (int(fields[0]), int(fields[1]), fields[2])
            continue
        try:
            rows.append([float(f) for f in s.split(",")])
        except ValueError as exc:
            raise SchemaError(f"{path}:{lineno}: non-numeric weight ({exc})") from exc
        if dims and len(rows[-1]) != dims[1]:
            raise SchemaError(f"{path}:{lineno}: expected {dims[1]} columns, got {len(rows[-1])}")
    if dims is None:
        raise SchemaError(f"{path}: missing '# rows,cols,activation' header")
    if len(rows) != dims[0]:
        raise SchemaError(f"{path}: header says {dims[0]} rows, found {len(rows)}")
    return np.array(rows, dtype=float).reshape(dims[0], dims[1]), dims[2]
