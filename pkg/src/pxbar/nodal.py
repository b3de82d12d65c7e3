"""Nodal analysis of a passive crossbar with wire resistance.

Rows are driven from the left (column index 0 side) through ``r_row`` per
segment; columns are sensed at a virtual ground below the last row through
``r_col`` per segment. Each junction is a conductance between its row node and
its column node. A zero wire resistance merges the nodes of that wire with its
terminal (driver voltage or ground), so those nodes drop out of the system.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DimensionError, SingularNetwork


def column_currents(g: np.ndarray, v: np.ndarray, r_row: float, r_col: float) -> np.ndarray:
    """Sensed column currents for row drive ``v``.

    Args:
        g: (R, C) junction conductances in siemens.
        v: (R,) row voltages, or (R, K) for K independent drives.
        r_row, r_col: wire resistance per segment in ohms.

    Returns:
        (C,) or (C, K) currents flowing into the sense nodes.
    """
    g = np.asarray(g, dtype=float)
    v = np.asarray(v, dtype=float)
    if g.ndim != 2:
        raise DimensionError(f"conductance matrix must be 2-D, got shape {g.shape}")
    rows, cols = g.shape
    single = v.ndim == 1
    vv = v[:, None] if single else v
    if vv.ndim != 2 or vv.shape[0] != rows:
        raise DimensionError(f"expected {rows} row voltages, got shape {v.shape}")
    if r_row < 0 or r_col < 0:
        raise ValueError("wire resistances must be >= 0")

    if r_row == 0 and r_col == 0:
        out = g.T @ vv
        return out[:, 0] if single else out

    with np.errstate(over="ignore", divide="ignore"):
        wire = [1.0 / r for r in (r_row, r_col) if r > 0]
    if not all(np.isfinite(wire)):
        raise SingularNetwork("wire resistance too small to invert; use 0 for ideal wires")

    n_cells = rows * cols
    n_row = n_cells if r_row > 0 else 0
    n_col = n_cells if r_col > 0 else 0
    size = n_row + n_col
    k = vv.shape[1]

    ii, jj, vals = [], [], []
    rhs = np.zeros((size, k))

    def stamp(a, b, cond):
        # a, b: unknown index, or ("v", row) for a driver, or None for ground
        a_unknown = isinstance(a, int)
        b_unknown = isinstance(b, int)
        if a_unknown:
            ii.append(a), jj.append(a), vals.append(cond)
        if b_unknown:
            ii.append(b), jj.append(b), vals.append(cond)
        if a_unknown and b_unknown:
            ii.extend((a, b)), jj.extend((b, a)), vals.extend((-cond, -cond))
        elif a_unknown and b is not None:
            rhs[a] += cond * vv[b[1]]
        elif b_unknown and a is not None:
            rhs[b] += cond * vv[a[1]]

    def row_node(n, m):
        return n * cols + m if r_row > 0 else ("v", n)

    def col_node(n, m):
        return n_row + n * cols + m if r_col > 0 else None

    if r_row > 0:
        g_row = 1.0 / r_row
        for n in range(rows):
            stamp(("v", n), row_node(n, 0), g_row)
            for m in range(cols - 1):
                stamp(row_node(n, m), row_node(n, m + 1), g_row)
    if r_col > 0:
        g_col = 1.0 / r_col
        for m in range(cols):
            for n in range(rows - 1):
                stamp(col_node(n, m), col_node(n + 1, m), g_col)
            stamp(col_node(rows - 1, m), None, g_col)
    for n in range(rows):
        for m in range(cols):
            if g[n, m] != 0:
                stamp(row_node(n, m), col_node(n, m), g[n, m])

    a = sp.csc_matrix((vals, (ii, jj)), shape=(size, size))
    try:
        with np.errstate(all="raise"):
            x = spla.splu(a).solve(rhs)
    except (RuntimeError, FloatingPointError) as exc:
        raise SingularNetwork(f"crossbar network has no unique solution ({exc})") from exc
    if not np.all(np.isfinite(x)):
        raise SingularNetwork("crossbar network solve produced non-finite voltages")

    if r_col > 0:
        v_sense_side = x[n_row + (rows - 1) * cols : n_row + rows * cols]
        out = g_col * v_sense_side
    else:
        v_rows = x[:n_row].reshape(rows, cols, k)
        out = np.einsum("nm,nmk->mk", g, v_rows)
    return out[:, 0] if single else out
