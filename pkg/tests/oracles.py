"""Independent reference computations used as test oracles.

These deliberately avoid the library code paths they check.
"""

import numpy as np


def dense_matvec(g, v):
    """Column currents by explicit double loop."""
    rows, cols = len(g), len(g[0])
    return np.array([sum(g[n][m] * v[n] for n in range(rows)) for m in range(cols)])


def mna_crossbar(g, v, r_row, r_col):
    """Brute-force modified nodal analysis of a crossbar (r_row, r_col > 0).

    Every node is explicit: one driver node per row (tied to its source by a
    voltage-source branch current), the R*C row-wire nodes, the R*C
    column-wire nodes and ground. The sensed current of column m is the
    current through the last column segment into ground.
    """
    g = np.asarray(g, dtype=float)
    rows, cols = g.shape
    names = [("drv", n) for n in range(rows)]
    names += [("r", n, m) for n in range(rows) for m in range(cols)]
    names += [("c", n, m) for n in range(rows) for m in range(cols)]
    idx = {name: i for i, name in enumerate(names)}
    n_nodes = len(names)
    size = n_nodes + rows  # + one branch current per voltage source
    a = np.zeros((size, size))
    b = np.zeros(size)

    def resistor(p, q, cond):
        i = idx[p]
        a[i, i] += cond
        if q == "gnd":
            return
        j = idx[q]
        a[j, j] += cond
        a[i, j] -= cond
        a[j, i] -= cond

    for n in range(rows):
        resistor(("drv", n), ("r", n, 0), 1 / r_row)
        for m in range(cols - 1):
            resistor(("r", n, m), ("r", n, m + 1), 1 / r_row)
        for m in range(cols):
            resistor(("r", n, m), ("c", n, m), g[n, m])
    for m in range(cols):
        for n in range(rows - 1):
            resistor(("c", n, m), ("c", n + 1, m), 1 / r_col)
        resistor(("c", rows - 1, m), "gnd", 1 / r_col)
    for n in range(rows):
        k = n_nodes + n
        i = idx[("drv", n)]
        a[i, k] += 1
        a[k, i] += 1
        b[k] = v[n]
    x = np.linalg.solve(a, b)
    return np.array([x[idx[("c", rows - 1, m)]] / r_col for m in range(cols)])
