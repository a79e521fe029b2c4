"""Pure-Python heat-bath kernel, the reference for the compiled one.

Heights live in an (L-N) x N array, weakly decreasing along rows and down
columns, with values in 0..c.  The weight of a state is x**(-l5) where l5
counts strict descents down each column, so a site only interacts with its
vertical neighbours through the energy and with all four through the bounds.
"""
from __future__ import annotations

import numpy as np


def _resample(H: list[list[int]], r: int, j: int, u: float, ix: float, c: int) -> int:
    a, n = len(H), len(H[0])
    top, bot = r > 0, r < a - 1
    up = H[r - 1][j] if top else c
    down = H[r + 1][j] if bot else 0
    hi = min(up, H[r][j - 1]) if j > 0 else up
    lo = max(down, H[r][j + 1]) if j < n - 1 else down
    if lo == hi:
        return lo
    weights = []
    for h in range(lo, hi + 1):
        w = 1.0
        if top and h < up:
            w *= ix
        if bot and h > down:
            w *= ix
        weights.append(w)
    target = u * sum(weights)
    acc = 0.0
    for k, w in enumerate(weights):
        acc += w
        if target < acc:
            return lo + k
    return hi


def update_site(H: np.ndarray, r: int, j: int, u: float, x: float, c: int) -> int:
    rows = H.tolist()
    h = _resample(rows, r, j, u, 1.0 / x, c)
    H[r, j] = h
    return h


def sweep(H: np.ndarray, U: np.ndarray, x: float, c: int) -> None:
    rows = H.tolist()
    ix = 1.0 / x
    for r in range(len(rows)):
        for j in range(len(rows[0])):
            rows[r][j] = _resample(rows, r, j, float(U[r, j]), ix, c)
    H[...] = rows


def coupled_sweep(lower: np.ndarray, upper: np.ndarray, U: np.ndarray, x: float, c: int) -> bool:
    lo_rows, up_rows = lower.tolist(), upper.tolist()
    ix = 1.0 / x
    u_rows = U.tolist()
    for r in range(len(lo_rows)):
        for j in range(len(lo_rows[0])):
            u = u_rows[r][j]
            lo_rows[r][j] = _resample(lo_rows, r, j, u, ix, c)
            up_rows[r][j] = _resample(up_rows, r, j, u, ix, c)
    lower[...] = lo_rows
    upper[...] = up_rows
    return lo_rows == up_rows
