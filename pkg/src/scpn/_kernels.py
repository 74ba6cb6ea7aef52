"""Hot numerical loops for the simulation core.

The stepping kernels are written once as plain Python and compiled with
numba; the interpreted originals (``*_py``) stay importable so tests can pin
the compiled path to the reference path. Everything here works on primitive
floats and arrays so it stays trivially picklable and JIT-friendly.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

LN10 = math.log(10.0)


def harvest_series(
    alpha: float,
    beta: float,
    mean_motion_rad_s: float,
    u0_rad: float,
    ge_w: float,
    t_s: np.ndarray,
) -> np.ndarray:
    """Panel output of one satellite at each time in ``t_s``.

    ``alpha`` and ``beta`` project the orbit-plane basis onto the sun
    direction, so the incidence cosine is ``alpha*cos(u) + beta*sin(u)``;
    ``ge_w`` is irradiance times panel area times efficiency. Nadir-fixed
    panels have zero cosine on the whole night side, which subsumes the
    shadow-cylinder test.
    """
    u = u0_rad + mean_motion_rad_s * np.asarray(t_s, dtype=np.float64)
    dot = alpha * np.cos(u) + beta * np.sin(u)
    return ge_w * np.maximum(0.0, dot)


def step_grid(t0_s: float, duration_s: float, dt_s: float) -> tuple[np.ndarray, float]:
    """Left endpoints of fixed dt_s steps covering [t0, t0+duration].

    Returns the step-start times and the length of the trailing partial step
    (0.0 when the duration is an exact multiple of dt_s; sub-nanosecond
    leftovers are dropped as float crumbs).
    """
    n_full = int(math.floor(duration_s / dt_s + 1e-12))
    rem = duration_s - n_full * dt_s
    if rem < 1e-9:
        rem = 0.0
    n = n_full + (1 if rem > 0.0 else 0)
    return t0_s + dt_s * np.arange(n, dtype=np.float64), rem


def integrate_net_power_py(
    net_w: np.ndarray,
    dt_s: float,
    rem_s: float,
    capacity_j: float,
    d0: float,
    sigma: float,
) -> tuple[float, float, float, float]:
    """Step the battery through a net-power sequence, accruing aging cost.

    ``net_w[k]`` is consumed minus harvested power over step k; every step
    spans ``dt_s`` except the last, which spans ``rem_s`` when that is
    positive. Depth of discharge saturates at 0 (full) and 1 (empty). Cost
    accrues only on discharge steps, by the trapezoidal rule on the aging
    rate between consecutive depths.

    Returns (life_consumed, final_dod, max_dod, net_energy_j).
    """
    n = net_w.shape[0]
    n_full = n - 1 if rem_s > 0.0 else n
    c = sigma * LN10
    d = d0
    d_max = d0
    life = 0.0
    energy_j = 0.0
    for k in range(n):
        h = dt_s if k < n_full else rem_s
        w = net_w[k]
        energy_j += w * h
        d_new = d + (w / capacity_j) * h
        if d_new > 1.0:
            d_new = 1.0
        elif d_new < 0.0:
            d_new = 0.0
        if d_new > d:
            f_a = 10.0 ** (sigma * (d - 1.0)) * (1.0 + c * d)
            f_b = 10.0 ** (sigma * (d_new - 1.0)) * (1.0 + c * d_new)
            life += 0.5 * (f_a + f_b) * (d_new - d)
        if d_new > d_max:
            d_max = d_new
        d = d_new
    return life, d, d_max, energy_j


def clamped_walk_py(
    net_w: np.ndarray, dt_s: float, capacity_j: float, d0: float
) -> np.ndarray:
    """Depth-of-discharge trajectory on a fixed grid, saturating at 0 and 1.

    Returns ``len(net_w) + 1`` samples; entry 0 is the initial depth.
    """
    n = net_w.shape[0]
    out = np.empty(n + 1, dtype=np.float64)
    out[0] = d0
    d = d0
    for k in range(n):
        d += (net_w[k] / capacity_j) * dt_s
        if d > 1.0:
            d = 1.0
        elif d < 0.0:
            d = 0.0
        out[k + 1] = d
    return out


integrate_net_power = njit(cache=True)(integrate_net_power_py)
clamped_walk = njit(cache=True)(clamped_walk_py)
