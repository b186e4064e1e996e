"""Hot numerical kernels, each in two flavours.

* ``*_numba``: explicit loops compiled with ``numba.njit`` (``None`` when numba
  is not importable).
* ``*_numpy``: vectorised numpy twins with the same floating point recipe.

The public names ``euler_block`` and ``bisect_f`` dispatch to the numba
version unless ``HESTONLAW_DISABLE_NUMBA=1`` is set; ``direct_convolve``
always uses numpy, which measured faster.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import NUMBA_ENABLED, njit_or_none

# ---------------------------------------------------------------------------
# F(u) sign function (scaled so it never overflows)
# ---------------------------------------------------------------------------

LARGE_W = 400.0  # w = p t^2/4 above which exp(-sqrt w) scaling kicks in


def _f_scaled_py(u, a, c, rho, t):
    A = a - c * rho * u
    p = A * A + c * c * (u - u * u)
    w = 0.25 * p * t * t
    if w > LARGE_W:
        s = math.sqrt(w)
        r = A * t / (2.0 * s)
        return 0.5 * (1.0 + r) + 0.5 * math.exp(-2.0 * s) * (1.0 - r)
    if w > 1.0:
        s = math.sqrt(w)
        return math.cosh(s) + 0.5 * A * t * math.sinh(s) / s
    if w < -1.0:
        s = math.sqrt(-w)
        return math.cos(s) + 0.5 * A * t * math.sin(s) / s
    l1 = 1.0
    l2 = 1.0
    t1 = 1.0
    t2 = 1.0
    for n in range(1, 30):
        t1 *= w / ((2 * n - 1) * (2 * n))
        t2 *= w / ((2 * n) * (2 * n + 1))
        l1 += t1
        l2 += t2
        if abs(t1) < 1e-17 and abs(t2) < 1e-17:
            break
    return l1 + 0.5 * A * t * l2


_f_scaled_nb = njit_or_none(_f_scaled_py)


def f_scaled_numpy(u, a, c, rho, t):
    """Vectorised twin of the scalar scaled-F recipe (same sign as F)."""
    u = np.asarray(u, dtype=float)
    A = a - c * rho * u
    p = A * A + c * c * (u - u * u)
    w = 0.25 * p * t * t
    out = np.empty_like(w)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        big = w > LARGE_W
        s = np.sqrt(np.abs(w))
        r = A * t / (2.0 * s)
        out[big] = (0.5 * (1.0 + r) + 0.5 * np.exp(-2.0 * s) * (1.0 - r))[big]
        mid = (w > 1.0) & ~big
        out[mid] = (np.cosh(s) + 0.5 * A * t * np.sinh(s) / s)[mid]
        neg = w < -1.0
        out[neg] = (np.cos(s) + 0.5 * A * t * np.sin(s) / s)[neg]
    small = ~(big | mid | neg)
    if np.any(small):
        ws = w[small]
        l1 = np.ones_like(ws)
        l2 = np.ones_like(ws)
        t1 = np.ones_like(ws)
        t2 = np.ones_like(ws)
        for n in range(1, 30):
            t1 = t1 * ws / ((2 * n - 1) * (2 * n))
            t2 = t2 * ws / ((2 * n) * (2 * n + 1))
            l1 = l1 + t1
            l2 = l2 + t2
            if np.all(np.abs(t1) < 1e-17) and np.all(np.abs(t2) < 1e-17):
                break
        out[small] = l1 + 0.5 * A[small] * t * l2
    return out


# ---------------------------------------------------------------------------
# vectorised bisection for zeros of F on many brackets
# ---------------------------------------------------------------------------


def _bisect_f_py(lo, hi, a, c, rho, t, rel_tol, max_iter):
    n = lo.shape[0]
    out = np.empty(n)
    for i in range(n):
        x0 = lo[i]
        x1 = hi[i]
        f0 = _f_scaled_nb(x0, a, c, rho, t)
        if f0 == 0.0:
            out[i] = x0
            continue
        f1 = _f_scaled_nb(x1, a, c, rho, t)
        if f1 == 0.0:
            out[i] = x1
            continue
        for _ in range(max_iter):
            mid = 0.5 * (x0 + x1)
            fm = _f_scaled_nb(mid, a, c, rho, t)
            if fm == 0.0:
                x0 = mid
                x1 = mid
                break
            if (fm > 0.0) == (f0 > 0.0):
                x0 = mid
                f0 = fm
            else:
                x1 = mid
            if x1 - x0 < rel_tol * (1.0 + abs(mid)):
                break
        out[i] = 0.5 * (x0 + x1)
    return out


_bisect_f_nb = None
if _f_scaled_nb is not None:
    _bisect_f_nb = njit_or_none(_bisect_f_py)


def bisect_f_numba(lo, hi, a, c, rho, t, rel_tol=1e-12, max_iter=200):
    return _bisect_f_nb(np.ascontiguousarray(lo, dtype=float),
                        np.ascontiguousarray(hi, dtype=float),
                        float(a), float(c), float(rho), float(t),
                        float(rel_tol), int(max_iter))


def bisect_f_numpy(lo, hi, a, c, rho, t, rel_tol=1e-12, max_iter=200):
    x0 = np.array(lo, dtype=float)
    x1 = np.array(hi, dtype=float)
    f0 = f_scaled_numpy(x0, a, c, rho, t)
    f1 = f_scaled_numpy(x1, a, c, rho, t)
    exact_lo = f0 == 0.0
    exact_hi = (f1 == 0.0) & ~exact_lo
    x1[exact_lo] = x0[exact_lo]
    x0[exact_hi] = x1[exact_hi]
    active = ~(exact_lo | exact_hi)
    for _ in range(max_iter):
        if not np.any(active):
            break
        mid = 0.5 * (x0 + x1)
        fm = f_scaled_numpy(mid, a, c, rho, t)
        hit = active & (fm == 0.0)
        x0[hit] = mid[hit]
        x1[hit] = mid[hit]
        same = (fm > 0.0) == (f0 > 0.0)
        move_lo = active & ~hit & same
        move_hi = active & ~hit & ~same
        x0[move_lo] = mid[move_lo]
        f0[move_lo] = fm[move_lo]
        x1[move_hi] = mid[move_hi]
        active &= ~hit & ~(x1 - x0 < rel_tol * (1.0 + np.abs(mid)))
    return 0.5 * (x0 + x1)


# ---------------------------------------------------------------------------
# full-truncation Euler for (X, V) on one block of paths
# ---------------------------------------------------------------------------


def _euler_block_py(x0, v0, a, b, c, rho, dt, normals):
    nsteps = normals.shape[0]
    npaths = normals.shape[2]
    x = np.full(npaths, x0)
    v = np.full(npaths, v0)
    rho_c = math.sqrt(max(0.0, 1.0 - rho * rho))
    sdt = math.sqrt(dt)
    for k in range(nsteps):
        for j in range(npaths):
            w1 = normals[k, 0, j]
            w2 = normals[k, 1, j]
            vj = v[j]
            vp = vj if vj > 0.0 else 0.0
            sv = math.sqrt(vp) * sdt
            x[j] = x[j] - 0.5 * vp * dt + sv * (rho * w1 + rho_c * w2)
            v[j] = vj + a * (b - vp) * dt + c * sv * w1
    return x, v


_euler_block_nb = njit_or_none(_euler_block_py)


def euler_block_numba(x0, v0, a, b, c, rho, dt, normals):
    return _euler_block_nb(float(x0), float(v0), float(a), float(b), float(c),
                           float(rho), float(dt), np.ascontiguousarray(normals))


def euler_block_numpy(x0, v0, a, b, c, rho, dt, normals):
    nsteps, _, npaths = normals.shape
    x = np.full(npaths, float(x0))
    v = np.full(npaths, float(v0))
    rho_c = math.sqrt(max(0.0, 1.0 - rho * rho))
    sdt = math.sqrt(dt)
    for k in range(nsteps):
        w1 = normals[k, 0]
        w2 = normals[k, 1]
        vp = np.maximum(v, 0.0)
        sv = np.sqrt(vp) * sdt
        x = x - 0.5 * vp * dt + sv * (rho * w1 + rho_c * w2)
        v = v + a * (b - vp) * dt + c * sv * w1
    return x, v


# ---------------------------------------------------------------------------
# direct (O(n m)) linear convolution
# ---------------------------------------------------------------------------


def _direct_convolve_py(f, g):
    n = f.shape[0]
    m = g.shape[0]
    out = np.zeros(n + m - 1)
    for i in range(n):
        fi = f[i]
        if fi == 0.0:
            continue
        for j in range(m):
            out[i + j] += fi * g[j]
    return out


_direct_convolve_nb = njit_or_none(_direct_convolve_py)


def direct_convolve_numba(f, g):
    return _direct_convolve_nb(np.ascontiguousarray(f, dtype=float),
                               np.ascontiguousarray(g, dtype=float))


def direct_convolve_numpy(f, g):
    return np.convolve(np.asarray(f, dtype=float), np.asarray(g, dtype=float))


# np.convolve beats the compiled double loop (see benchmarks/), so the
# convolution dispatches to numpy under either backend
direct_convolve = direct_convolve_numpy
if NUMBA_ENABLED and _euler_block_nb is not None:
    euler_block = euler_block_numba
    bisect_f = bisect_f_numba
else:
    euler_block = euler_block_numpy
    bisect_f = bisect_f_numpy

BACKEND = "numba" if euler_block is euler_block_numba else "numpy"
