"""MGF and characteristic function of the Heston log-spot X_t.

Everything is built on the quadratic

    p(u) = (a - rho c u)^2 + c^2 (u - u^2)

and the entire function

    F(u) = L1(w) + (a - c rho u) (t/2) L2(w),   w = p(u) t^2 / 4,

which is cosh(Pt/2) + (a - c rho u) sinh(Pt/2)/P with P = sqrt p on either
side of p = 0. The MGF is

    log M(u) = x0 u + xi ((a - c rho u) t/2 - log F(u)) - v0 (u - u^2) (t/2) L2(w) / F(u)

with xi = 2ab/c^2. For large w the exponential growth of F is factored out
before taking logs so nothing overflows.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import PoleError
from .kernels import LARGE_W
from .params import EvalContext, SeriesTolerance
from .special import L1, L2

POLE_TOL = 1e-13
_DEFAULT_TOL = SeriesTolerance()
_BIG_S = 20.0  # |sqrt w| above which the complex evaluation uses the scaled form


def p_coefficients(ctx: EvalContext):
    """Coefficients ``(A2, A1, A0)`` of ``p(u) = A2 u^2 + A1 u + A0``."""
    a, c, r = ctx.a, ctx.c, ctx.rho
    return c * c * (r * r - 1.0), c * c - 2.0 * a * c * r, a * a


def p_quadratic(ctx: EvalContext, u):
    """p(u) for real or complex ``u``; p(0) = a^2 exactly."""
    a, c, r = ctx.a, ctx.c, ctx.rho
    u = np.asarray(u)
    A = a - r * c * u
    out = A * A + c * c * (u - u * u)
    return out if out.ndim else out[()]


def p_prime(ctx: EvalContext, u):
    a, c, r = ctx.a, ctx.c, ctx.rho
    return -2.0 * r * c * (a - r * c * u) + c * c * (1.0 - 2.0 * u)


def _f_parts_raw(a, c, rho, t, u, tol):
    u = np.asarray(u, dtype=float)
    A = a - c * rho * u
    w = np.asarray((A * A + c * c * (u - u * u)) * (t * t / 4.0), dtype=float)
    scale = np.zeros_like(w)
    q = np.empty_like(w)
    ratio = np.empty_like(w)
    big = w > LARGE_W
    if np.any(big):
        s = np.sqrt(w[big])
        r = A[big] * t / (2.0 * s)
        e = np.exp(-2.0 * s)
        q[big] = 0.5 * (1.0 + r) + 0.5 * e * (1.0 - r)
        scale[big] = s
        ratio[big] = t / (4.0 * s) * (1.0 - e) / q[big]
    small = ~big
    if np.any(small):
        l2 = L2(w[small], tol)
        fs = L1(w[small], tol) + 0.5 * A[small] * t * l2
        q[small] = fs
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio[small] = 0.5 * t * l2 / fs
    return scale, q, ratio


def _f_parts(ctx: EvalContext, u):
    """Return ``(scale, q, ratio)`` with ``F = exp(scale) q`` and
    ``ratio = (t/2) L2(w) / F``, all finite for real ``u``."""
    return _f_parts_raw(ctx.a, ctx.c, ctx.rho, ctx.t, u, ctx.tol)


def log_mgf_formula(a, b, c, rho, x0, v0, t, u, tol=None):
    """The closed-form log M(u) without any domain check.

    Takes raw parameters (``c`` of either sign), so it can be used to test
    identities between parameter sets; meaningful only inside the domain.
    """
    tol = tol or _DEFAULT_TOL
    u = np.asarray(u, dtype=float)
    scale, q, ratio = _f_parts_raw(a, c, rho, t, u, tol)
    xi = 2.0 * a * b / (c * c)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = (x0 * u + xi * (0.5 * (a - c * rho * u) * t - (scale + np.log(q)))
               - v0 * (u - u * u) * ratio)
    return np.where(u == 0.0, 0.0, val)


def big_f(ctx: EvalContext, u):
    """F(u) for real ``u`` (may overflow to +-inf for huge positive p)."""
    scale, q, _ = _f_parts(ctx, u)
    with np.errstate(over="ignore"):
        out = np.exp(scale) * q
    return out if out.ndim else float(out)


def big_g(ctx: EvalContext, u):
    """G(u) = (1-u) (t/2) L2(w) / F(u); raises :class:`PoleError` at zeros of F."""
    u_arr = np.asarray(u, dtype=float)
    scale, q, ratio = _f_parts(ctx, u_arr)
    near = (scale == 0.0) & (np.abs(q) < POLE_TOL * (1.0 + np.abs(u_arr)))
    if np.any(near):
        bad = float(np.atleast_1d(u_arr)[np.atleast_1d(near)][0])
        raise PoleError(f"G has a pole at u={bad!r} (|F| below tolerance)", bad)
    out = (1.0 - u_arr) * ratio
    return out if out.ndim else float(out)


def _inside(ctx: EvalContext, u):
    from .domain import CaseLabel, abscissae

    rep = abscissae(ctx)
    inside = (u > rep.u_star_minus) & (u < rep.u_star_plus)
    if rep.case_label is CaseLabel.A_EQ_RHOC:
        # u = 1 is attained here: F(1) = 1 and E[S_t] = s0 stays finite
        inside = inside | (u == 1.0)
    return inside


def log_mgf(ctx: EvalContext, u):
    """log M(u); ``+inf`` outside the open interval of convergence."""
    u_arr = np.asarray(u, dtype=float)
    out = np.full(u_arr.shape, np.inf)
    inside = _inside(ctx, u_arr)
    if np.any(inside):
        val = log_mgf_formula(ctx.a, ctx.b, ctx.c, ctx.rho, ctx.x0, ctx.v0, ctx.t,
                              u_arr[inside], ctx.tol)
        out[inside] = np.where(np.isnan(val), np.inf, val)
    return out if out.ndim else float(out)


def mgf(ctx: EvalContext, u):
    """M(u) = E[exp(u X_t)]; ``inf`` marks explosion (outside or on the boundary)."""
    with np.errstate(over="ignore"):
        out = np.exp(log_mgf(ctx, u))
    return out if np.ndim(out) else float(out)


def _log_phi_new(ctx: EvalContext, u):
    t = ctx.t
    z = 1j * np.asarray(u, dtype=float)
    w = p_quadratic(ctx, z) * (t * t / 4.0)
    w = np.asarray(w, dtype=complex)
    xi_u = ctx.a - ctx.c * ctx.rho * z
    s = np.sqrt(w)
    logf = np.empty_like(w)
    ratio = np.empty_like(w)
    big = s.real > _BIG_S
    if np.any(big):
        sb = s[big]
        e = np.exp(-2.0 * sb)
        r = xi_u[big] * t / (2.0 * sb)
        q = 0.5 * (1.0 + r) + 0.5 * e * (1.0 - r)
        logf[big] = sb + np.log(q)
        ratio[big] = t / (4.0 * sb) * (1.0 - e) / q
    small = ~big
    if np.any(small):
        ws = w[small]
        l2 = L2(ws, ctx.tol)
        fz = L1(ws, ctx.tol) + 0.5 * xi_u[small] * t * l2
        logf[small] = s[small] + np.log(fz * np.exp(-s[small]))
        ratio[small] = 0.5 * t * l2 / fz
    out = (1j * ctx.x0 * z.imag + ctx.xi * (0.5 * xi_u * t - logf)
           - ctx.v0 * (z - z * z) * ratio)
    return np.where(z == 0, 0.0 + 0.0j, out)


def charfn_new(ctx: EvalContext, u):
    """phi(u) = Phi(iu) through the entire functions L1, L2 (default form)."""
    out = np.exp(_log_phi_new(ctx, u))
    return out if out.ndim else complex(out)


def charfn_albrecher(ctx: EvalContext, u):
    """phi(u) in the rotation-count-free form with g = (xi-d)/(xi+d)."""
    a, b, c, r, t = ctx.a, ctx.b, ctx.c, ctx.rho, ctx.t
    u = np.asarray(u, dtype=float)
    iu = 1j * u
    xi_u = a - c * r * iu
    d = np.sqrt(xi_u * xi_u + c * c * (iu + u * u))
    g = (xi_u - d) / (xi_u + d)
    e = np.exp(-d * t)
    log_phi = (iu * ctx.x0
               + (a * b / (c * c)) * ((xi_u - d) * t - 2.0 * np.log((1.0 - g * e) / (1.0 - g)))
               + (ctx.v0 / (c * c)) * (xi_u - d) * (1.0 - e) / (1.0 - g * e))
    out = np.exp(np.where(u == 0.0, 0.0 + 0.0j, log_phi))
    return out if out.ndim else complex(out)


def charfn(ctx: EvalContext, u, form: str = "new"):
    if form == "new":
        return charfn_new(ctx, u)
    if form == "albrecher":
        return charfn_albrecher(ctx, u)
    raise ValueError(f"unknown characteristic function form {form!r}")


def mean_log_spot(ctx: EvalContext) -> float:
    """E[X_t] in closed form (drift of the log and the CIR mean)."""
    a, b, t = ctx.a, ctx.b, ctx.t
    integral_v = b * t + (ctx.v0 - b) * (-math.expm1(-a * t)) / a
    return ctx.x0 - 0.5 * integral_v
