"""Special functions: the entire series L1/L2, Gamma and the modified Bessel
function of the first kind of real order.

L1(z) = sum z^n/(2n)!   (= cosh sqrt z for any branch of the root)
L2(z) = sum z^n/(2n+1)! (= sinh(sqrt z)/sqrt z)

Overflow saturates to ``inf`` instead of raising so that scans over the real
line can detect explosion regions.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import NUMBA_ENABLED, maybe_njit
from .errors import DomainError
from .params import SeriesTolerance

_DEFAULT_TOL = SeriesTolerance()

# ---------------------------------------------------------------------------
# L1 / L2
# ---------------------------------------------------------------------------


def _series(z, offset, tol):
    # sum z^n / (2n + offset)!, valid for |z| <= 1 where terms decay factorially
    term = np.ones_like(z)
    total = np.ones_like(z)
    for n in range(1, tol.max_terms):
        term = term * z / ((2 * n + offset - 1) * (2 * n + offset))
        total = total + term
        if np.all(np.abs(term) <= tol.eps * np.abs(total)):
            break
    return total


def _l_eval(x, which, tol):
    x = np.asarray(x)
    is_complex = np.iscomplexobj(x)
    z = x.astype(complex if is_complex else float)
    out = np.empty_like(z)
    small = np.abs(z) <= 1.0
    if np.any(small):
        out[small] = _series(z[small], 0 if which == 1 else 1, tol)
    big = ~small
    if np.any(big):
        zb = z[big]
        with np.errstate(over="ignore", invalid="ignore"):
            if is_complex:
                s = np.sqrt(zb)
                out[big] = np.cosh(s) if which == 1 else np.sinh(s) / s
            else:
                res = np.empty_like(zb)
                pos = zb > 0
                sp = np.sqrt(zb[pos])
                sn = np.sqrt(-zb[~pos])
                if which == 1:
                    res[pos] = np.cosh(sp)
                    res[~pos] = np.cos(sn)
                else:
                    res[pos] = np.sinh(sp) / sp
                    res[~pos] = np.sin(sn) / sn
                out[big] = res
    if is_complex:
        bad = ~np.isfinite(out)
        if np.any(bad):
            out[bad] = complex(np.inf, 0.0)
    else:
        out[np.isnan(out)] = np.inf
    return out if out.ndim else out[()]


def L1(x, tol: SeriesTolerance = _DEFAULT_TOL):
    """Entire function sum x^n/(2n)!; cosh(sqrt x) for x >= 0, cos(sqrt(-x)) for x <= 0."""
    return _l_eval(x, 1, tol)


def L2(x, tol: SeriesTolerance = _DEFAULT_TOL):
    """Entire function sum x^n/(2n+1)!; sinh(sqrt x)/sqrt x, sin(sqrt(-x))/sqrt(-x), L2(0)=1."""
    return _l_eval(x, 2, tol)


# ---------------------------------------------------------------------------
# Gamma (Lanczos, g = 7, 9 coefficients)
# ---------------------------------------------------------------------------

LANCZOS_G = 7.0
LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_C0, _C1, _C2, _C3, _C4, _C5, _C6, _C7, _C8 = LANCZOS_COEF
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@maybe_njit
def _lanczos_sum(z):
    # z is the shifted argument x - 1
    return (_C0 + _C1 / (z + 1.0) + _C2 / (z + 2.0) + _C3 / (z + 3.0)
            + _C4 / (z + 4.0) + _C5 / (z + 5.0) + _C6 / (z + 6.0)
            + _C7 / (z + 7.0) + _C8 / (z + 8.0))


@maybe_njit
def _gamma_pos(x):
    # x >= 0.5
    z = x - 1.0
    tt = z + LANCZOS_G + 0.5
    half = 0.5 * (z + 0.5)
    # t^(z+1/2) split in two halves to stay finite up to x ~ 171
    pw = tt ** half
    return math.sqrt(2.0 * math.pi) * pw * (pw * math.exp(-tt)) * _lanczos_sum(z)


@maybe_njit
def _lgamma_pos(x):
    z = x - 1.0
    tt = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(tt) - tt + math.log(_lanczos_sum(z))


def gamma_fn(x: float) -> float:
    """Gamma function for real ``x`` (poles at nonpositive integers raise)."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise DomainError(f"Gamma has a pole at {x:g}")
    if x < 0.5:
        # reflection
        s = math.sin(math.pi * x)
        return math.pi / (s * _gamma_pos(1.0 - x))
    if x > 171.62:
        return math.inf
    return _gamma_pos(x)


def log_gamma(x: float) -> float:
    """log |Gamma(x)| for real x > 0."""
    x = float(x)
    if x <= 0:
        raise DomainError("log_gamma implemented for x > 0 only")
    if x < 0.5:
        return math.log(math.pi / math.sin(math.pi * x)) - _lgamma_pos(1.0 - x)
    return _lgamma_pos(x)


# ---------------------------------------------------------------------------
# Modified Bessel function of the first kind, real order nu > -1
# ---------------------------------------------------------------------------


def bessel_switch(nu: float) -> float:
    """Argument above which the large-argument expansion is used."""
    return max(30.0, nu * nu)


@maybe_njit
def _log_bessel_series(nu, x, lg_nu1):
    # log I_nu(x) from the ascending series; all terms positive so the sum is
    # accurate for any x. Running rescale keeps the partial sum finite.
    q = 0.25 * x * x
    total = 1.0
    term = 1.0
    log_scale = 0.0
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        if total > 1e280:
            total *= 1e-280
            term *= 1e-280
            log_scale += 280.0 * math.log(10.0)
        if term < 1e-17 * total and k > 0.5 * x:
            break
        if k > 100000:
            break
    return nu * math.log(0.5 * x) - lg_nu1 + math.log(total) + log_scale


@maybe_njit
def _log_bessel_hankel(nu, x):
    # I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k
    mu4 = 4.0 * nu * nu
    total = 1.0
    term = 1.0
    prev = 1e300
    for k in range(1, 400):
        odd = 2.0 * k - 1.0
        term *= -(mu4 - odd * odd) / (8.0 * k * x)
        if abs(term) > prev:
            break
        total += term
        prev = abs(term)
        if abs(term) < 1e-17 * abs(total):
            break
    return x - 0.5 * math.log(2.0 * math.pi * x) + math.log(total)


def _check_order(nu):
    nu = float(nu)
    if not nu > -1.0:
        raise DomainError(f"Bessel order must be > -1, got {nu:g}")
    return nu


def _log_bessel_scalar(nu, x, lg_nu1, switch):
    if x == 0.0:
        if nu == 0.0:
            return 0.0
        return -math.inf if nu > 0 else math.inf
    if x <= switch:
        return _log_bessel_series(nu, x, lg_nu1)
    return _log_bessel_hankel(nu, x)


def log_bessel_i(nu: float, x):
    """``log I_nu(x)`` for ``nu > -1`` and ``x >= 0`` (scalar or array)."""
    nu = _check_order(nu)
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0) or np.any(np.isnan(xa)):
        raise DomainError("Bessel argument must be >= 0")
    lg = log_gamma(nu + 1.0)
    sw = bessel_switch(nu)
    flat = xa.ravel()
    out = np.empty_like(flat)
    for i, xi in enumerate(flat):
        out[i] = _log_bessel_scalar(nu, float(xi), lg, sw)
    out = out.reshape(xa.shape)
    return out if out.ndim else float(out)


def bessel_i(nu: float, x):
    """Modified Bessel function ``I_nu(x)``; saturates to ``inf`` on overflow."""
    with np.errstate(over="ignore"):
        return np.exp(log_bessel_i(nu, x))


def bessel_i_scaled(nu: float, x):
    """``exp(-x) I_nu(x)``."""
    xa = np.asarray(x, dtype=float)
    return np.exp(log_bessel_i(nu, xa) - xa)


__all__ = [
    "L1", "L2", "gamma_fn", "log_gamma", "bessel_i", "bessel_i_scaled",
    "log_bessel_i", "bessel_switch", "LANCZOS_G", "LANCZOS_COEF", "NUMBA_ENABLED",
]
