"""Zeros of F and the factorization of M(u) into Bessel-type factors.

With a_n the (real, simple) zeros of F and b_n the residues of G,

    F(u) = e^{at/2} e^{nu u} prod (1 - u/a_n) e^{u/a_n}
    G(u) = G(0) - u sum b_n / (a_n^2 (1 - u/a_n))
    M(u) = e^{d u} prod e^{c_n u} (1 - u/a_n)^{-xi} exp(g_n u / (1 - u/a_n))

with c_n = -(v0 b_n + xi)/a_n, g_n = v0 b_n / a_n and xi = 2ab/c^2.

Truncated sums are completed by a tail. Zeros beyond the requested levels
are still located exactly (each ladder interval far out holds a single
simple zero) up to a cutoff, and the remainder past the cutoff is
estimated from the 1/a^2 decay of every summand with asymptotically evenly
spaced zeros.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .charfn import big_g, p_prime, p_quadratic
from .domain import CaseLabel, abscissae
from .errors import ConsistencyError, DomainError, PoleError, UnsupportedCaseError
from .kernels import bisect_f, f_scaled_numpy
from .params import EvalContext

SCAN_CELLS = 32
FINE_CELLS = 512
TAIL_FACTOR = 4
TAIL_MIN_LEVELS = 2000
RESIDUE_DENOM_MIN = 1e-300


def _levels(ctx: EvalContext, ks):
    """Ladder points alpha_{-k}, alpha_{+k} for an integer array ``ks``
    (``ks = 0`` gives u_-, u_+). Missing sides are +-inf."""
    a, c, rho, t = ctx.a, ctx.c, ctx.rho, ctx.t
    A2, A1, A0 = c * c * (rho * rho - 1.0), c * c - 2.0 * a * c * rho, a * a
    C = A0 + 4.0 * (np.asarray(ks, dtype=float) * math.pi / t) ** 2
    if A2 == 0.0:
        if A1 == 0.0:
            inf = np.full(C.shape, np.inf)
            return -inf, inf
        r = -C / A1
        inf = np.full(C.shape, np.inf)
        return (r, inf) if A1 > 0 else (-inf, r)
    sq = np.sqrt(A1 * A1 - 4.0 * A2 * C)
    q = -0.5 * (A1 + math.copysign(1.0, A1) * sq)
    r1, r2 = q / A2, C / q
    return np.minimum(r1, r2), np.maximum(r1, r2)


def _unbounded_positive_root(ctx: EvalContext):
    """Single positive zero when p has no positive root (rho = 1, c > 2a)."""
    a, c, rho, t = ctx.a, ctx.c, ctx.rho, ctx.t
    hi = 2.0
    while f_scaled_numpy(np.array([hi]), a, c, rho, t)[0] > 0:
        hi *= 2.0
        if hi > 1e12:
            raise ConsistencyError("no positive zero of F found", {"hi": hi})
    return 1.0, hi


def _scan_intervals(ctx: EvalContext, lo, hi, fine_mask):
    """Sign scan of F on each interval (lo[i], hi[i]); returns bracket arrays
    and the number of sign changes per interval."""
    a, c, rho, t = ctx.a, ctx.c, ctx.rho, ctx.t
    br_lo, br_hi, counts = [], [], np.zeros(len(lo), dtype=int)
    if len(lo) == 0:
        return np.array([]), np.array([]), counts
    frac = np.linspace(0.0, 1.0, SCAN_CELLS + 1)
    grid = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
    vals = f_scaled_numpy(grid, a, c, rho, t)
    for i in range(len(lo)):
        g, v = grid[i], vals[i]
        cells = SCAN_CELLS if not fine_mask[i] else FINE_CELLS
        while True:
            if cells != len(g) - 1:
                g = np.linspace(lo[i], hi[i], cells + 1)
                v = f_scaled_numpy(g, a, c, rho, t)
            s = np.sign(v)
            idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
            zeros = np.nonzero(s[1:-1] == 0)[0] + 1
            n = len(idx) + len(zeros)
            # endpoint signs fix the parity of the zero count; refine on mismatch
            parity_ok = (s[0] * s[-1] < 0) == (n % 2 == 1) or s[0] == 0 or s[-1] == 0
            if parity_ok or cells >= FINE_CELLS:
                break
            cells *= 2
        counts[i] = n
        br_lo.extend(g[idx])
        br_hi.extend(g[idx + 1])
        br_lo.extend(g[zeros])
        br_hi.extend(g[zeros])
    return np.array(br_lo), np.array(br_hi), counts


def _side_intervals(ctx: EvalContext, k_from, k_to, sign):
    """Intervals between consecutive ladder points on one side for levels
    k_from..k_to (interval k is (alpha_k, alpha_{k+1}) with alpha_0 = u_+-)."""
    ks = np.arange(k_from, k_to + 2)
    am, ap = _levels(ctx, ks)
    pts = ap if sign > 0 else am
    if not np.all(np.isfinite(pts)):
        return np.array([]), np.array([])
    if sign > 0:
        return pts[:-1], pts[1:]
    return pts[1:], pts[:-1]


def _critical_point(ctx: EvalContext):
    # where a - c rho u changes sign; the scan is refined around it
    return ctx.a / (ctx.c * ctx.rho) if ctx.rho != 0 else math.inf


def _find_roots(ctx: EvalContext, k_from, k_to, include_post_t0):
    a, c, rho, t = ctx.a, ctx.c, ctx.rho, ctx.t
    rep = abscissae(ctx)
    los, his, fine = [], [], []
    crit = _critical_point(ctx)
    for sign in (1, -1):
        lo, hi = _side_intervals(ctx, k_from, k_to, sign)
        los.append(lo)
        his.append(hi)
        fine.append((lo <= crit) & (crit <= hi))
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    fine = np.concatenate(fine)
    if include_post_t0:
        if rep.case_label is CaseLabel.A_LT_RHOC_POST_T0 and math.isfinite(rep.u_plus):
            lo = np.append(lo, 1.0)
            hi = np.append(hi, rep.u_plus)
            fine = np.append(fine, True)
        elif rep.case_label is CaseLabel.A_LT_RHOC_POST_T0:
            l1, h1 = _unbounded_positive_root(ctx)
            lo = np.append(lo, l1)
            hi = np.append(hi, h1)
            fine = np.append(fine, True)
    br_lo, br_hi, counts = _scan_intervals(ctx, lo, hi, fine)
    limit = np.where(fine, 3, 2)
    if np.any(counts > limit):
        i = int(np.argmax(counts > limit))
        raise ConsistencyError(
            f"{counts[i]} sign changes of F in ({lo[i]!r}, {hi[i]!r})",
            {"interval": [float(lo[i]), float(hi[i])], "count": int(counts[i])})
    roots = bisect_f(br_lo, br_hi, a, c, rho, t, 1e-14) if len(br_lo) else np.array([])
    roots = np.unique(roots)
    if len(roots) > 1:
        keep = np.concatenate(([True], np.diff(roots) > 1e-10 * np.abs(roots[1:])))
        roots = roots[keep]
    return roots


def enumerate_roots(ctx: EvalContext, n_max: int) -> np.ndarray:
    """Real zeros of F between the ladder levels 0..n_max on each side,
    sorted by increasing modulus."""
    _check_supported(ctx)
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    roots = _find_roots(ctx, 0, n_max, include_post_t0=True)
    return roots[np.argsort(np.abs(roots), kind="stable")]


def _check_supported(ctx: EvalContext):
    if abscissae(ctx).case_label is CaseLabel.RHO1_A_EQ_2C:
        raise UnsupportedCaseError(
            "rho = 1 with c = 2a: F is affine with a single zero, no product to build")


def residues(ctx: EvalContext, roots) -> np.ndarray:
    """Residues of G at the zeros of F (closed form in p, p')."""
    r = np.asarray(roots, dtype=float)
    t, c, rho = ctx.t, ctx.c, ctx.rho
    p = p_quadratic(ctx, r)
    dp = p_prime(ctx, r)
    A = ctx.a - c * rho * r
    den = t * dp * p - 4.0 * c * rho * p - dp * A * (A * t + 2.0)
    if np.any(np.abs(den) < RESIDUE_DENOM_MIN):
        raise ConsistencyError("degenerate root: residue denominator vanishes",
                               {"roots": r[np.abs(den) < RESIDUE_DENOM_MIN].tolist()})
    return 4.0 * p * (1.0 - r) / den


# ---------------------------------------------------------------------------
# tails
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tail:
    """Exact zeros past the head plus a remainder estimate for each side.

    ``remainder`` holds ``(a_last, R)`` per side where ``R`` approximates
    ``sum_{k > last} 1/a_k^2``.
    """

    roots: np.ndarray
    residues: np.ndarray
    remainder: tuple = ()

    def total(self, q):
        """``sum q(a, b)`` over the tail zeros plus the analytic remainder."""
        if len(self.roots) == 0:
            return 0.0
        s = float(np.sum(q(self.roots, self.residues)))
        for a_last, b_last, R in self.remainder:
            s += float(q(np.array([a_last]), np.array([b_last]))[0]) * a_last * a_last * R
        return s


def _build_tail(ctx: EvalContext, n_max: int, levels: int | None = None) -> Tail:
    levels = max(TAIL_FACTOR * n_max, TAIL_MIN_LEVELS) if levels is None else levels
    roots = _find_roots(ctx, n_max + 1, n_max + levels, include_post_t0=False)
    if len(roots) == 0:
        return Tail(np.array([]), np.array([]))
    res = residues(ctx, roots)
    rem = []
    for side in (roots[roots > 0], roots[roots < 0][::-1]):
        if len(side) < 2:
            continue
        a_last, a_prev = side[-1], side[-2]
        K = abs(a_last - a_prev)
        R = 1.0 / (K * (abs(a_last) + 0.5 * K))
        b_last = float(residues(ctx, np.array([a_last]))[0])
        rem.append((float(a_last), b_last, R))
    return Tail(roots, res, tuple(rem))


# ---------------------------------------------------------------------------
# Hadamard constant and the factorization record
# ---------------------------------------------------------------------------


def _hadamard_term(a_n, u):
    return np.log1p(-u / a_n) + u / a_n


def hadamard_nu(ctx: EvalContext, roots, tail: Tail | None = None) -> float:
    """nu(t) from the normalisation F(1) = e^{(a - rho c) t/2}."""
    roots = np.asarray(roots, dtype=float)
    s = float(np.sum(_hadamard_term(roots, 1.0)))
    if tail is not None:
        s += tail.total(lambda r, b: _hadamard_term(r, 1.0))
    return -0.5 * ctx.rho * ctx.c * ctx.t - s


@dataclass(frozen=True, eq=False)
class Factorization:
    roots: np.ndarray
    residues: np.ndarray
    xi: float
    c_shift: np.ndarray
    g_coef: np.ndarray
    nu: float
    d_shift: float
    n_terms: int
    ctx: EvalContext = field(repr=False)
    tail: Tail = field(repr=False, default=None)

    def as_dict(self) -> dict:
        return {"roots": self.roots.tolist(), "residues": self.residues.tolist(),
                "nu": self.nu, "d": self.d_shift, "xi": self.xi,
                "c": self.c_shift.tolist(), "g": self.g_coef.tolist()}


def build_factorization(ctx: EvalContext, n_max: int, tail: bool = True) -> Factorization:
    """Zeros, residues and factor parameters for ladder levels up to ``n_max``."""
    roots = enumerate_roots(ctx, n_max)
    b = residues(ctx, roots)
    tl = _build_tail(ctx, n_max) if tail else None
    nu = hadamard_nu(ctx, roots, tl)
    xi = ctx.xi
    a, t, v0 = ctx.a, ctx.t, ctx.v0
    c_n = -(v0 * b + xi) / roots
    g_n = v0 * b / roots
    d = (ctx.x0 - ctx.rho * a * ctx.b * t / ctx.c - xi * nu
         - v0 * (-math.expm1(-a * t)) / (2.0 * a))
    return Factorization(roots, b, xi, c_n, g_n, nu, d, len(roots), ctx, tl)


# ---------------------------------------------------------------------------
# evaluations through the expansions
# ---------------------------------------------------------------------------


def _check_poles(roots, u):
    hit = np.abs(1.0 - u / roots) < 1e-14
    if np.any(hit):
        r = float(roots[hit][0])
        raise PoleError(f"u={u!r} is a zero of F", r)


def mittag_leffler_eval(ctx: EvalContext, fact: Factorization, u: float, tail: bool = True) -> float:
    """G(u) from its partial fraction expansion."""
    u = float(u)
    _check_poles(fact.roots, u)

    def q(r, b):
        return b / (r * r * (1.0 - u / r))

    s = float(np.sum(q(fact.roots, fact.residues)))
    if tail and fact.tail is not None:
        s += fact.tail.total(q)
    g0 = -math.expm1(-ctx.a * ctx.t) / (2.0 * ctx.a)
    return g0 - u * s


def hadamard_eval(ctx: EvalContext, fact: Factorization, u: float, tail: bool = True) -> float:
    """F(u) from the canonical product."""
    u = float(u)
    x = u / fact.roots
    sign = float(np.prod(np.sign(1.0 - x)))
    log_abs = 0.5 * ctx.a * ctx.t + fact.nu * u + float(np.sum(np.log(np.abs(1.0 - x)) + x))
    if tail and fact.tail is not None:
        log_abs += fact.tail.total(lambda r, b: _hadamard_term(r, u))
    return sign * math.exp(log_abs)


def _log_factor(r, g, xi, u):
    x = u / r
    return -xi * (np.log1p(-x) + x) + g * u * x / (1.0 - x)


def mgf_from_factors(fact: Factorization, u: float, tail: bool = True) -> float:
    """M(u) from the truncated product of factor MGFs (needs |u| < |a_1|)."""
    u = float(u)
    a1 = float(np.min(np.abs(fact.roots)))
    if abs(u) >= a1:
        raise DomainError(f"|u|={abs(u)!r} outside the disc |u| < |a_1| = {a1!r}")
    s = float(np.sum(_log_factor(fact.roots, fact.g_coef, fact.xi, u)))
    if tail and fact.tail is not None:
        v0 = fact.ctx.v0
        s += fact.tail.total(lambda r, b: _log_factor(r, v0 * b / r, fact.xi, u))
    return math.exp(fact.d_shift * u + s)


def numerical_residue(ctx: EvalContext, root: float, h: float = 1e-4) -> float:
    """Residue of G at ``root`` by symmetric differencing and one Richardson step."""
    def est(step):
        return 0.5 * step * (big_g(ctx, root + step) - big_g(ctx, root - step))

    return (4.0 * est(h / 2) - est(h)) / 3.0
