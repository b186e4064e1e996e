"""Interval of convergence of the MGF.

The MGF of X_t is finite exactly on (u_-^*, u_+^*), where the abscissae are
zeros of F located with the help of

* the roots u_- < 0 < 1 <= u_+ of p,
* the ladder alpha_{+-n} solving p(u) = -4 n^2 pi^2 / t^2 (zeros of L2(p t^2/4)),
* beta_{+-1} solving p(u) = -2 pi^2 / t^2,
* the critical horizon t0 = 2 / (c rho u_+ - a) when a < c rho.

Every zero is located by a sign scan followed by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError
from .kernels import bisect_f, f_scaled_numpy
from .params import EvalContext, invert_model

BISECT_REL_TOL = 1e-15
BISECT_MAX_ITER = 200
SCAN_POINTS = 256
DEGENERATE_REL_TOL = 1e-12


class CaseLabel(str, Enum):
    A_GT_RHOC = "A_gt_rhoc"
    A_EQ_RHOC = "A_eq_rhoc"
    A_LT_RHOC_PRE_T0 = "A_lt_rhoc_pre_t0"
    A_LT_RHOC_POST_T0 = "A_lt_rhoc_post_t0"
    # rho = 1 with c = 2a: F(u) = e^{at/2}(1 - u(1 - e^{-at})) is affine in u
    RHO1_A_EQ_2C = "Rho1_a_eq_2c"


def _jsonable(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class DomainReport:
    u_minus: float
    u_plus: float
    t0: float | None
    u_star_minus: float
    u_star_plus: float
    case_label: CaseLabel
    notes: tuple = ()

    def as_dict(self) -> dict:
        return {
            "u_minus": _jsonable(self.u_minus),
            "u_plus": _jsonable(self.u_plus),
            "t0": _jsonable(self.t0),
            "u_star_minus": _jsonable(self.u_star_minus),
            "u_star_plus": _jsonable(self.u_star_plus),
            "case_label": self.case_label.value,
            "notes": list(self.notes),
        }


@dataclass(frozen=True)
class BracketLadder:
    alpha: list = field(default_factory=list)  # [(alpha_{-n}, alpha_{+n}), n = 1..N]
    beta1: tuple = (-math.inf, math.inf)


# ---------------------------------------------------------------------------
# level sets of p
# ---------------------------------------------------------------------------


def _coeffs(a, c, rho):
    return c * c * (rho * rho - 1.0), c * c - 2.0 * a * c * rho, a * a


def _level_roots(a, c, rho, level):
    """Solutions of p(u) = -level (level >= 0) as (negative, positive) with
    +-inf for a missing side."""
    A2, A1, A0 = _coeffs(a, c, rho)
    C = A0 + level
    if A2 == 0.0:
        if A1 == 0.0:
            return -math.inf, math.inf
        r = -C / A1
        return (r, math.inf) if r < 0 else (-math.inf, r)
    disc = A1 * A1 - 4.0 * A2 * C
    sq = math.sqrt(disc)
    q = -0.5 * (A1 + math.copysign(sq, A1))
    r1, r2 = q / A2, C / q
    return min(r1, r2), max(r1, r2)


def roots_of_p(ctx: EvalContext):
    """Roots ``(u_minus, u_plus)`` of p, with infinities for the one-sided cases."""
    return _level_roots(ctx.a, ctx.c, ctx.rho, 0.0)


def t_zero(ctx: EvalContext):
    """Critical horizon when ``a < c rho`` (``None`` otherwise, 0 if u_+ is infinite)."""
    a, c, rho = ctx.a, ctx.c, ctx.rho
    if a >= c * rho or abs(a - c * rho) < DEGENERATE_REL_TOL * a:
        return None
    _, up = roots_of_p(ctx)
    if math.isinf(up):
        return 0.0
    return 2.0 / (c * rho * up - a)


def bracket_ladder(ctx: EvalContext, n_max: int) -> BracketLadder:
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    t = ctx.t
    alpha = [_level_roots(ctx.a, ctx.c, ctx.rho, 4.0 * (n * math.pi / t) ** 2)
             for n in range(1, n_max + 1)]
    beta1 = _level_roots(ctx.a, ctx.c, ctx.rho, 2.0 * (math.pi / t) ** 2)
    return BracketLadder(alpha=alpha, beta1=beta1)


def growth_bounds(ctx: EvalContext):
    """Constants ``(K1, K2)`` with ``K1 u^2 <= -p(u) + ... `` on the ladder region,
    so that ``2 n pi / (t sqrt K2) <= |alpha_{+-n}| <= 2 n pi / (t sqrt K1)``.

    On the ladder, ``-p(u)/u^2 = |A2| - A1 y - A0 y^2`` with ``y = 1/u``; we bound
    this concave quadratic over the range of ``y`` reached by alpha_{+-n}, n >= 1.
    Returns ``None`` when rho = +-1 (p is linear).
    """
    A2, A1, A0 = _coeffs(ctx.a, ctx.c, ctx.rho)
    if A2 == 0.0:
        return None
    lad = bracket_ladder(ctx, 1)
    am, ap = lad.alpha[0]
    lo, hi = 1.0 / am, 1.0 / ap

    def h(y):
        return -A2 - A1 * y - A0 * y * y

    cand = [h(lo), h(hi), h(0.0)]
    yv = -A1 / (2.0 * A0)
    if lo <= yv <= hi:
        cand.append(h(yv))
    return min(cand), max(cand)


# ---------------------------------------------------------------------------
# zero location
# ---------------------------------------------------------------------------


def _bisect(a, c, rho, t, lo, hi):
    r = bisect_f(np.array([lo]), np.array([hi]), a, c, rho, t,
                 BISECT_REL_TOL, BISECT_MAX_ITER)
    return float(r[0])


def _sign_changes(grid, vals):
    s = np.sign(vals)
    idx = []
    for i in range(len(grid) - 1):
        if s[i] == 0.0:
            idx.append((i, i))
        elif s[i] * s[i + 1] < 0:
            idx.append((i, i + 1))
    if s[-1] == 0.0:
        idx.append((len(grid) - 1, len(grid) - 1))
    return idx


def _first_zero(a, c, rho, t, start, stop, what, npts=SCAN_POINTS):
    """First zero of F met when walking from ``start`` to ``stop``. Also
    returns how many sign changes the scan saw."""
    grid = np.linspace(start, stop, npts)
    vals = f_scaled_numpy(grid, a, c, rho, t)
    changes = _sign_changes(grid, vals)
    if not changes:
        raise ConsistencyError(
            f"no sign change of F while searching for {what} in "
            f"[{min(start, stop)!r}, {max(start, stop)!r}]",
            {"grid": grid.tolist(), "F_sign": vals.tolist(),
             "params": {"a": a, "c": c, "rho": rho, "t": t}})
    i, j = changes[0]
    if i == j:
        return float(grid[i]), len(changes)
    x0, x1 = sorted((grid[i], grid[j]))
    return _bisect(a, c, rho, t, x0, x1), len(changes)


def _expand_positive(a, c, rho, t, hi=2.0):
    """Double ``hi`` until F(hi) < 0; used when p has no positive root."""
    while f_scaled_numpy(np.array([hi]), a, c, rho, t)[0] > 0:
        hi *= 2.0
        if hi > 1e12:
            raise ConsistencyError("no positive zero of F found", {"hi": hi})
    return hi


@lru_cache(maxsize=2048)
def _abscissae(a, c, rho, t) -> DomainReport:
    u_m, u_p = _level_roots(a, c, rho, 0.0)
    am1, ap1 = _level_roots(a, c, rho, 4.0 * (math.pi / t) ** 2)
    notes = []
    t0 = None

    # left abscissa: largest zero in (alpha_{-1}, u_-)
    if math.isinf(u_m):
        left = -math.inf
    else:
        left, _ = _first_zero(a, c, rho, t, u_m, am1, "u_star_minus")

    gap = a - c * rho
    if rho == 1.0 and abs(c - 2.0 * a) <= DEGENERATE_REL_TOL * a:
        return DomainReport(u_m, u_p, None, -math.inf, -1.0 / math.expm1(-a * t),
                            CaseLabel.RHO1_A_EQ_2C)
    if abs(gap) < DEGENERATE_REL_TOL * a:
        label, right = CaseLabel.A_EQ_RHOC, 1.0
    elif gap > 0:
        label = CaseLabel.A_GT_RHOC
        if math.isinf(u_p):
            right = math.inf
        else:
            right, _ = _first_zero(a, c, rho, t, u_p, ap1, "u_star_plus")
    else:
        t0 = 0.0 if math.isinf(u_p) else 2.0 / (c * rho * u_p - a)
        if t < t0:
            label = CaseLabel.A_LT_RHOC_PRE_T0
            _, bp1 = _level_roots(a, c, rho, 2.0 * (math.pi / t) ** 2)
            right, _ = _first_zero(a, c, rho, t, u_p, bp1, "u_star_plus")
        else:
            label = CaseLabel.A_LT_RHOC_POST_T0
            stop = _expand_positive(a, c, rho, t) if math.isinf(u_p) else u_p
            right, count = _first_zero(a, c, rho, t, 1.0, stop, "u_star_plus")
            if count > 1 and not math.isinf(u_p):
                notes.append(f"{count} sign changes of F in (1, u_plus]; smallest kept")
    return DomainReport(u_m, u_p, t0, left, right, label, tuple(notes))


def abscissae(ctx: EvalContext) -> DomainReport:
    """u_-, u_+, t0 and the abscissae of convergence for ``ctx``.

    The result depends on (a, c, rho, t) only and is cached on those.
    """
    return _abscissae(ctx.a, ctx.c, ctx.rho, ctx.t)


def left_via_inversion(ctx: EvalContext) -> float:
    """u_-^* computed as ``1 - u_+^*`` of the inverted model (needs a > c rho)."""
    inv = invert_model(ctx.params)
    rep = _abscissae(inv.a, inv.c, inv.rho, ctx.t)
    return 1.0 - rep.u_star_plus


def abscissa_curve(ctx: EvalContext, t_grid):
    """``[(t, u_star_minus, u_star_plus), ...]``; the right abscissa must be
    nonincreasing and the left one nondecreasing in t."""
    ts = [float(t) for t in t_grid]
    if not ts or any(t <= 0 for t in ts) or any(t1 <= t0 for t0, t1 in zip(ts, ts[1:])):
        raise DomainError("t_grid must be positive and strictly increasing")
    rows = []
    for t in ts:
        try:
            rep = abscissae(ctx.with_t(t))
        except ConsistencyError as exc:
            raise ConsistencyError(f"at t={t!r}: {exc}", exc.diagnostics) from exc
        rows.append((t, rep.u_star_minus, rep.u_star_plus))
    for (t1, m1, p1), (t2, m2, p2) in zip(rows, rows[1:]):
        if p2 > p1 + 1e-9 or m2 < m1 - 1e-9:
            raise ConsistencyError(
                f"abscissae not monotone between t={t1!r} and t={t2!r}",
                {"rows": rows})
    return rows
