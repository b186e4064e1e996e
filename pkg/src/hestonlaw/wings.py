"""Smile wing coefficients, effective mean reversion and second-moment deals."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charfn import mgf
from .domain import abscissae
from .errors import DomainError
from .params import EvalContext


def lee_beta(p_moment: float) -> float:
    """Root in [0, 2] of ``1/(2 beta) + beta/8 - 1/2 = p``.

    Uses ``beta = 2 / (1 + 2p + 2 sqrt(p (p + 1)))``, algebraically the small
    root ``2 + 4p - 2 sqrt((1+2p)^2 - 1)`` without its cancellation.
    """
    p = float(p_moment)
    if not p > 0:
        raise DomainError("moment order must be > 0")
    if math.isinf(p):
        return 0.0
    return 2.0 / (1.0 + 2.0 * p + 2.0 * math.sqrt(p * (p + 1.0)))


@dataclass(frozen=True)
class WingReport:
    beta_R: float
    beta_L: float
    u_star_plus: float
    u_star_minus: float
    omega: float

    def as_dict(self) -> dict:
        def enc(x):
            return ("inf" if x > 0 else "-inf") if math.isinf(x) else x

        return {"beta_R": self.beta_R, "beta_L": self.beta_L,
                "u_star_plus": enc(self.u_star_plus),
                "u_star_minus": enc(self.u_star_minus), "omega": self.omega}


def wing_report(ctx: EvalContext) -> WingReport:
    rep = abscissae(ctx)
    # at u_+^* = 1 the right wing is degenerate (beta_R = 2)
    p_right = rep.u_star_plus - 1.0
    beta_r = 2.0 if p_right <= 0 else lee_beta(p_right)
    return WingReport(beta_r, lee_beta(-rep.u_star_minus), rep.u_star_plus,
                      rep.u_star_minus, ctx.a / ctx.c)


def u_pm_effective(omega: float, rho: float):
    """Roots of p expressed through ``omega = a/c`` only (|rho| < 1)."""
    omega, rho = float(omega), float(rho)
    if not omega > 0:
        raise DomainError("omega must be > 0")
    if not -1.0 < rho < 1.0:
        raise DomainError("rho must lie in (-1, 1)")
    # p/c^2 = -(1 - rho^2) u^2 + (1 - 2 omega rho) u + omega^2
    A2, A1, A0 = -(1.0 - rho * rho), 1.0 - 2.0 * omega * rho, omega * omega
    sq = math.sqrt(A1 * A1 - 4.0 * A2 * A0)
    q = -0.5 * (A1 + math.copysign(sq, A1))
    r1, r2 = q / A2, A0 / q
    return min(r1, r2), max(r1, r2)


def spot_moment(ctx: EvalContext, n: float) -> float:
    """E[S_t^n]; ``inf`` unless ``u_-^* < n < u_+^*``."""
    n = float(n)
    if n == 0.0:
        return 1.0
    m = mgf(ctx, n)
    if math.isinf(m):
        return math.inf
    return math.exp(n * ctx.mu * ctx.t) * m


def performance_note_price(ctx: EvalContext, notional: float = 1.0, df: float = 1.0) -> float:
    """``df * notional * (E[S_t^2]/s0 - E[S_t])``."""
    if not 0 < df <= 1:
        raise DomainError("discount factor must lie in (0, 1]")
    m2 = spot_moment(ctx, 2.0)
    if math.isinf(m2):
        return math.inf
    return df * notional * (m2 / ctx.params.s0 - spot_moment(ctx, 1.0))


def inarrears_fair_strike(ctx: EvalContext, delta: float) -> float:
    """Fair strike of a rate paid in arrears: ``L0 + delta Var(L) / (1 + delta L0)``."""
    if not delta > 0:
        raise DomainError("delta must be > 0")
    m2 = spot_moment(ctx, 2.0)
    if math.isinf(m2):
        return math.inf
    l0 = spot_moment(ctx, 1.0)
    var = max(m2 - l0 * l0, 0.0)
    return l0 + delta * var / (1.0 + delta * l0)


def finite_moment_grid(ctx: EvalContext, orders) -> np.ndarray:
    """Boolean mask of which ``orders`` have a finite spot moment."""
    return np.array([math.isfinite(spot_moment(ctx, n)) for n in orders])
