"""Cross-validation suite run by ``hestonlaw check``.

Every row compares two independent routes to the same number and records
``{name, pass, measured, tolerance}``. Rows that do not apply to the given
parameters (for example the inversion identity when a <= c rho) are left out.
"""
from __future__ import annotations

import math

import numpy as np

from . import charfn, density, domain, factorize, oracle, wings
from .errors import UnsupportedCaseError
from .params import EvalContext, invert_model, rescale


def _row(name, measured, tol, passed=None):
    measured = float(measured)
    ok = measured <= tol if passed is None else bool(passed)
    return {"name": name, "pass": ok, "measured": measured, "tolerance": tol}


def _rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


def _interior_grid(ctx: EvalContext, n=20, lo=-0.5, hi=2.0):
    rep = domain.abscissae(ctx)
    left = max(lo, 0.5 * rep.u_star_minus) if math.isfinite(rep.u_star_minus) else lo
    right = min(hi, 0.5 * (1.0 + rep.u_star_plus)) if math.isfinite(rep.u_star_plus) else hi
    return np.linspace(left, right, n)


def identity_checks(ctx: EvalContext):
    rows = []
    p = ctx.params
    rows.append(_row("martingale |M(1) - e^x0|", abs(charfn.mgf(ctx, 1.0) - math.exp(ctx.x0)), 1e-12))
    us = _interior_grid(ctx)
    base = charfn.log_mgf_formula(p.a, p.b, p.c, p.rho, ctx.x0, p.v0, ctx.t, us)
    flip = charfn.log_mgf_formula(p.a, p.b, -p.c, -p.rho, ctx.x0, p.v0, ctx.t, us)
    rows.append(_row("sign flip (c, rho) -> (-c, -rho)",
                     np.max(np.abs(np.exp(flip - base) - 1.0)), 1e-14))
    m0 = charfn.mgf(ctx, us)
    worst = 0.0
    for lam in (0.5, 2.0):
        q, t = rescale(p, ctx.t, lam)
        worst = max(worst, float(np.max(np.abs(charfn.mgf(EvalContext(q, t), us) / m0 - 1.0))))
    rows.append(_row("time scaling lambda in {0.5, 2}", worst, 1e-12))
    if ctx.a - ctx.c * ctx.rho > 0:
        inv = EvalContext(invert_model(p), ctx.t)
        ri = domain.abscissae(inv)
        lo = max(1.0 - 0.5 * (1.0 + ri.u_star_plus) if math.isfinite(ri.u_star_plus) else -0.5, -0.5)
        ug = np.linspace(lo, 1.5, 20)
        ug = ug[(ug > ri.u_star_minus) & (ug < ri.u_star_plus)]
        lhs = charfn.mgf(ctx, 1.0 - ug)
        rhs = math.exp(ctx.x0) * charfn.mgf(inv, ug)
        rows.append(_row("inversion identity", np.max(np.abs(lhs / rhs - 1.0)), 1e-10))
    return rows


def form_checks(ctx: EvalContext):
    u = np.linspace(-100.0, 100.0, 1000)
    a = charfn.charfn_new(ctx, u)
    b = charfn.charfn_albrecher(ctx, u)
    scale = np.maximum(np.abs(b), 1e-300)
    return [_row("charfn forms agree", np.max(np.abs(a - b) / scale), 1e-10),
            _row("|phi| <= 1", np.max(np.abs(a)) - 1.0, 1e-12)]


def domain_checks(ctx: EvalContext):
    rows = []
    rep = domain.abscissae(ctx)
    resid = 0.0
    for u in (rep.u_star_minus, rep.u_star_plus):
        if math.isfinite(u) and rep.case_label not in (domain.CaseLabel.A_EQ_RHOC,
                                                        domain.CaseLabel.RHO1_A_EQ_2C):
            resid = max(resid, abs(charfn.big_f(ctx, u)))
    rows.append(_row("|F| at abscissae", resid, 1e-9))
    if ctx.a - ctx.c * ctx.rho > 0 and math.isfinite(rep.u_star_minus):
        rows.append(_row("left abscissa via inversion",
                         abs(domain.left_via_inversion(ctx) - rep.u_star_minus), 1e-8))
    if math.isfinite(rep.u_star_plus):
        m = charfn.mgf(ctx, rep.u_star_plus + 0.01)
        rows.append({"name": "explosion beyond u_star_plus", "pass": math.isinf(m),
                     "measured": "inf" if math.isinf(m) else m, "tolerance": "inf"})
    try:
        domain.abscissa_curve(ctx, [0.05, 0.25, 1.0, 5.0, 25.0, 50.0])
        rows.append(_row("abscissae monotone in t", 0.0, 0.0, True))
    except Exception as exc:  # reported as a failing row
        rows.append({"name": "abscissae monotone in t", "pass": False,
                     "measured": str(exc), "tolerance": 0.0})
    wr = wings.wing_report(ctx)
    rows.append(_row("wing coefficients in [0, 2]",
                     max(wr.beta_R, wr.beta_L), 2.0, 0 <= wr.beta_R <= 2 and 0 <= wr.beta_L <= 2))
    return rows


def factor_checks(ctx: EvalContext, n_max=200):
    try:
        fact = factorize.build_factorization(ctx, n_max)
    except UnsupportedCaseError:
        return []
    rows = [_row("residues positive", -float(np.min(fact.residues)), 0.0,
                 bool(np.all(fact.residues > 0)))]
    a1 = float(np.min(np.abs(fact.roots)))
    us = np.linspace(-0.9 * a1, 0.9 * a1, 20)
    us = us[np.abs(us) < 50.0]
    rows.append(_row("factorized MGF vs closed form",
                     max(_rel(factorize.mgf_from_factors(fact, u), charfn.mgf(ctx, u)) for u in us), 1e-4))
    rows.append(_row("Mittag-Leffler vs G",
                     max(abs(factorize.mittag_leffler_eval(ctx, fact, u) - charfn.big_g(ctx, u)) for u in us), 1e-6))
    rows.append(_row("Hadamard product vs F",
                     max(_rel(factorize.hadamard_eval(ctx, fact, u), charfn.big_f(ctx, u)) for u in us), 1e-6))
    return rows


def mc_checks(ctx: EvalContext, seed: int, paths=200_000):
    mc = oracle.McConfig(paths=paths, steps_per_unit_time=256, seed=seed)
    rep = domain.abscissae(ctx)
    us = [u for u in (-0.5, 0.5, 1.0, 2.0) if rep.u_star_minus < 2 * u < rep.u_star_plus]
    sample = oracle.simulate_terminal(ctx, mc)
    rows = []
    for u, (est, se) in zip(us, oracle.mc_mgf(ctx, mc, us, sample)):
        z = abs(est - charfn.mgf(ctx, u)) / se
        rows.append(_row(f"Monte Carlo M({u:g}) within 3 SE", z, 3.0))
    return rows


def density_grid(ctx: EvalContext, npts=2001):
    """A grid wide enough for both exponential tails (rates |u_-^*|, u_+^*)."""
    rep = domain.abscissae(ctx)
    m = charfn.mean_log_spot(ctx)
    sd = math.sqrt(max(ctx.v0, ctx.b) * ctx.t)
    left = max(12 * sd, 18.0 / abs(rep.u_star_minus)) if math.isfinite(rep.u_star_minus) else 12 * sd
    right = max(8 * sd, 18.0 / rep.u_star_plus) if math.isfinite(rep.u_star_plus) else 8 * sd
    return (m - left, m + right, npts)


def density_checks(ctx: EvalContext):
    try:
        fact = factorize.build_factorization(ctx, 100)
    except UnsupportedCaseError:
        return []
    grid = density_grid(ctx)
    ref = density.reference_density(ctx, grid)
    dists = [density.l1_distance(density.approx_law(ctx, fact, n, grid), ref) for n in (10, 25, 50)]
    dec = all(x > y for x, y in zip(dists, dists[1:]))
    return [_row("density L1 decreasing in factors", dists[-1], float("inf"), dec),
            _row("reference density mass", abs(ref.mass - 1.0), 1e-4)]


def run_checks(ctx: EvalContext, level: str = "quick", seed: int = 0):
    rows = identity_checks(ctx) + form_checks(ctx) + domain_checks(ctx) + factor_checks(ctx)
    if level == "full":
        rows += mc_checks(ctx, seed) + density_checks(ctx)
    return rows

