"""Bessel-type factor laws, lattice convolution, and a Fourier reference density.

A factor with parameters (xi, gamma, zeta) has MGF

    N(u) = (1 - u/gamma)^{-xi} exp(zeta u / (1 - u/gamma)),

which is a Poisson(zeta gamma) mixture of Gamma(xi + k, rate |gamma|) laws on
the half-line of sign(gamma). Its density is

    h(x) = |gamma| (x/zeta)^tau e^{-(x + zeta) gamma} I_{2 tau}(2 |gamma| sqrt(zeta x)),

with tau = (xi - 1)/2; zeta = 0 is the plain gamma law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammainc

from .charfn import charfn_new, mean_log_spot
from .errors import DomainError, GridError
from .kernels import direct_convolve
from .params import EvalContext
from .special import log_bessel_i, log_gamma

POISSON_EPS = 1e-17
TAIL_EPS_LOG = 36.0  # factor support is cut where the tail mass is ~ e^-36
LATTICE_PTS_PER_SD = 200
CF_CUTOFF = 1e-10
CF_U_CAP = 1e6
GL_NODES = 16


@dataclass(frozen=True)
class BesselFactor:
    xi: float
    gamma: float
    zeta: float = 0.0
    shift: float = 0.0

    def __post_init__(self):
        if not self.xi > 0:
            raise DomainError("xi must be > 0")
        if self.gamma == 0 or not math.isfinite(self.gamma):
            raise DomainError("gamma must be finite and nonzero")
        if self.zeta != 0 and self.zeta * self.gamma < 0:
            raise DomainError("zeta and gamma must share their sign")

    @property
    def tau(self) -> float:
        return 0.5 * (self.xi - 1.0)

    @property
    def sign(self) -> float:
        return 1.0 if self.gamma > 0 else -1.0

    @property
    def poisson_rate(self) -> float:
        return self.zeta * self.gamma

    def mean(self) -> float:
        """Mean of the unshifted factor."""
        return self.xi / self.gamma + self.zeta

    def variance(self) -> float:
        return (self.xi + 2.0 * self.poisson_rate) / (self.gamma * self.gamma)


def factor_density(f: BesselFactor, x):
    """Density of the unshifted factor (zero off its half-line)."""
    xa = np.asarray(x, dtype=float)
    y = xa * f.sign  # reflect the negative case onto (0, inf)
    g, z = abs(f.gamma), abs(f.zeta)
    out = np.zeros_like(y)
    pos = y > 0
    if np.any(pos):
        yp = y[pos]
        if z == 0.0:
            logh = f.xi * math.log(g) + (f.xi - 1.0) * np.log(yp) - g * yp - log_gamma(f.xi)
        else:
            arg = 2.0 * g * np.sqrt(z * yp)
            logh = (math.log(g) + f.tau * np.log(yp / z) - (yp + z) * g
                    + log_bessel_i(2.0 * f.tau, arg))
        out[pos] = np.exp(logh)
    return out if out.ndim else float(out)


def factor_mgf(f: BesselFactor, u):
    """``e^{shift u} N(u)``; ``inf`` outside the factor's own domain."""
    ua = np.asarray(u, dtype=float)
    x = ua / f.gamma
    out = np.full(ua.shape, np.inf)
    ok = x < 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        val = (f.shift * ua - f.xi * np.log1p(-x) + f.zeta * ua / (1.0 - x))
        out[ok] = np.exp(val[ok])
    return out if out.ndim else float(out)


def _poisson_weights(lam):
    if lam == 0.0:
        return np.array([0]), np.array([1.0])
    sd = math.sqrt(lam)
    k_lo = max(0, int(lam - 12.0 * sd - 10))
    k_hi = int(lam + 12.0 * sd + 40)
    ks = np.arange(k_lo, k_hi + 1)
    logw = -lam + ks * math.log(lam) - np.array([math.lgamma(k + 1.0) for k in ks])
    w = np.exp(logw)
    keep = w > POISSON_EPS * w.max()
    return ks[keep], w[keep] / w[keep].sum()


def _positive_cell_stats(xi, g, lam, edges):
    """Mass and first moment of the reflected (positive) factor on the cells
    between consecutive nonnegative ``edges``."""
    ks, w = _poisson_weights(lam)
    shape = xi + ks[:, None]
    ge = g * np.asarray(edges)[None, :]
    cdf0 = gammainc(shape, ge)
    cdf1 = gammainc(shape + 1.0, ge)
    mass = w @ np.diff(cdf0, axis=1)
    mom = (w * (xi + ks) / g) @ np.diff(cdf1, axis=1)
    return mass, mom


def factor_upper(f: BesselFactor) -> float:
    """Point beyond which the reflected factor has negligible mass."""
    ks, _ = _poisson_weights(f.poisson_rate)
    s = f.xi + ks.max()
    return (s + 6.0 * math.sqrt(s) + TAIL_EPS_LOG) / abs(f.gamma)


def factor_lattice(f: BesselFactor, h: float):
    """Mass of ``shift + Y`` put on the lattice ``k h`` by linear binning
    (preserves mass and mean). Returns ``(k0, pmf)``."""
    lo_y, hi_y = (0.0, factor_upper(f)) if f.sign > 0 else (-factor_upper(f), 0.0)
    j0 = math.floor((lo_y + f.shift) / h)
    j1 = math.ceil((hi_y + f.shift) / h)
    nodes = np.arange(j0, j1 + 1) * h
    edges_y = np.clip(nodes - f.shift, lo_y, hi_y)
    if f.sign > 0:
        mass, mom = _positive_cell_stats(f.xi, f.gamma, f.poisson_rate, edges_y)
    else:
        m, mo = _positive_cell_stats(f.xi, -f.gamma, f.poisson_rate, -edges_y[::-1])
        mass, mom = m[::-1], -mo[::-1]
    mom_x = mom + f.shift * mass  # first moment of shift + Y per cell
    frac_hi = np.zeros_like(mass)
    nz = mass > 0
    frac_hi[nz] = np.clip((mom_x[nz] / mass[nz] - nodes[:-1][nz]) / h, 0.0, 1.0)
    pmf = np.zeros(len(nodes))
    pmf[:-1] += mass * (1.0 - frac_hi)
    pmf[1:] += mass * frac_hi
    return j0, pmf


@dataclass(frozen=True, eq=False)
class DensityGrid:
    x0_grid: float
    h: float
    values: np.ndarray
    pre_mass: float | None = None
    warnings: tuple = field(default=())

    def __post_init__(self):
        if not self.h > 0:
            raise GridError("grid spacing must be > 0")

    @property
    def x(self) -> np.ndarray:
        return self.x0_grid + self.h * np.arange(len(self.values))

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.h))

    def mean(self) -> float:
        return float(np.trapezoid(self.x * self.values, dx=self.h)) / self.mass

    def variance(self) -> float:
        m = self.mean()
        return float(np.trapezoid((self.x - m) ** 2 * self.values, dx=self.h)) / self.mass

    def cdf(self) -> np.ndarray:
        v = self.values
        c = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * self.h)))
        return c


def _conv(f, g, method):
    if method == "direct":
        return direct_convolve(f, g)
    if method == "fft":
        return np.maximum(fftconvolve(f, g), 0.0)
    raise ValueError(f"unknown convolution method {method!r}")


def convolve(gs, method: str = "direct") -> DensityGrid:
    """Density of the sum of independent variables tabulated on grids with a
    common spacing (Riemann sum, equal to the trapezoid rule when the
    densities vanish at the grid ends)."""
    gs = list(gs)
    if not gs:
        raise GridError("nothing to convolve")
    h = gs[0].h
    for g in gs[1:]:
        if not math.isclose(g.h, h, rel_tol=1e-12):
            raise GridError(f"grid spacings differ: {h!r} vs {g.h!r}")
    out = gs[0]
    warnings = list(out.warnings)
    for g in gs[1:]:
        vals = h * _conv(out.values, g.values, method)
        new = DensityGrid(out.x0_grid + g.x0_grid, h, vals)
        expected = out.mass * g.mass
        if abs(new.mass - expected) > 1e-6:
            warnings.append(f"mass drift {new.mass - expected:.3g} in convolution step")
        out = new
    return DensityGrid(out.x0_grid, h, out.values, out.mass, tuple(warnings))


def _grid_axis(grid):
    xmin, xmax, npts = grid
    npts = int(npts)
    if npts < 2 or not xmax > xmin:
        raise GridError("grid must satisfy xmin < xmax and npts >= 2")
    return np.linspace(float(xmin), float(xmax), npts)


def factors_of(fact, n_factors: int):
    if n_factors < 1 or n_factors > fact.n_terms:
        raise DomainError(f"n_factors must lie in [1, {fact.n_terms}]")
    return [BesselFactor(fact.xi, float(a), float(g), float(c))
            for a, g, c in zip(fact.roots[:n_factors], fact.g_coef[:n_factors],
                               fact.c_shift[:n_factors])]


def approx_law(ctx: EvalContext, fact, n_factors: int, grid, h: float | None = None,
               method: str = "direct") -> DensityGrid:
    """Density of ``d + sum_{j <= n} (c_j + Y_j)`` tabulated on ``grid =
    (xmin, xmax, npts)``; approximates the law of X_t."""
    xs = _grid_axis(grid)
    factors = factors_of(fact, n_factors)
    sd = math.sqrt(sum(f.variance() for f in factors))
    if h is None:
        h = min(xs[1] - xs[0], sd / LATTICE_PTS_PER_SD)
    # narrow factors first keeps the running convolution short
    factors.sort(key=lambda f: factor_upper(f))
    k0, pmf = 0, np.array([1.0])
    for f in factors:
        j0, p = factor_lattice(f, h)
        pmf = _conv(pmf, p, method)
        k0 += j0
        # trim negligible ends to bound the cost of later steps
        nz = np.nonzero(pmf > 1e-300)[0]
        pmf = pmf[nz[0]:nz[-1] + 1]
        k0 += int(nz[0])
    lattice_x = fact.d_shift + (k0 + np.arange(len(pmf))) * h
    dens = np.interp(xs, lattice_x, pmf / h, left=0.0, right=0.0)
    warnings = []
    total = float(pmf.sum())
    if abs(total - 1.0) > 1e-6:
        warnings.append(f"lattice mass {total:.12g}")
    out = DensityGrid(xs[0], xs[1] - xs[0], dens, total, tuple(warnings))
    return out


# ---------------------------------------------------------------------------
# Fourier inversion reference
# ---------------------------------------------------------------------------


def _cf_cutoff(ctx: EvalContext, centre: float):
    U = 1.0
    while U < CF_U_CAP:
        probe = U * np.array([1.0, 1.25, 1.5, 1.75, 2.0])
        if np.all(np.abs(charfn_new(ctx, probe)) < CF_CUTOFF):
            return U, True
        U *= 2.0
    return CF_U_CAP, False


def _gl_integral(ctx, U, panels, xc, nodes, weights, centre):
    edges = np.linspace(0.0, U, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    u = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    psi = charfn_new(ctx, u) * np.exp(-1j * u * centre) * w
    out = np.empty(len(xc))
    chunk = max(1, int(4e6 // max(len(u), 1)))
    for s in range(0, len(xc), chunk):
        ph = np.exp(-1j * np.outer(xc[s:s + chunk], u))
        out[s:s + chunk] = (ph @ psi).real
    return out / math.pi


def reference_density(ctx: EvalContext, grid, tol: float = 1e-10) -> DensityGrid:
    """Density of X_t by cosine inversion of the characteristic function,
    composite Gauss-Legendre with panel doubling until two passes agree."""
    xs = _grid_axis(grid)
    centre = mean_log_spot(ctx)
    xc = xs - centre
    U, ok = _cf_cutoff(ctx, centre)
    warnings = [] if ok else [f"|phi(U)| above {CF_CUTOFF:g} at cutoff U={U:g}"]
    nodes, weights = np.polynomial.legendre.leggauss(GL_NODES)
    span = max(float(np.max(np.abs(xc))), 1e-3)
    panels = max(8, int(math.ceil(U * span / 4.0)))
    prev = _gl_integral(ctx, U, panels, xc, nodes, weights, centre)
    for _ in range(8):
        panels *= 2
        cur = _gl_integral(ctx, U, panels, xc, nodes, weights, centre)
        if np.max(np.abs(cur - prev)) < tol:
            prev = cur
            break
        prev = cur
    else:
        warnings.append("panel doubling did not settle")
    return DensityGrid(xs[0], xs[1] - xs[0], prev, None, tuple(warnings))


def l1_distance(g1: DensityGrid, g2: DensityGrid) -> float:
    if len(g1.values) != len(g2.values) or not math.isclose(g1.h, g2.h):
        raise GridError("grids differ")
    return float(np.trapezoid(np.abs(g1.values - g2.values), dx=g1.h))


def cdf_distance(g1: DensityGrid, g2: DensityGrid) -> float:
    if len(g1.values) != len(g2.values) or not math.isclose(g1.h, g2.h):
        raise GridError("grids differ")
    return float(np.max(np.abs(g1.cdf() - g2.cdf())))


__all__ = [
    "BesselFactor", "DensityGrid", "factor_density", "factor_mgf", "convolve",
    "approx_law", "reference_density", "factor_lattice", "l1_distance", "cdf_distance",
]
