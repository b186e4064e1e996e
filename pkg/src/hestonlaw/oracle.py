"""Monte Carlo ground truth: full-truncation Euler paths of (X, V)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .errors import ParameterError
from .params import EvalContext

BLOCK_PATHS = 8192
GENERATOR = "numpy.random.SFC64"


class Scheme(str, Enum):
    FULL_TRUNCATION_EULER = "full_truncation_euler"


@dataclass(frozen=True)
class McConfig:
    paths: int = 1_000_000
    steps_per_unit_time: int = 256
    seed: int = 20240101
    scheme: Scheme = Scheme.FULL_TRUNCATION_EULER

    def __post_init__(self):
        if int(self.paths) < 1:
            raise ParameterError("paths", "must be >= 1")
        if int(self.steps_per_unit_time) < 16:
            raise ParameterError("steps_per_unit_time", "must be >= 16")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed", "must be a 64-bit unsigned integer")
        object.__setattr__(self, "scheme", Scheme(self.scheme))


@dataclass(frozen=True, eq=False)
class McSample:
    x: np.ndarray
    v: np.ndarray
    meta: dict = field(default_factory=dict)


def n_steps(ctx: EvalContext, mc: McConfig) -> int:
    return max(1, math.ceil(mc.steps_per_unit_time * ctx.t - 1e-9))


def block_normals(seed_seq: np.random.SeedSequence, nsteps: int, npaths: int) -> np.ndarray:
    """Gaussian increments for one block, shape (steps, 2, paths)."""
    rng = np.random.Generator(np.random.SFC64(seed_seq))
    return rng.standard_normal((nsteps, 2, npaths))


def simulate_terminal(ctx: EvalContext, mc: McConfig, kernel=None) -> McSample:
    """Terminal (X_t, V_t) for ``mc.paths`` paths.

    Paths are split into blocks of ``BLOCK_PATHS``; block ``i`` draws from
    the ``i``-th child of ``SeedSequence(seed)``, so results are reproducible
    and independent of the kernel used.
    """
    kernel = kernel or kernels.euler_block
    steps = n_steps(ctx, mc)
    dt = ctx.t / steps
    n_blocks = -(-int(mc.paths) // BLOCK_PATHS)
    children = np.random.SeedSequence(int(mc.seed)).spawn(n_blocks)
    xs, vs = [], []
    left = int(mc.paths)
    for child in children:
        m = min(BLOCK_PATHS, left)
        left -= m
        z = block_normals(child, steps, m)
        x, v = kernel(ctx.x0, ctx.v0, ctx.a, ctx.b, ctx.c, ctx.rho, dt, z)
        xs.append(x)
        vs.append(np.maximum(v, 0.0))  # the auxiliary variance may dip below zero
    meta = {"generator": GENERATOR, "numpy": np.__version__, "scheme": mc.scheme.value,
            "steps": steps, "block_paths": BLOCK_PATHS, "seed": int(mc.seed),
            "kernel": getattr(kernel, "__name__", str(kernel))}
    return McSample(np.concatenate(xs), np.concatenate(vs), meta)


def mc_mgf(ctx: EvalContext, mc: McConfig, u_list, sample: McSample | None = None):
    """``[(estimate, standard_error), ...]`` for E[exp(u X_t)]."""
    sample = sample if sample is not None else simulate_terminal(ctx, mc)
    out = []
    for u in u_list:
        u = float(u)
        if u == 0.0:
            out.append((1.0, 0.0))
            continue
        y = np.exp(u * sample.x)
        se = float(np.std(y, ddof=1) / math.sqrt(len(y))) if len(y) > 1 else math.inf
        out.append((float(np.mean(y)), se))
    return out
