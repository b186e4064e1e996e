import math

import numpy as np
import pytest

from hestonlaw import kernels
from hestonlaw._accel import HAVE_NUMBA
from hestonlaw.charfn import mgf
from hestonlaw.errors import ParameterError
from hestonlaw.oracle import BLOCK_PATHS, GENERATOR, McConfig, Scheme, mc_mgf, n_steps, simulate_terminal

from conftest import EXAMPLE, make_ctx


def test_config_validation():
    McConfig(paths=1, steps_per_unit_time=16, seed=0)
    with pytest.raises(ParameterError):
        McConfig(paths=0)
    with pytest.raises(ParameterError):
        McConfig(steps_per_unit_time=8)
    with pytest.raises(ParameterError):
        McConfig(seed=-1)
    assert McConfig(scheme="full_truncation_euler").scheme is Scheme.FULL_TRUNCATION_EULER


def test_steps_scale_with_horizon():
    assert n_steps(make_ctx(**EXAMPLE, t=2.5), McConfig(steps_per_unit_time=256)) == 640


def test_degenerate_zero_variance():
    # b = 0 itself is not a valid model, so the limit is checked on the kernel
    z = np.random.default_rng(1).standard_normal((256, 2, 1000))
    x, v = kernels.euler_block(math.log(1.7), 0.0, 1.0, 0.0, 0.5, -0.3, 1 / 256, z)
    assert np.all(x == math.log(1.7)) and np.all(v == 0.0)


def test_determinism_and_meta():
    ctx = make_ctx(**EXAMPLE)
    mc = McConfig(paths=BLOCK_PATHS + 100, steps_per_unit_time=32, seed=5)
    a = simulate_terminal(ctx, mc)
    b = simulate_terminal(ctx, mc)
    assert np.array_equal(a.x, b.x) and len(a.x) == BLOCK_PATHS + 100
    assert a.meta["generator"] == GENERATOR and a.meta["seed"] == 5
    c = simulate_terminal(ctx, McConfig(paths=1000, steps_per_unit_time=32, seed=6))
    assert not np.array_equal(a.x[:1000], c.x)


@pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")
def test_kernels_give_identical_samples():
    ctx = make_ctx(**EXAMPLE, v0=0.04)
    mc = McConfig(paths=3000, steps_per_unit_time=64, seed=9)
    a = simulate_terminal(ctx, mc, kernels.euler_block_numba)
    b = simulate_terminal(ctx, mc, kernels.euler_block_numpy)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.v, b.v)


def test_martingale_and_variance_mean():
    ctx = make_ctx(**EXAMPLE, v0=0.04, s0=1.3)
    mc = McConfig(paths=200_000, steps_per_unit_time=128, seed=21)
    s = simulate_terminal(ctx, mc)
    (m1, se), (m0, se0) = mc_mgf(ctx, mc, [1.0, 0.0], s)
    assert (m0, se0) == (1.0, 0.0)
    assert abs(m1 - 1.3) < 3 * se
    ev = ctx.b + (ctx.v0 - ctx.b) * math.exp(-ctx.a * ctx.t)
    assert abs(s.v.mean() - ev) < 3 * s.v.std(ddof=1) / math.sqrt(len(s.v))
    assert np.all(s.v >= 0)


def test_oracle_brackets_mgf():
    ctx = make_ctx(**EXAMPLE)
    mc = McConfig(paths=200_000, steps_per_unit_time=256, seed=33)
    for u, (est, se) in zip((-0.5, 0.5, 2.0), mc_mgf(ctx, mc, (-0.5, 0.5, 2.0))):
        assert abs(est - mgf(ctx, u)) < 3 * se


def test_bias_shrinks_with_steps():
    # coarse steps on a strongly mean-reverting, high vol-of-vol set
    ctx = make_ctx(a=4.0, b=0.09, c=1.5, rho=-0.8, v0=0.09, t=1.0)
    exact = mgf(ctx, 2.0)
    errs = []
    for steps in (16, 64):
        mc = McConfig(paths=100_000, steps_per_unit_time=steps, seed=77)
        (est, _), = mc_mgf(ctx, mc, [2.0])
        errs.append(abs(est - exact))
    assert errs[1] < errs[0]
