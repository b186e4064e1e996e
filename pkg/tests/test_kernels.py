import os
import subprocess
import sys

import numpy as np
import pytest

from hestonlaw import kernels
from hestonlaw._accel import HAVE_NUMBA

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


def test_f_scaled_matches_scalar_recipe():
    u = np.linspace(-20, 60, 801)
    vec = kernels.f_scaled_numpy(u, 2.0, 0.8, -0.9, 1.0)
    ref = np.array([kernels._f_scaled_py(x, 2.0, 0.8, -0.9, 1.0) for x in u])
    np.testing.assert_allclose(vec, ref, rtol=1e-13, atol=1e-15)


@needs_numba
def test_bisection_backends_agree():
    lo = np.array([30.0, -4.0])
    hi = np.array([38.0, -3.0])
    args = (2.0, 0.8, -0.9, 1.0)
    a = kernels.bisect_f_numba(lo, hi, *args)
    b = kernels.bisect_f_numpy(lo, hi, *args)
    np.testing.assert_allclose(a, b, rtol=1e-12)
    np.testing.assert_allclose(a, [37.4286176, -3.2144080], atol=1e-6)


@needs_numba
def test_euler_backends_bit_identical():
    rng = np.random.default_rng(3)
    z = rng.standard_normal((64, 2, 500))
    args = (0.1, 0.04, 2.0, 0.04, 0.9, -0.7, 1 / 64)
    xa, va = kernels.euler_block_numba(*args, z)
    xb, vb = kernels.euler_block_numpy(*args, z)
    assert np.array_equal(xa, xb) and np.array_equal(va, vb)


def test_euler_full_truncation_survives_negative_variance():
    # Feller badly violated: the auxiliary variance goes negative but the
    # floored value drives both terms, so nothing turns into nan
    z = np.random.default_rng(1).standard_normal((256, 2, 2000))
    x, v = kernels.euler_block_numpy(0.0, 0.04, 0.5, 0.04, 2.0, -0.5, 1 / 256, z)
    assert np.any(v < 0) and np.all(np.isfinite(x)) and np.all(np.isfinite(v))


@needs_numba
def test_convolution_backends_agree():
    rng = np.random.default_rng(0)
    f, g = rng.random(300), rng.random(77)
    np.testing.assert_allclose(kernels.direct_convolve_numba(f, g),
                               kernels.direct_convolve_numpy(f, g), rtol=1e-12)


def test_env_flag_selects_numpy_backend():
    env = dict(os.environ, HESTONLAW_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c",
                          "from hestonlaw import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_default_backend():
    assert kernels.BACKEND == ("numba" if HAVE_NUMBA and
                               os.environ.get("HESTONLAW_DISABLE_NUMBA", "") != "1" else "numpy")
