"""Optional numba acceleration.

Set ``HESTONLAW_DISABLE_NUMBA=1`` to force the pure numpy/Python code paths
(useful for debugging and for benchmarking both variants).
"""
import os

_FLAG = os.environ.get("HESTONLAW_DISABLE_NUMBA", "").strip().lower()

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

NUMBA_ENABLED = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def maybe_njit(fn):
    """``numba.njit(cache=True)`` when acceleration is enabled, identity otherwise."""
    if NUMBA_ENABLED:
        return numba.njit(cache=True)(fn)
    return fn


def njit_or_none(fn):
    """Compile ``fn`` if numba is importable (regardless of the env flag).

    Used for kernels that have a separate vectorised numpy twin, so tests and
    benchmarks can always reach both implementations.
    """
    if HAVE_NUMBA:
        return numba.njit(cache=True)(fn)
    return None
