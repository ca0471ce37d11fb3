"""JIT wiring for the solver kernels.

The hot kernels in :mod:`stableflow._kernels` are written in a
nopython-compatible style and compiled with numba when available.  Setting
``STABLEFLOW_NUMBA=0`` selects the pure-Python/numpy fallback (the same
source, interpreted); this is read once at import time.
``benchmarks/bench_solvers.py`` compares the two paths.
"""

import os


def _numba_requested() -> bool:
    return os.environ.get("STABLEFLOW_NUMBA", "1") not in ("0", "false", "off")


NUMBA_ENABLED = False

if _numba_requested():
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    def jit_kernel(func):
        return _njit(cache=True)(func)
else:
    def jit_kernel(func):
        return func
