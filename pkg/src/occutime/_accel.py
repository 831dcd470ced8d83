"""Numba acceleration switch.

Hot kernels are compiled with numba unless OCCUTIME_NO_NUMBA is set (or
numba is not importable), in which case the pure-numpy fallbacks in
`kernels` take over.  Both paths compute the same quantities; the flag
only trades speed.  `benchmarks/bench_kernels.py` compares them.
"""

import os

USE_NUMBA = os.environ.get("OCCUTIME_NO_NUMBA", "").strip().lower() not in (
    "1",
    "true",
    "yes",
)

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay robust
        USE_NUMBA = False

if not USE_NUMBA:

    def njit(*args, **kwargs):
        """Pass-through decorator so @njit(...) works without numba."""
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap
