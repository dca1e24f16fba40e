"""Backend selection for the hot theta-series loops.

Set ``AMPLETHETA_DISABLE_NUMBA=1`` to force the pure-numpy path.
``AMPLETHETA_NUM_THREADS`` optionally caps numba's thread pool.
"""

from __future__ import annotations

import os

_DISABLE = os.environ.get("AMPLETHETA_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLE:
        raise ImportError("numba disabled by environment")
    import numba

    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False

if HAS_NUMBA and os.environ.get("AMPLETHETA_NUM_THREADS"):
    numba.set_num_threads(int(os.environ["AMPLETHETA_NUM_THREADS"]))


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAS_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend() -> str:
    return "numba" if HAS_NUMBA else "numpy"
