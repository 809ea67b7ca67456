"""Numba switch.

Set ``SORTNET_STEIN_NUMBA=0`` to force the pure-numpy kernels. When numba is
not importable the numpy path is used regardless.
"""

import os

_FLAG = os.environ.get("SORTNET_STEIN_NUMBA", "1").strip().lower()

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba = None

HAVE_NUMBA = _numba is not None
USE_NUMBA = HAVE_NUMBA and _FLAG not in ("0", "false", "no", "off")


def njit(*args, **kwargs):
    """``numba.njit`` when numba is installed, identity otherwise.

    The decorated function is always compiled lazily, so importing a kernel
    module never costs a compile even when the numpy path is active.
    """
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    return _numba.njit(*args, **kwargs)
