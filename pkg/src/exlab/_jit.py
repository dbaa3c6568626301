"""
Numba switch.

Set ``EXLAB_DISABLE_JIT=1`` to run every hot kernel through its pure-numpy
fallback instead (useful for debugging and for the benchmark comparison).
If numba cannot be imported the fallback is used automatically.
"""

import os

_FLAG = os.environ.get("EXLAB_DISABLE_JIT", "").strip().lower()
JIT_REQUESTED = _FLAG not in ("1", "true", "yes", "on")

try:
    from numba import njit as _numba_njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _numba_njit = None
    HAVE_NUMBA = False

JIT_ENABLED = JIT_REQUESTED and HAVE_NUMBA


def njit(func=None, **kwargs):
    """``numba.njit`` when numba is available, identity otherwise.

    Unlike the module-level selection, this always compiles if numba is
    importable, so the benchmark can time both paths in one process.
    """
    if not HAVE_NUMBA:
        if func is not None:
            return func
        return lambda f: f
    kwargs.setdefault("cache", True)
    if func is not None:
        return _numba_njit(**kwargs)(func)
    return _numba_njit(**kwargs)
