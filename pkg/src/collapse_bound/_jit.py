"""Switch between numba-compiled kernels and the pure numpy/python path.

Set ``COLLAPSE_BOUND_NUMBA=0`` before import to force the fallback path.
"""
import os

_flag = os.environ.get("COLLAPSE_BOUND_NUMBA", "1").strip().lower()

try:
    import numba
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    numba = None

USE_NUMBA = numba is not None and _flag not in ("0", "false", "no", "off")


def njit(func=None, **kwargs):
    """``numba.njit`` with caching, or a no-op when the fallback is selected."""
    kwargs.setdefault("cache", True)

    def wrap(f):
        if USE_NUMBA:
            return numba.njit(**kwargs)(f)
        return f

    if callable(func):
        return wrap(func)
    return wrap


def backend():
    return "numba" if USE_NUMBA else "numpy"
