"""Kernel backend selection.

Hot loops (the RK4 steppers and the Jacobi eigensolver) exist twice: a numba
``@njit`` version and a plain numpy version. The numba path is used when numba
imports cleanly and ``TWOATOM_BACKEND`` is not set to ``numpy``.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

BACKENDS = ("numba", "numpy")

_env = os.environ.get("TWOATOM_BACKEND", "numba").strip().lower()
if _env not in BACKENDS:
    raise ImportError(f"TWOATOM_BACKEND must be one of {BACKENDS}, got {_env!r}")

_active = _env if numba is not None else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` with on-disk caching; identity decorator when numba is missing."""
    if numba is None:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def get_backend():
    return _active


def set_backend(name):
    """Switch backend at runtime. Returns the previous backend name."""
    global _active
    name = name.lower()
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and numba is None:
        raise RuntimeError("numba is not installed")
    previous, _active = _active, name
    return previous


def use_numba():
    return _active == "numba"
