"""Optional numba acceleration.

Kernels decorated with :func:`njit` are compiled with numba when it is
importable and ``FREEQUBIT_DISABLE_NUMBA`` is unset (or ``0``). Otherwise the
decorator is a no-op and the dispatching code in :mod:`freequbit.kernels`
routes calls to the pure-numpy implementations instead.
"""

import os

_FLAG = "FREEQUBIT_DISABLE_NUMBA"

try:
    import numba as _numba
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    _numba = None


def _flag_disabled():
    return os.environ.get(_FLAG, "0").strip().lower() not in ("", "0", "false", "no")


HAS_NUMBA = _numba is not None
USE_NUMBA = HAS_NUMBA and not _flag_disabled()


def njit(*args, **kwargs):
    """``numba.njit`` when acceleration is enabled, identity otherwise."""
    if not USE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn
    kwargs.setdefault("cache", True)
    if len(args) == 1 and callable(args[0]):
        return _numba.njit(**kwargs)(args[0])
    return _numba.njit(*args, **kwargs)


def backend():
    return "numba" if USE_NUMBA else "numpy"
