"""Optional numba acceleration.

Kernels in :mod:`fracsemigroup._kernels` exist twice: a compiled loop version
and a vectorized numpy version.  The compiled path is used when numba imports
cleanly and ``FRACSEMIGROUP_NO_NUMBA`` is unset (or ``0``).
"""
import os

_DISABLED = os.environ.get("FRACSEMIGROUP_NO_NUMBA", "0").lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("numba disabled by FRACSEMIGROUP_NO_NUMBA")
    from numba import njit as _njit

    USING_NUMBA = True

    def jit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        kwargs.setdefault("fastmath", False)
        return _njit(*args, **kwargs)

except ImportError:
    USING_NUMBA = False

    def jit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


def backend():
    return "numba" if USING_NUMBA else "numpy"
