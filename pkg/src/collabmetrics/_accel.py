"""Backend selection for the compiled kernels.

Set ``COLLABMETRICS_DISABLE_NUMBA=1`` to force the pure-numpy path.  When
numba is not importable the numpy path is used regardless of the flag.
"""
import os

DISABLE_FLAG = "COLLABMETRICS_DISABLE_NUMBA"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None


def _flag_set(value):
    return value.strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = HAVE_NUMBA and not _flag_set(os.environ.get(DISABLE_FLAG, ""))

# fastmath stays off: both backends must agree bit-for-bit.
njit_kwargs = {
    "nogil": True,
    "fastmath": False,
    "parallel": False,
    "cache": True,
}


def njit(fn):
    """Compile ``fn`` with numba if available, else return it unchanged."""
    if numba is None:
        return fn
    return numba.njit(**njit_kwargs)(fn)


def backend_name():
    return "numba" if USE_NUMBA else "numpy"
