"""Optional numba acceleration.

Every hot kernel in this package is written as a plain Python function over
numpy arrays and passed through :func:`njit_or_python`.  With numba installed
and ``ISO_GIRP_NUMBA`` unset (or set to a truthy value) the kernel is compiled
with ``numba.njit(cache=True)``; otherwise the pure-Python function is used
unchanged.  Both paths execute the same statements, so results are identical
up to floating-point determinism.

Set ``ISO_GIRP_NUMBA=0`` to force the pure-Python fallback.
"""

import os

_OFF_VALUES = ("0", "false", "off", "no")


def _resolve_numba():
    flag = os.environ.get("ISO_GIRP_NUMBA", "1").strip().lower()
    if flag in _OFF_VALUES:
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


NUMBA_ENABLED = _resolve_numba()


def njit_or_python(fn):
    """Compile ``fn`` with numba when enabled, else return it untouched.

    The returned callable always exposes the original Python function as
    ``.py_func`` so tests can exercise the fallback path directly.
    """
    if NUMBA_ENABLED:
        import numba

        return numba.njit(cache=True)(fn)
    fn.py_func = fn
    return fn
