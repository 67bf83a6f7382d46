"""Select the compiled loop-counting kernel when it is built, else the Python one.

Set ``PNORMLAB_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _loops_py

try:
    from . import _loops as _compiled
except ImportError:  # extension not built
    _compiled = None

_BACKENDS = {"python": _loops_py.loop_counts}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled.loop_counts

if os.environ.get("PNORMLAB_PURE_PYTHON") or _compiled is None:
    BACKEND = "python"
else:
    BACKEND = "cython"


def available_backends():
    return sorted(_BACKENDS)


def get_loop_counts(backend=None):
    name = BACKEND if backend is None else backend
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {available_backends()}") from None


loop_counts = _BACKENDS[BACKEND]
