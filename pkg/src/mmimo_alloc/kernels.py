"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the pure-Python
module is. Set ``MMIMO_ALLOC_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKENDS = {"python": _kernels_py}

try:
    from . import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None
else:
    BACKENDS["cython"] = _kernels_c

if _kernels_c is not None and os.environ.get("MMIMO_ALLOC_PURE_PYTHON", "") in ("", "0"):
    backend = _kernels_c
    BACKEND_NAME = "cython"
else:
    backend = _kernels_py
    BACKEND_NAME = "python"


def get_backend(name=None):
    """Return the kernel module ``name`` (``"cython"`` or ``"python"``), default the active one."""
    if name is None:
        return backend
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} not available; have {sorted(BACKENDS)}") from None
