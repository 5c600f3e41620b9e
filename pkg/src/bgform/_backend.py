"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
kernels are used. ``BGFORM_BACKEND=python`` forces the fallback.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

impl = _pykernels
name = "python"


def available_backends():
    return sorted(_BACKENDS)


def set_backend(backend):
    """Switch the active kernel module ("cython" or "python")."""
    global impl, name
    if backend not in _BACKENDS:
        raise ValueError(
            f"backend {backend!r} unavailable; choose from {available_backends()}"
        )
    impl = _BACKENDS[backend]
    name = backend


set_backend(
    "python"
    if os.environ.get("BGFORM_BACKEND") == "python" or _ckernels is None
    else "cython"
)
