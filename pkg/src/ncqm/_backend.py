"""Kernel selection.

The compiled extension is used when it imports; set ``NCQM_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
kernels = _pykernels

if not os.environ.get("NCQM_PURE_PYTHON"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        kernels = _compiled
        BACKEND = "cython"


def available_backends():
    """Return a mapping of backend name to kernel module, fallback first."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        return out
    out["cython"] = _ckernels
    return out
