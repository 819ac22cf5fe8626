"""Walk-step kernels: compiled extension when available, numpy fallback.

Set NANDWALK_PURE=1 to force the numpy backend (useful for benchmarking
and for debugging the extension against the reference implementation).
"""

import os

from nandwalk.kernels import _numpy

try:
    from nandwalk.kernels import _core
except ImportError:  # extension not built on this interpreter
    _core = None

if _core is not None and os.environ.get("NANDWALK_PURE", "") != "1":
    _active = _core
else:
    _active = _numpy

BACKEND = _active.BACKEND
coined_step = _active.coined_step
coined_step_batch = _active.coined_step_batch


def available_backends():
    """Name -> module map of importable backends."""
    out = {"python": _numpy}
    if _core is not None:
        out["compiled"] = _core
    return out
