"""Pick the kernel implementation at import time.

The compiled extension is preferred; set ``QBORN_PURE_PYTHON=1`` to force
the numpy fallback (the benchmark and the cross-backend tests do this).
"""
import logging
import os

from . import _kernels_py

logger = logging.getLogger(__name__)


def _load_compiled():
    try:
        from . import _kernels
    except ImportError:
        logger.debug("compiled kernels unavailable, using numpy fallback")
        return None
    return _kernels


compiled = _load_compiled()
python = _kernels_py

if compiled is not None and os.environ.get("QBORN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    kernels = compiled
else:
    kernels = python

BACKEND = kernels.IMPLEMENTATION


def available():
    """Names of the importable backends, compiled first."""
    return [k.IMPLEMENTATION for k in (compiled, python) if k is not None]


def get(name=None):
    if name is None:
        return kernels
    if name == "cython" and compiled is not None:
        return compiled
    if name == "python":
        return python
    raise ValueError(f"kernel backend {name!r} is not available")
