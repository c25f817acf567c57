"""Backend selection for the numeric hot loops.

The compiled module is used when it imports; setting SWOR_BOUNDS_PURE=1
forces the pure-Python implementation.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("SWOR_BOUNDS_PURE"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = backend.BACKEND
