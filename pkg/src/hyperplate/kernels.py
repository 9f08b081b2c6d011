"""Element kernel selection: compiled extension when built, numpy otherwise.

Set ``HYPERPLATE_PURE_PYTHON=1`` to force the numpy implementation.
"""
import os

from . import _kernels_py

if os.environ.get("HYPERPLATE_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"
element_system = _impl.element_system
stress_contraction = _impl.stress_contraction
