"""Kernel backend selection.

The compiled extension is used when it imports; set IBLT_PURE_PYTHON=1 to
force the pure-Python fallback.
"""
import os

BACKEND = "python"
if os.environ.get("IBLT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels_c as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        from . import _kernels_py as _impl
else:
    from . import _kernels_py as _impl

apply_at = _impl.apply_at
permute = _impl.permute
tensor_apply = _impl.tensor_apply
sym_homotopy = _impl.sym_homotopy
project_below = _impl.project_below
sym_homotopy_t = _impl.sym_homotopy_t
reorder_sign = _impl.reorder_sign

__all__ = ["BACKEND", "apply_at", "permute", "tensor_apply", "sym_homotopy", "sym_homotopy_t",
           "project_below", "reorder_sign"]
