"""Backend selection for the closure kernels.

The compiled extension (``mdinterp._ckernels``, built from Cython) is used
when it imported cleanly; otherwise the numpy implementation takes over.
Set ``MDI_PURE_PYTHON=1`` to force the numpy backend, e.g. for the
benchmark in ``benchmarks/bench_kernels.py`` or when debugging.

Both backends expose ``heading_table``, ``closure_residuals``,
``closure_jacobian`` and ``lagrangian_hessian`` with identical semantics.
"""

from __future__ import annotations

import os

from . import _kernels_py

_impl = _kernels_py
if os.environ.get("MDI_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

BACKEND: str = _impl.BACKEND

heading_table = _impl.heading_table
closure_residuals = _impl.closure_residuals
closure_jacobian = _impl.closure_jacobian
lagrangian_hessian = _impl.lagrangian_hessian


def get_backends():
    """All available backends as (name, module) pairs, compiled first."""
    out = []
    if _impl is not _kernels_py:
        out.append((_impl.BACKEND, _impl))
    out.append((_kernels_py.BACKEND, _kernels_py))
    return out
