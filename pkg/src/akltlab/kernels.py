"""Matvec kernel dispatch.

The compiled extension (akltlab._kernels_c) is used when importable; otherwise
the NumPy kernel takes over.  Set AKLTLAB_KERNEL=python to force the fallback
or AKLTLAB_KERNEL=c to require the extension (ImportError if absent).

Both backends implement identical semantics with a fixed summation order, so
repeated runs on one backend are bit-for-bit reproducible; the two backends
may differ from each other by harmless last-bit rounding.
"""

import os

import numpy as np

from . import _kernels_np

_requested = os.environ.get("AKLTLAB_KERNEL", "auto").lower()
if _requested not in ("auto", "c", "python"):
    raise ValueError(
        f"AKLTLAB_KERNEL must be 'auto', 'c', or 'python', got {_requested!r}"
    )

backend_name = "python"
_impl = _kernels_np
if _requested in ("auto", "c"):
    try:
        from . import _kernels_c as _impl_c

        _impl = _impl_c
        backend_name = "c"
    except ImportError:
        if _requested == "c":
            raise


def apply_bbh(vec, n, bond, periodic):
    """Apply the BBH Hamiltonian to a vector using the active backend."""
    vec = np.ascontiguousarray(vec, dtype=np.float64)
    bond = np.ascontiguousarray(bond, dtype=np.float64)
    return _impl.apply_bbh(vec, n, bond, periodic)


def apply_bbh_python(vec, n, bond, periodic):
    """Apply via the NumPy kernel regardless of the active backend."""
    vec = np.ascontiguousarray(vec, dtype=np.float64)
    bond = np.ascontiguousarray(bond, dtype=np.float64)
    return _kernels_np.apply_bbh(vec, n, bond, periodic)
