"""Select the DRESS kernel at import: compiled core if built, else pure Python.

Set ``WL_LADDER_BACKEND=python`` to force the fallback (``compiled`` makes a
missing extension an import error).
"""
from __future__ import annotations

import os

from . import _pykernel

_choice = os.environ.get("WL_LADDER_BACKEND", "auto").lower()

if _choice == "python":
    kernel = _pykernel
    BACKEND = "python"
else:
    try:
        from . import _ckernel as kernel  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _choice == "compiled":
            raise
        kernel = _pykernel
        BACKEND = "python"

KERNELS = {"python": _pykernel}
if BACKEND == "compiled":
    KERNELS["compiled"] = kernel


def get_kernel(name: str | None = None):
    if name is None:
        return kernel
    try:
        return KERNELS[name]
    except KeyError:
        raise ValueError(f"kernel {name!r} not available; have {sorted(KERNELS)}") from None
