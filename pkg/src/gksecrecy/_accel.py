"""Backend selection for the evaluation kernels.

The numba lane is used when numba imports cleanly; the pure-numpy lane is
the fallback and can be forced with the environment variable
GKSECRECY_NO_NUMBA=1 (read once at import time).
"""

from __future__ import annotations

import os

_FORCE_NUMPY = os.environ.get("GKSECRECY_NO_NUMBA", "").strip().lower() in {
    "1",
    "true",
    "yes",
    "on",
}

if _FORCE_NUMPY:
    from . import _kernels_numpy as kernels
else:
    try:
        from . import _kernels_numba as kernels  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_numpy as kernels  # type: ignore[no-redef]

BACKEND = kernels.BACKEND_NAME


def active_backend():
    """Name of the kernel lane selected at import time, "numba" or "numpy"."""
    return BACKEND
