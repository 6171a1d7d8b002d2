"""Select the compiled kernel extension, falling back to NumPy.

Set ANNPAIR_BACKEND=python (or =compiled) to force a choice; "compiled"
raises if the extension is missing instead of silently degrading.
"""

from __future__ import annotations

import os

from . import _kernels_py

_requested = os.environ.get("ANNPAIR_BACKEND", "auto").lower()

if _requested == "python":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = _kernels_py
        BACKEND = "python"

cos_series_eval = _impl.cos_series_eval
cubic_interp = _impl.cubic_interp
fused_sq_mass = _impl.fused_sq_mass
