"""Kernel backend selection.

Prefers the compiled extension, falls back to the pure-Python loops.
Set ETSEEK_PURE=1 to force the fallback (benchmarks and debugging).
"""

from __future__ import annotations

import os

if os.environ.get("ETSEEK_PURE"):
    from etseek import _kernel as kernel
else:
    try:
        from etseek import _ckernel as kernel  # type: ignore[no-redef]
    except ImportError:
        from etseek import _kernel as kernel  # type: ignore[no-redef]


def backend_name() -> str:
    """Name of the active stepping backend: 'compiled' or 'pure'."""
    return kernel.BACKEND
