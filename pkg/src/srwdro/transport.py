"""Kernel selection for the exact transportation solver.

The compiled extension is preferred when available; the pure-python twin
is the fallback and can be forced with ``SRWDRO_PURE_PYTHON=1`` (useful
for the kernel benchmark and for debugging).
"""

import os

if os.environ.get("SRWDRO_PURE_PYTHON"):
    from ._transport_py import solve_transport
    KERNEL = "python"
else:
    try:
        from ._speedups import solve_transport  # type: ignore[no-redef]
        KERNEL = "compiled"
    except ImportError:
        from ._transport_py import solve_transport  # type: ignore[no-redef]
        KERNEL = "python"


def kernel_name() -> str:
    """Which transport kernel is active: 'compiled' or 'python'."""
    return KERNEL


__all__ = ["solve_transport", "kernel_name", "KERNEL"]
