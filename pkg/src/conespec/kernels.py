"""Backend selection for the Sturm-sequence kernels.

The compiled extension is used when it imports; ``CONESPEC_PURE=1`` forces
the pure-Python fallback.
"""
import os

BACKEND = "python"

if os.environ.get("CONESPEC_PURE", "") not in ("", "0"):
    from ._sturm_py import bisect_lowest, sturm_count
else:
    try:
        from ._sturm import bisect_lowest, sturm_count

        BACKEND = "cython"
    except ImportError:  # extension not built
        from ._sturm_py import bisect_lowest, sturm_count

__all__ = ["BACKEND", "bisect_lowest", "sturm_count"]
