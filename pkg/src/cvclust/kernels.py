"""Kernel backend selection: compiled extension if built, numpy otherwise.

Set ``CVCLUST_PURE_PYTHON=1`` to force the numpy fallback (used by the
kernel parity tests and the backend comparison benchmark).
"""

from __future__ import annotations

import os

if os.environ.get("CVCLUST_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

weighted_same_label_lsc = _impl.weighted_same_label_lsc
kth_same_label_lsc = _impl.kth_same_label_lsc
label_pair_lsc_sums = _impl.label_pair_lsc_sums

__all__ = [
    "BACKEND",
    "weighted_same_label_lsc",
    "kth_same_label_lsc",
    "label_pair_lsc_sums",
]
