"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is loaded.  Set ``MACROCOLUMN_KERNELS=python`` to force the
fallback (the benchmark script uses this to compare the two).
"""

import os

_choice = os.environ.get("MACROCOLUMN_KERNELS", "auto").lower()

if _choice == "python":
    from . import _kernels_py as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _choice == "cython":
            raise
        from . import _kernels_py as _impl

BACKEND = _impl.BACKEND
column_potentials = _impl.column_potentials
scan_minicolumn = _impl.scan_minicolumn
capture_segment = _impl.capture_segment
segment_committed = _impl.segment_committed


def load(name: str):
    """Return the kernel module named ``"python"`` or ``"cython"``."""
    if name == "python":
        from . import _kernels_py
        return _kernels_py
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown kernel backend {name!r}")
