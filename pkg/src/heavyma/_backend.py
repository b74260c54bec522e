"""Backend selection for the hot kernels.

Numba is used when it imports cleanly unless ``HEAVYMA_NO_NUMBA`` is set to a
non-empty value other than ``0``.  The pure-numpy kernels are always
importable and produce the same numbers.
"""
from __future__ import annotations

import os

_flag = os.environ.get("HEAVYMA_NO_NUMBA", "").strip().lower()
NUMBA_DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba  # noqa: F401

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED
