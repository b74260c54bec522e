"""Dispatch to the numba or numpy kernel backend.

Set ``HEAVYMA_NO_NUMBA=1`` before import to force the numpy backend.
"""
from __future__ import annotations

from heavyma import _kernels_numpy as numpy_backend
from heavyma._backend import NUMBA_AVAILABLE, USE_NUMBA

if NUMBA_AVAILABLE:
    from heavyma import _kernels_numba as numba_backend
else:  # pragma: no cover
    numba_backend = None

backend = numba_backend if USE_NUMBA else numpy_backend
BACKEND_NAME = "numba" if USE_NUMBA else "numpy"

ar1_filter = backend.ar1_filter
ma_filter = backend.ma_filter
covers = backend.covers
hausdorff_bisect = backend.hausdorff_bisect
oscillation_candidates = backend.oscillation_candidates
