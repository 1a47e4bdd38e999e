"""Numeric hot-loop kernels with a numba backend and a pure-numpy fallback.

The backend is chosen once at import time from the ``FEATRANK_BACKEND``
environment variable: ``numba`` (default) or ``numpy``.  If numba is
requested but cannot be imported, the numpy fallback is used silently.
Both backends expose the same functions and agree numerically up to float
summation order; ``benchmarks/bench_kernels.py`` compares their speed.
"""

from __future__ import annotations

import os

_requested = os.environ.get("FEATRANK_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(
        f"FEATRANK_BACKEND must be 'numba' or 'numpy', got {_requested!r}"
    )

if _requested == "numba":
    try:
        from ._numba_impl import (cd_weighted_lasso, relieff_weights,
                                  spike_slab_feature_pass)
        BACKEND = "numba"
    except ImportError:
        from ._numpy_impl import (cd_weighted_lasso, relieff_weights,
                                  spike_slab_feature_pass)
        BACKEND = "numpy"
else:
    from ._numpy_impl import (cd_weighted_lasso, relieff_weights,
                              spike_slab_feature_pass)
    BACKEND = "numpy"

__all__ = [
    "BACKEND",
    "cd_weighted_lasso",
    "relieff_weights",
    "spike_slab_feature_pass",
]
