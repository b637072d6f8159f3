"""Backend selection for the hot tree kernels.

Set ``PPFS_BACKEND=numpy`` to force the pure-numpy fallback, or
``PPFS_BACKEND=numba`` to require the jit backend (raising if numba is not
importable). The default ``auto`` prefers numba and falls back silently.
Both backends produce bit-identical trees; see benchmarks/bench_backends.py
for the speed comparison.
"""

from __future__ import annotations

import os

BACKEND_ENV = "PPFS_BACKEND"

_requested = os.environ.get(BACKEND_ENV, "auto").strip().lower()
if _requested not in ("auto", "numba", "numpy"):
    raise ValueError(f"{BACKEND_ENV} must be auto, numba or numpy, got {_requested!r}")

if _requested == "numpy":
    from . import _kernels_np as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels_nb as _impl

        BACKEND = "numba"
    except ImportError:
        if _requested == "numba":
            raise
        from . import _kernels_np as _impl

        BACKEND = "numpy"

grow_classifier = _impl.grow_classifier
grow_regressor = _impl.grow_regressor
apply_tree = _impl.apply_tree


def warmup() -> str:
    """Run each kernel once on tiny inputs (triggers jit compilation)."""
    import numpy as np

    X = np.ascontiguousarray(np.linspace(0.0, 1.0, 16).reshape(8, 2))
    yc = np.array([0, 1] * 4, dtype=np.int64)
    yr = X[:, 0] * 2.0
    out = grow_classifier(X, yc, 2, 4, 2, 1)
    apply_tree(out[0], out[1], out[2], out[3], X)
    out = grow_regressor(X, yr, 4, 2, 1)
    apply_tree(out[0], out[1], out[2], out[3], X)
    return BACKEND
