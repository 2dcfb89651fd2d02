"""Backend selection for the special-function core.

The compiled extension is preferred when present; setting the environment
variable ``PAULI2D_PURE_PYTHON=1`` forces the pure-Python fallback (used by
the benchmark and the backend-agreement tests).
"""

from __future__ import annotations

import os

if os.environ.get("PAULI2D_PURE_PYTHON"):
    from pauli2d import _kernels_py as core

    BACKEND = "python"
else:
    try:
        from pauli2d import _kernels as core  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from pauli2d import _kernels_py as core  # type: ignore[no-redef]

        BACKEND = "python"

SeriesError = core.SeriesError
