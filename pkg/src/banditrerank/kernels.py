"""Backend dispatch for the per-instance hot-loop kernels.

Two interchangeable backends exist:

* ``banditrerank._kernels_c`` -- Cython extension, used when it was built;
* ``banditrerank._kernels_py`` -- pure NumPy fallback.

The choice is made once at import time.  Set the environment variable
``BANDITRERANK_KERNELS`` to ``c`` or ``python`` to force a backend
(``c`` raises if the extension is missing); the default ``auto`` prefers
the compiled backend.  ``BACKEND`` names the backend that won.
"""

from __future__ import annotations

import os

from . import _kernels_py


def _load(requested: str):
    if requested not in ("auto", "c", "python"):
        raise ValueError(
            f"BANDITRERANK_KERNELS must be 'auto', 'c' or 'python', got {requested!r}"
        )
    if requested == "python":
        return _kernels_py, "python"
    try:
        from . import _kernels_c
    except ImportError:
        if requested == "c":
            raise
        return _kernels_py, "python"
    return _kernels_c, "c"


_impl, BACKEND = _load(os.environ.get("BANDITRERANK_KERNELS", "auto"))

gibbs_probs = _impl.gibbs_probs
gibbs_stats = _impl.gibbs_stats
sample_index = _impl.sample_index
map_index = _impl.map_index
expected_update = _impl.expected_update


def available_backends() -> dict[str, object]:
    """Importable backend modules keyed by name (for tests and benchmarks)."""
    backends: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _kernels_c
    except ImportError:
        pass
    else:
        backends["c"] = _kernels_c
    return backends
