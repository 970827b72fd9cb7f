"""Hot-kernel backend selection.

Imports the compiled extension when it is available, otherwise falls back to
the numpy implementations.  Override with QVEIL_KERNELS=python|compiled.
"""
from __future__ import annotations

import os

from . import _fallback

_requested = os.environ.get("QVEIL_KERNELS", "").lower()

if _requested == "python":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "QVEIL_KERNELS=compiled but the extension is not built; "
                "run pip install -e . first"
            ) from None
        _impl = _fallback
        BACKEND = "python"

apply_1q = _impl.apply_1q
apply_cx = _impl.apply_cx
apply_cz = _impl.apply_cz
eval_poly_batch = _impl.eval_poly_batch


def backends() -> dict[str, object]:
    """All importable kernel modules, keyed by name (for parity tests/benchmarks)."""
    found = {"python": _fallback}
    try:
        from . import _core
        found["compiled"] = _core
    except ImportError:
        pass
    return found
