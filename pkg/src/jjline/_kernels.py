"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set JJLINE_PURE_PYTHON=1 (any value other than empty or "0") to force the
fallback; the equivalence tests and the benchmark use this to pin a side.
"""

import os

if os.environ.get("JJLINE_PURE_PYTHON", "").strip() not in ("", "0"):
    from . import _purepy as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _purepy as _impl

IMPL_NAME = _impl.IMPL_NAME
chain_transfer_grid = _impl.chain_transfer_grid
steady_concurrence_batch = _impl.steady_concurrence_batch
