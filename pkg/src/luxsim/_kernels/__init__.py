"""Hot-kernel dispatch: compiled extension when available, pure Python otherwise.

Set ``LUXSIM_PURE=1`` to force the pure implementation (used by the kernel
benchmark and the equivalence tests).
"""

import os

from . import pure

if os.environ.get("LUXSIM_PURE"):
    _impl = pure
else:
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = pure

IMPLEMENTATION: str = _impl.IMPLEMENTATION
regrow_wood = _impl.regrow_wood
water_fill = _impl.water_fill
diagonal_run_count = _impl.diagonal_run_count
