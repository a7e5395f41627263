"""Backend selection for the sparse polynomial kernels.

The compiled extension is preferred when it imported cleanly; set
``DIVQUAD_PURE_PYTHON=1`` to force the numpy fallback (used by the
benchmark and by CI environments without a C toolchain).
"""

import os

from . import _poly_py

if os.environ.get("DIVQUAD_PURE_PYTHON", "") not in ("", "0"):
    _impl = _poly_py
else:
    try:
        from . import _poly_core as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _poly_py

BACKEND = _impl.BACKEND
merge_terms = _impl.merge_terms
mul_terms = _impl.mul_terms
eval_terms = _impl.eval_terms
