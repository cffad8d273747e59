"""Kernel backend selection.

The compiled Cython extension is preferred; the NumPy fallback is
behaviorally identical.  Override with TRUNCARX_KERNEL=python or
TRUNCARX_KERNEL=cython (the latter raises if the extension is
missing).
"""

from __future__ import annotations

import os

_requested = os.environ.get("TRUNCARX_KERNEL", "auto")
if _requested not in ("auto", "cython", "python"):
    raise RuntimeError(
        f"TRUNCARX_KERNEL must be auto, cython, or python, got {_requested!r}"
    )

if _requested == "python":
    from . import fallback as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]
    except ImportError:
        if _requested == "cython":
            raise
        from . import fallback as _impl

name: str = _impl.name
trunc_add = _impl.trunc_add
trunc_add_scan = _impl.trunc_add_scan
trunc_add_batch = _impl.trunc_add_batch
trunc_add_scan_batch = _impl.trunc_add_scan_batch
full_add_batch = _impl.full_add_batch
agreement_count = _impl.agreement_count
agreement_sample_count = _impl.agreement_sample_count
gen_words = _impl.gen_words
encrypt_batch = _impl.encrypt_batch
skein_match_counts = _impl.skein_match_counts


def available_backends() -> dict[str, object]:
    """All importable backends, keyed by name (for benchmarks/tests)."""
    from . import fallback

    out: dict[str, object] = {fallback.name: fallback}
    try:
        from . import _core

        out[_core.name] = _core
    except ImportError:
        pass
    return out
