"""Backend selection for the hot kernels.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
pure-Python ``_pykernels`` module is used.  Setting ``TURANFORGE_PURE=1``
forces the fallback.  ``BACKEND`` names the active choice.
"""
from __future__ import annotations

import os

from . import _pykernels

_c = None
if not os.environ.get("TURANFORGE_PURE"):
    try:
        from . import _ckernels as _c  # type: ignore[no-redef]
    except ImportError:
        _c = None

_impl = _c if _c is not None else _pykernels
BACKEND = "cython" if _c is not None else "python"

triangles_per_vertex = _impl.triangles_per_vertex
c4_count = _impl.c4_count
c4_count_within = _impl.c4_count_within
first_pair_codegree = _impl.first_pair_codegree
search_subtree = _impl.search_subtree

TRI, CYC, KST, BOOK = _pykernels.TRI, _pykernels.CYC, _pykernels.KST, _pykernels.BOOK


def backends():
    """Map of available backend name -> module (for benchmarks and tests)."""
    out = {"python": _pykernels}
    if _c is not None:
        out["cython"] = _c
    else:
        try:
            from . import _ckernels
            out["cython"] = _ckernels
        except ImportError:
            pass
    return out
