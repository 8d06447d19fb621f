"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
fallback. Set ``SUBSUP_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("SUBSUP_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

SUBMODULAR = _pykernels.SUBMODULAR
POSIMODULAR = _pykernels.POSIMODULAR

subset_sums = _impl.subset_sums
marginal_table = _impl.marginal_table
marginal_entropy = _impl.marginal_entropy
pair_violations = _impl.pair_violations
diminishing_returns_violations = _impl.diminishing_returns_violations
symmetry_violations = _impl.symmetry_violations


def backends():
    """Return ``{name: module}`` for every importable backend."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
