"""Backend selection for the sparse series product.

The compiled extension ``_ckernel`` is used when it imports and the inputs
fit its fixed-width layout (64-bit packed keys, int64 coefficients).  Any
other case, including int64 overflow detected mid-product, runs the
pure-Python implementation.  Set ``COBORD_KERNEL=python`` to force the
fallback.
"""
from __future__ import annotations

import os

from . import _pykernel

EXP_BITS = 8
MAX_WEIGHT = (1 << (EXP_BITS - 1)) - 1
_C_MAX_VARS = 6  # 6 * 8 key bits + 16 bits of flat index
_C_MAX_FLAT = 1 << 16

try:
    if os.environ.get("COBORD_KERNEL", "").lower() == "python":
        raise ImportError("compiled kernel disabled by COBORD_KERNEL")
    from . import _ckernel
except ImportError:  # pragma: no cover - depends on build
    _ckernel = None

BACKEND = "compiled" if _ckernel is not None else "python"


def pack(exps) -> int:
    key = 0
    for k, e in enumerate(exps):
        key |= e << (EXP_BITS * k)
    return key


def unpack(key: int, nvars: int) -> tuple:
    mask = (1 << EXP_BITS) - 1
    return tuple((key >> (EXP_BITS * k)) & mask for k in range(nvars))


def mul_terms(a, b, max_weight, table, nvars, backend=None):
    """Dispatch to the compiled or Python product; see ``_pykernel.mul_terms``."""
    if max_weight > MAX_WEIGHT:
        raise ValueError(f"truncation order {max_weight} exceeds {MAX_WEIGHT}")
    use = backend or BACKEND
    if (
        use == "compiled"
        and _ckernel is not None
        and nvars <= _C_MAX_VARS
        and table.nflat <= _C_MAX_FLAT
        and a
        and b
    ):
        try:
            return _ckernel.mul_terms(a, b, max_weight, table.csr())
        except OverflowError:
            pass
    return _pykernel.mul_terms(a, b, max_weight, table)
