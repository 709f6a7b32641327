"""Backend selection for the bitmask kernels.

The compiled extension is used when it imports; otherwise, or when the
``MWMSR_PURE_PYTHON`` environment variable is set to a non-empty value, the
pure-Python module is used.  Both expose the same five functions.
"""

import os
from types import ModuleType

from mwmsr import _pykernels

# Hitting-set masks travel through a signed 64-bit return value.
HIT_BITS = 62
TABLE_BITS = 63


def _load_compiled() -> ModuleType | None:
    try:
        from mwmsr import _ckernels
    except ImportError:
        return None
    return _ckernels


_compiled = _load_compiled()

if _compiled is not None and not os.environ.get("MWMSR_PURE_PYTHON"):
    backend: ModuleType = _compiled
    BACKEND = "compiled"
else:
    backend = _pykernels
    BACKEND = "python"


def available_backends() -> dict[str, ModuleType]:
    found = {"python": _pykernels}
    if _compiled is not None:
        found["compiled"] = _compiled
    return found


def min_hitting_set(masks, limit):
    if masks and max(masks).bit_length() > HIT_BITS:
        return _pykernels.min_hitting_set(masks, limit)
    return backend.min_hitting_set(masks, limit)


def longest_prefix_within(masks, limit):
    if masks and max(masks).bit_length() > HIT_BITS:
        return _pykernels.longest_prefix_within(masks, limit)
    return backend.longest_prefix_within(masks, limit)


def max_disjoint(masks, cap):
    if masks and max(masks).bit_length() > TABLE_BITS:
        return _pykernels.max_disjoint(masks, cap)
    return backend.max_disjoint(masks, cap)


def z_table(m, dest_paths, r):
    return backend.z_table(m, dest_paths, r)


def first_violation(table, m, s):
    return backend.first_violation(table, m, s)
