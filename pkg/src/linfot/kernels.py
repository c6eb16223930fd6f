"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or when
``LINFOT_PURE_PYTHON=1`` is set, the numpy fallback in ``_pykernels`` is used.
Both expose the same functions with identical outputs.
"""
import os

from . import _pykernels

KERNEL_NAMES = ("band_ranges", "greedy_random_start", "augment_matching", "band_max", "infcm_violation")

_compiled = None
if os.environ.get("LINFOT_PURE_PYTHON") != "1":
    try:
        from . import _ckernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_impl = _compiled if _compiled is not None else _pykernels

band_ranges = _impl.band_ranges
greedy_random_start = _impl.greedy_random_start
augment_matching = _impl.augment_matching
band_max = _impl.band_max
infcm_violation = _impl.infcm_violation


def backends():
    """Mapping of available backend name to module, for benchmarks and cross-checks."""
    out = {"python": _pykernels}
    if _compiled is not None:
        out["cython"] = _compiled
    return out
