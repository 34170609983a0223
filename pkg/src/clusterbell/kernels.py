"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the numpy
implementations take over. Set ``CLUSTERBELL_PURE_PYTHON=1`` to force the
fallback (the test-suite runs both).
"""

import os

if os.environ.get("CLUSTERBELL_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        from . import _pykernels as _impl

BACKEND = _impl.BACKEND
apply_pauli = _impl.apply_pauli
expectation_pure = _impl.expectation_pure
expectation_mixed = _impl.expectation_mixed
stabilizer_scan = _impl.stabilizer_scan
lhv_scan = _impl.lhv_scan

__all__ = [
    "BACKEND",
    "apply_pauli",
    "expectation_pure",
    "expectation_mixed",
    "stabilizer_scan",
    "lhv_scan",
]
