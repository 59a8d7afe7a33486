"""Backend selection for the evaluation kernels.

The numba backend is used when available; setting the environment variable
``ORDMNAR_NO_NUMBA`` to 1/true/yes forces the pure-numpy reference path.
``BACKEND`` records which one is active.
"""

from __future__ import annotations

import os

_flag = os.environ.get("ORDMNAR_NO_NUMBA", "").strip().lower()
if _flag in {"1", "true", "yes", "on"}:
    from . import reference as _impl

    BACKEND = "numpy"
else:
    try:
        from . import jit as _impl

        BACKEND = "numba"
    except ImportError:
        from . import reference as _impl

        BACKEND = "numpy"

po_loglik = _impl.po_loglik
po_derivs = _impl.po_derivs
logit_loglik = _impl.logit_loglik
logit_derivs = _impl.logit_derivs
estep_weights = _impl.estep_weights
obs_loglik = _impl.obs_loglik

__all__ = [
    "BACKEND",
    "po_loglik",
    "po_derivs",
    "logit_loglik",
    "logit_derivs",
    "estep_weights",
    "obs_loglik",
]
