"""Hot-loop dispatch: compiled Cython kernels when built, numpy otherwise.

Set ``DSE_PURE_PYTHON=1`` before import to force the numpy fallback.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("DSE_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        _impl = _ckernels
        BACKEND = "cython"


def sq_distances(X, C):
    """Squared Euclidean distance matrix of shape (len(X), len(C))."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    return _impl.sq_distances(X, C)


def kendall_counts(x, y):
    """(concordant, discordant, tied) pair counts over all i < j."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    return _impl.kendall_counts(x, y)


def use_backend(name):
    """Switch backend at runtime; used by the benchmark and parity tests."""
    global _impl, BACKEND
    if name == "python":
        _impl, BACKEND = _pykernels, "python"
    elif name == "cython":
        from . import _ckernels
        _impl, BACKEND = _ckernels, "cython"
    else:
        raise ValueError(f"unknown backend {name!r}")
