"""Backend selection for the batched kernels.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` takes over.  Setting the
environment variable ``RIEMKIT_PURE_PYTHON=1`` forces the fallback.
"""
import os

import numpy as np

if os.environ.get("RIEMKIT_PURE_PYTHON", "") not in ("", "0"):
    from riemkit import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from riemkit import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        from riemkit import _kernels_py as _impl

        BACKEND = "python"


def _rows(x):
    return np.ascontiguousarray(x, dtype=np.float64)


def sphere_exp(base, tangent, taylor):
    return _impl.sphere_exp(_rows(base), _rows(tangent), taylor)


def sphere_log(base, point, taylor):
    return _impl.sphere_log(_rows(base), _rows(point), taylor)


def sphere_dist(a, b):
    return _impl.sphere_dist(_rows(a), _rows(b))


def hyperbolic_exp(base, tangent, taylor):
    return _impl.hyperbolic_exp(_rows(base), _rows(tangent), taylor)


def hyperbolic_log(base, point, taylor):
    return _impl.hyperbolic_log(_rows(base), _rows(point), taylor)


def hyperbolic_dist(a, b):
    return _impl.hyperbolic_dist(_rows(a), _rows(b))


def rodrigues(w, taylor):
    return _impl.rodrigues(_rows(w), taylor)


def so3_log(rot, taylor):
    return _impl.so3_log(_rows(rot), taylor)


def pairwise_frobenius(flat):
    return _impl.pairwise_frobenius(_rows(flat))


def pairwise_spd_riemannian(mats):
    return _impl.pairwise_spd_riemannian(_rows(mats))
