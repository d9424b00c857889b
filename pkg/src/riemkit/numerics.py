"""Dense linear-algebra kernels shared by every manifold, and the tolerance policy.

Matrix functions are computed through the real symmetric eigendecomposition;
all inputs in scope are symmetric (SPD geometry) or 3-vectors standing for
skew matrices (rotations).
"""
from dataclasses import dataclass

import numpy as np

from riemkit import kernels
from riemkit.errors import InvalidInputError, NotPositiveDefiniteError


@dataclass(frozen=True)
class TolerancePolicy:
    """Tolerances used for membership tests and series switch-over.

    Attributes
    ----------
    atol : float
        Absolute tolerance for membership and symmetry checks.
    rtol : float
        Relative tolerance for comparisons of derived quantities.
    taylor_threshold : float
        Angle (or argument) below which series expansions replace closed forms.
    """

    atol: float = 1e-8
    rtol: float = 1e-5
    taylor_threshold: float = 1e-6

    def __post_init__(self):
        for name in ("atol", "rtol", "taylor_threshold"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be strictly positive, got {value!r}")


DEFAULT_TOL = TolerancePolicy()


def symmetrize(m, atol=DEFAULT_TOL.atol):
    """Return ``(M + M^T) / 2``, refusing matrices that are far from symmetric."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix has non-finite entries")
    asym = np.max(np.abs(m - m.T)) if m.size else 0.0
    if asym > atol:
        raise InvalidInputError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    return 0.5 * (m + m.T)


def _spd_eigh(s, atol):
    vals, vecs = np.linalg.eigh(symmetrize(s, atol))
    if vals[0] <= atol:
        raise NotPositiveDefiniteError(f"smallest eigenvalue {vals[0]:.3g} is not above {atol:g}")
    return vals, vecs


def _apply(vecs, vals):
    return (vecs * vals) @ vecs.T


def sym_expm(m, atol=DEFAULT_TOL.atol):
    """Matrix exponential of a symmetric matrix; the result is SPD."""
    vals, vecs = np.linalg.eigh(symmetrize(m, atol))
    return _apply(vecs, np.exp(vals))


def sym_logm(s, atol=DEFAULT_TOL.atol):
    """Principal matrix logarithm of an SPD matrix."""
    vals, vecs = _spd_eigh(s, atol)
    return _apply(vecs, np.log(vals))


def spd_sqrt_inv_sqrt(s, atol=DEFAULT_TOL.atol):
    """Return ``(S^{1/2}, S^{-1/2})`` from a single eigendecomposition."""
    vals, vecs = _spd_eigh(s, atol)
    root = np.sqrt(vals)
    return _apply(vecs, root), _apply(vecs, 1.0 / root)


def skew(w):
    """3-vector to the skew matrix ``[w]_x`` with ``[w]_x y = w x y``."""
    x, y, z = w
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(k):
    return np.array([k[2, 1], k[0, 2], k[1, 0]])


def skew_expm_3(w, taylor_threshold=DEFAULT_TOL.taylor_threshold):
    """Rotation matrix ``exp([w]_x)`` by the Rodrigues formula."""
    w = np.asarray(w, dtype=float)
    if w.shape != (3,) or not np.all(np.isfinite(w)):
        raise InvalidInputError("expected a finite 3-vector")
    return kernels.rodrigues(w[None, :], taylor_threshold)[0]
