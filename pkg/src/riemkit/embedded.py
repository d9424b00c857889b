"""The hypersphere S^n and the hyperbolic space H^n in extrinsic coordinates.

Both accept single points of shape ``(n+1,)`` or batches of shape
``(N, n+1)``; batched exp/log/dist go through :mod:`riemkit.kernels`.
"""
import numpy as np

from riemkit import kernels
from riemkit.base import Manifold
from riemkit.errors import (
    CutLocusError,
    DimensionMismatchError,
    NotOnManifoldError,
    OutOfChartError,
    ProjectionError,
)
from riemkit.numerics import DEFAULT_TOL, TolerancePolicy


def _batch(x, width):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != width or x.ndim not in (1, 2):
        raise DimensionMismatchError(f"expected shape (..., {width}), got {x.shape}")
    return np.atleast_2d(x), x.ndim == 1


def _pair(a, b, width):
    a2, single_a = _batch(a, width)
    b2, single_b = _batch(b, width)
    if a2.shape[0] != b2.shape[0]:
        a2, b2 = np.broadcast_arrays(a2, b2)
    return a2, b2, single_a and single_b


def _unbatch(x, single):
    return x[0] if single else x


def minkowski_inner(x, y):
    """Minkowski form ``-x0 y0 + x1 y1 + ... + xn yn`` over the last axis."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return -x[..., 0] * y[..., 0] + np.sum(x[..., 1:] * y[..., 1:], axis=-1)


class Hypersphere(Manifold):
    """Unit sphere S^n in R^{n+1} with the metric induced by the embedding."""

    def __init__(self, dim, tol: TolerancePolicy = DEFAULT_TOL):
        super().__init__(tol)
        self.dim = dim
        self.ambient_shape = (dim + 1,)

    def __repr__(self):
        return f"Hypersphere({self.dim})"

    def belongs(self, point):
        point = np.asarray(point, dtype=float)
        if point.shape[-1:] != self.ambient_shape:
            return False
        ok = np.abs(np.linalg.norm(point, axis=-1) - 1.0) <= self.tol.atol
        return bool(ok) if ok.ndim == 0 else ok

    def random_uniform(self, rng, n_samples=None):
        shape = self.ambient_shape if n_samples is None else (n_samples,) + self.ambient_shape
        x = rng.standard_normal(shape)
        return x / np.linalg.norm(x, axis=-1, keepdims=True)

    # -- charts and projections ------------------------------------------------
    def intrinsic_to_extrinsic(self, coords):
        """Orthogonal-projection chart around the pole ``(0, ..., 0, 1)``."""
        u, single = _batch(coords, self.dim)
        sq = np.sum(u * u, axis=1)
        if np.any(sq >= 1.0):
            raise OutOfChartError("intrinsic coordinates must have norm < 1")
        return _unbatch(np.hstack([u, np.sqrt(1.0 - sq)[:, None]]), single)

    def extrinsic_to_intrinsic(self, point):
        x, single = _batch(point, self.dim + 1)
        if not np.all(self.belongs(x)):
            raise NotOnManifoldError("point is not on the sphere")
        if np.any(x[:, -1] <= 0):
            raise OutOfChartError("point is outside the upper-hemisphere chart")
        return _unbatch(x[:, :-1].copy(), single)

    def projection(self, vector):
        y = np.asarray(vector, dtype=float)
        n = np.linalg.norm(y, axis=-1, keepdims=True)
        if np.any(n <= self.tol.atol):
            raise ProjectionError("cannot project a vector this close to zero onto the sphere")
        return y / n

    def to_tangent(self, vector, base_point):
        w = np.asarray(vector, dtype=float)
        p = np.asarray(base_point, dtype=float)
        return w - np.sum(w * p, axis=-1, keepdims=True) * p

    egrad_to_rgrad = to_tangent

    # -- metric ------------------------------------------------------------------
    def inner_product(self, tangent_a, tangent_b, base_point):
        return np.sum(np.asarray(tangent_a) * tangent_b, axis=-1)

    def exp(self, tangent_vec, base_point):
        p, v, single = _pair(base_point, tangent_vec, self.dim + 1)
        return _unbatch(kernels.sphere_exp(p, v, self.tol.taylor_threshold), single)

    def log(self, point, base_point):
        p, q, single = _pair(base_point, point, self.dim + 1)
        if np.any(np.linalg.norm(p + q, axis=1) <= self.tol.atol):
            raise CutLocusError("antipodal points: the logarithm direction is undefined")
        return _unbatch(kernels.sphere_log(p, q, self.tol.taylor_threshold), single)

    def dist(self, point_a, point_b):
        a, b, single = _pair(point_a, point_b, self.dim + 1)
        return _unbatch(kernels.sphere_dist(a, b), single)


class HyperbolicSpace(Manifold):
    """Upper sheet of the hyperboloid ``<x, x>_M = -1`` in Minkowski space R^{1,n}.

    Component 0 is the time coordinate.  Membership allows a roundoff slack
    proportional to ``1 + |x|^2``, since the Minkowski form of a far-out
    point is a difference of two large squares.
    """

    def __init__(self, dim, tol: TolerancePolicy = DEFAULT_TOL):
        super().__init__(tol)
        self.dim = dim
        self.ambient_shape = (dim + 1,)

    def __repr__(self):
        return f"HyperbolicSpace({self.dim})"

    @property
    def origin(self):
        x = np.zeros(self.dim + 1)
        x[0] = 1.0
        return x

    def belongs(self, point):
        x = np.asarray(point, dtype=float)
        if x.shape[-1:] != self.ambient_shape:
            return False
        slack = self.tol.atol * (1.0 + np.sum(x * x, axis=-1))
        ok = (np.abs(minkowski_inner(x, x) + 1.0) <= slack) & (x[..., 0] > 0)
        return bool(ok) if ok.ndim == 0 else ok

    def random_point(self, rng, n_samples=None, max_radius=2.0):
        """Points ``exp_o(v)`` with ``|v|`` uniform in ``[0, max_radius]``."""
        count = 1 if n_samples is None else n_samples
        direction = rng.standard_normal((count, self.dim))
        direction /= np.linalg.norm(direction, axis=1, keepdims=True)
        r = rng.uniform(0.0, max_radius, size=(count, 1))
        v = np.hstack([np.zeros((count, 1)), r * direction])
        pts = self.exp(v, np.broadcast_to(self.origin, v.shape))
        return pts[0] if n_samples is None else pts

    # -- charts and projections ------------------------------------------------
    def intrinsic_to_extrinsic(self, coords):
        u, single = _batch(coords, self.dim)
        x0 = np.sqrt(1.0 + np.sum(u * u, axis=1))
        return _unbatch(np.hstack([x0[:, None], u]), single)

    def extrinsic_to_intrinsic(self, point):
        x, single = _batch(point, self.dim + 1)
        if not np.all(self.belongs(x)):
            raise NotOnManifoldError("point is not on the hyperboloid")
        return _unbatch(x[:, 1:].copy(), single)

    def projection(self, vector):
        """Keep the spatial part and recompute the time coordinate."""
        y = np.asarray(vector, dtype=float)
        return self.intrinsic_to_extrinsic(y[..., 1:])

    def to_tangent(self, vector, base_point):
        w = np.asarray(vector, dtype=float)
        p = np.asarray(base_point, dtype=float)
        return w + minkowski_inner(w, p)[..., None] * p

    def egrad_to_rgrad(self, egrad, base_point):
        g = np.array(egrad, dtype=float)
        g[..., 0] = -g[..., 0]
        return self.to_tangent(g, base_point)

    def to_poincare_disk(self, point):
        x = np.asarray(point, dtype=float)
        return x[..., 1:] / (1.0 + x[..., :1])

    def from_poincare_disk(self, disk_point):
        y = np.asarray(disk_point, dtype=float)
        sq = np.sum(y * y, axis=-1, keepdims=True)
        if np.any(sq >= 1.0):
            raise OutOfChartError("Poincare disk points must have norm < 1")
        return np.concatenate([1.0 + sq, 2.0 * y], axis=-1) / (1.0 - sq)

    # -- metric ------------------------------------------------------------------
    def inner_product(self, tangent_a, tangent_b, base_point):
        return minkowski_inner(tangent_a, tangent_b)

    def _check_pair(self, p, q):
        if np.any(-np.einsum("ij,ij->i", p[:, 1:], q[:, 1:]) + p[:, 0] * q[:, 0] < 1.0 - self.tol.atol):
            raise NotOnManifoldError("points are not on the upper hyperboloid sheet")

    def exp(self, tangent_vec, base_point):
        p, v, single = _pair(base_point, tangent_vec, self.dim + 1)
        return _unbatch(kernels.hyperbolic_exp(p, v, self.tol.taylor_threshold), single)

    def log(self, point, base_point):
        p, q, single = _pair(base_point, point, self.dim + 1)
        self._check_pair(p, q)
        return _unbatch(kernels.hyperbolic_log(p, q, self.tol.taylor_threshold), single)

    def dist(self, point_a, point_b):
        a, b, single = _pair(point_a, point_b, self.dim + 1)
        self._check_pair(a, b)
        return _unbatch(kernels.hyperbolic_dist(a, b), single)
