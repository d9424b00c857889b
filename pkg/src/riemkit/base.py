"""Common surface of every Riemannian manifold in the package.

A manifold object owns its metric: it exposes ``exp``, ``log``, ``dist``,
``inner_product`` and tangent projection, and derives norms, geodesics and
orthonormal tangent bases from those.  Argument order follows the
``(tangent_vec, base_point)`` / ``(point, base_point)`` convention.
"""
from dataclasses import dataclass
from typing import Any, NamedTuple

import numpy as np

from riemkit.errors import BaseMismatchError, NotOnManifoldError
from riemkit.numerics import DEFAULT_TOL, TolerancePolicy


class Tangent(NamedTuple):
    """A tangent vector together with its base point."""

    vector: Any
    base: Any


def _same_point(a, b, atol):
    if hasattr(a, "matrix"):
        a, b = a.matrix(), b.matrix()
    a, b = np.asarray(a), np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


@dataclass(frozen=True)
class GeodesicCurve:
    """``t -> exp_p(t v)``; with the endpoint form ``curve(1)`` is the endpoint."""

    manifold: Any
    initial_point: Any
    initial_tangent: Any

    def __call__(self, t):
        if np.ndim(t) == 0:
            return self.manifold.exp(float(t) * self.initial_tangent, self.initial_point)
        points = [self(ti) for ti in np.asarray(t, dtype=float)]
        if points and isinstance(points[0], np.ndarray):
            return np.stack(points)
        return points

    def sample(self, n_points):
        return self(np.linspace(0.0, 1.0, n_points))


class Manifold:
    """Base class; subclasses implement the metric primitives."""

    #: shape of the arrays representing tangent vectors in the ambient space
    ambient_shape: tuple = ()
    dim: int = 0

    def __init__(self, tol: TolerancePolicy = DEFAULT_TOL):
        self.tol = tol

    # -- primitives provided by subclasses ---------------------------------
    def belongs(self, point) -> bool:
        raise NotImplementedError

    def exp(self, tangent_vec, base_point):
        raise NotImplementedError

    def log(self, point, base_point):
        raise NotImplementedError

    def inner_product(self, tangent_a, tangent_b, base_point):
        raise NotImplementedError

    def to_tangent(self, vector, base_point):
        raise NotImplementedError

    def egrad_to_rgrad(self, egrad, base_point):
        """Riemannian gradient from the Euclidean gradient in ambient coordinates."""
        raise NotImplementedError

    # -- derived operations -------------------------------------------------
    def check_point(self, point):
        if not self.belongs(point):
            raise NotOnManifoldError(f"point does not belong to {self!r}")
        return point

    def squared_norm(self, tangent_vec, base_point):
        return self.inner_product(tangent_vec, tangent_vec, base_point)

    def norm(self, tangent_vec, base_point):
        return np.sqrt(np.maximum(self.squared_norm(tangent_vec, base_point), 0.0))

    def dist(self, point_a, point_b):
        return self.norm(self.log(point_b, point_a), point_a)

    def squared_dist(self, point_a, point_b):
        return self.dist(point_a, point_b) ** 2

    def inner(self, a: Tangent, b: Tangent):
        """Inner product of two based tangent vectors; bases must coincide."""
        if not _same_point(a.base, b.base, self.tol.atol):
            raise BaseMismatchError("tangent vectors live at different base points")
        return self.inner_product(a.vector, b.vector, a.base)

    def geodesic(self, initial_point, end_point=None, initial_tangent_vec=None):
        if (end_point is None) == (initial_tangent_vec is None):
            raise ValueError("give exactly one of end_point or initial_tangent_vec")
        if end_point is not None:
            initial_tangent_vec = self.log(end_point, initial_point)
        return GeodesicCurve(self, initial_point, initial_tangent_vec)

    def tangent_basis(self, base_point):
        """Metric-orthonormal basis of the tangent space at ``base_point``.

        Coordinate directions of the ambient space are projected to the
        tangent space and orthonormalised by Gram-Schmidt in the metric.
        """
        basis = []
        size = int(np.prod(self.ambient_shape))
        for k in range(size):
            e = np.zeros(size)
            e[k] = 1.0
            t = self.to_tangent(e.reshape(self.ambient_shape), base_point)
            for _ in range(2):
                for b in basis:
                    t = t - self.inner_product(b, t, base_point) * b
            n = self.norm(t, base_point)
            if n > 1e-8:
                basis.append(t / n)
            if len(basis) == self.dim:
                break
        return basis

    def coordinates(self, tangent_vec, basis, base_point):
        return np.array([self.inner_product(b, tangent_vec, base_point) for b in basis])


class Euclidean(Manifold):
    """Flat space R^n: exp and log are addition and subtraction."""

    def __init__(self, dim, tol: TolerancePolicy = DEFAULT_TOL):
        super().__init__(tol)
        self.dim = dim
        self.ambient_shape = (dim,)

    def __repr__(self):
        return f"Euclidean({self.dim})"

    def belongs(self, point):
        point = np.asarray(point)
        return point.shape[-1:] == (self.dim,) and bool(np.all(np.isfinite(point)))

    def exp(self, tangent_vec, base_point):
        return np.asarray(base_point, dtype=float) + tangent_vec

    def log(self, point, base_point):
        return np.asarray(point, dtype=float) - base_point

    def dist(self, point_a, point_b):
        return np.linalg.norm(np.asarray(point_b, dtype=float) - point_a, axis=-1)

    def inner_product(self, tangent_a, tangent_b, base_point):
        return np.sum(np.asarray(tangent_a) * tangent_b, axis=-1)

    def to_tangent(self, vector, base_point):
        return np.asarray(vector, dtype=float)

    def egrad_to_rgrad(self, egrad, base_point):
        return np.asarray(egrad, dtype=float)
