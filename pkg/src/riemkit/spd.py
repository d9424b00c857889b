"""Symmetric positive-definite matrices with the affine-invariant metric.

Also provides the log-Euclidean and Frobenius distances and batched
pairwise distance matrices for all three.
"""
import numpy as np

from riemkit import kernels
from riemkit.base import Manifold
from riemkit.errors import DimensionMismatchError, InvalidInputError, NotPositiveDefiniteError
from riemkit.numerics import (
    DEFAULT_TOL,
    TolerancePolicy,
    spd_sqrt_inv_sqrt,
    sym_expm,
    sym_logm,
)

METRICS = ("riemannian", "log_euclidean", "frobenius")


def _sym(m):
    return 0.5 * (m + np.swapaxes(m, -1, -2))


class SPDMatrices(Manifold):
    """The open cone of n x n SPD matrices."""

    def __init__(self, n, tol: TolerancePolicy = DEFAULT_TOL):
        super().__init__(tol)
        self.n = n
        self.dim = n * (n + 1) // 2
        self.ambient_shape = (n, n)

    def __repr__(self):
        return f"SPDMatrices({self.n})"

    def belongs(self, point):
        s = np.asarray(point, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise InvalidInputError(f"expected a square matrix, got shape {s.shape}")
        if s.shape != self.ambient_shape or not np.all(np.isfinite(s)):
            return False
        if np.max(np.abs(s - s.T)) > self.tol.atol:
            return False
        return bool(np.linalg.eigvalsh(_sym(s))[0] > self.tol.atol)

    def random_uniform(self, rng, bound=1.0, n_samples=None):
        """``sym_expm(W)`` with W symmetric, entries uniform in ``[-bound, bound]``."""
        if n_samples is not None:
            return np.stack([self.random_uniform(rng, bound) for _ in range(n_samples)])
        w = rng.uniform(-bound, bound, size=(self.n, self.n))
        w = np.triu(w) + np.triu(w, 1).T
        return sym_expm(w, self.tol.atol)

    def to_tangent(self, vector, base_point):
        return _sym(np.asarray(vector, dtype=float))

    def egrad_to_rgrad(self, egrad, base_point):
        s = np.asarray(base_point, dtype=float)
        return s @ _sym(np.asarray(egrad, dtype=float)) @ s

    def inner_product(self, tangent_a, tangent_b, base_point):
        s = np.asarray(base_point, dtype=float)
        a = np.linalg.solve(s, tangent_a)
        b = np.linalg.solve(s, tangent_b)
        return float(np.sum(a * b.T))

    def exp(self, tangent_vec, base_point):
        root, inv_root = spd_sqrt_inv_sqrt(base_point, self.tol.atol)
        inner = _sym(inv_root @ self.to_tangent(tangent_vec, base_point) @ inv_root)
        return _sym(root @ sym_expm(inner, np.inf) @ root)

    def log(self, point, base_point):
        root, inv_root = spd_sqrt_inv_sqrt(base_point, self.tol.atol)
        inner = _sym(inv_root @ np.asarray(point, dtype=float) @ inv_root)
        return _sym(root @ sym_logm(inner, self.tol.atol) @ root)

    def dist(self, point_a, point_b):
        return self.dist_riemannian(point_a, point_b)

    def dist_riemannian(self, point_a, point_b):
        """``|| log(A^{-1/2} B A^{-1/2}) ||_F``.

        The eigenvalues of the congruence are the squared singular values
        of ``A^{-1/2} B^{1/2}``, whose condition number is the square root of
        the congruence's, so small eigenvalues keep their relative accuracy.
        """
        _, inv_root = spd_sqrt_inv_sqrt(point_a, self.tol.atol)
        root_b, _ = spd_sqrt_inv_sqrt(point_b, self.tol.atol)
        sv = np.linalg.svd(inv_root @ root_b, compute_uv=False)
        return float(2.0 * np.linalg.norm(np.log(sv)))

    def dist_log_euclidean(self, point_a, point_b):
        la = sym_logm(point_a, self.tol.atol)
        lb = sym_logm(point_b, self.tol.atol)
        return float(np.linalg.norm(lb - la))

    def dist_frobenius(self, point_a, point_b):
        a = np.asarray(point_a, dtype=float)
        b = np.asarray(point_b, dtype=float)
        if a.shape != b.shape:
            raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
        return float(np.linalg.norm(b - a))

    def distance(self, point_a, point_b, metric="riemannian"):
        return {
            "riemannian": self.dist_riemannian,
            "log_euclidean": self.dist_log_euclidean,
            "frobenius": self.dist_frobenius,
        }[metric](point_a, point_b)

    def pairwise_distances(self, mats, metric="riemannian"):
        """Symmetric distance matrix with zero diagonal for a stack of SPD matrices."""
        if metric not in METRICS:
            raise InvalidInputError(f"unknown metric {metric!r}; choose from {METRICS}")
        mats = np.asarray(mats, dtype=float)
        if mats.ndim != 3 or mats.shape[1:] != self.ambient_shape:
            raise DimensionMismatchError(f"expected (N, {self.n}, {self.n}), got {mats.shape}")
        if metric == "frobenius":
            return kernels.pairwise_frobenius(mats.reshape(len(mats), -1))
        for k, m in enumerate(mats):
            if not self.belongs(m):
                raise NotPositiveDefiniteError(f"matrix {k} is not SPD")
        mats = _sym(mats)
        if metric == "riemannian":
            return kernels.pairwise_spd_riemannian(mats)
        vals, vecs = np.linalg.eigh(mats)
        logs = (vecs * np.log(vals)[:, None, :]) @ np.swapaxes(vecs, 1, 2)
        return kernels.pairwise_frobenius(logs.reshape(len(mats), -1))
