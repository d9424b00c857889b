"""Rotation groups SO(n), rigid-motion groups SE(n) and their invariant metrics.

Group structure (compose, inverse, membership) works for any n.  Closed-form
exponential and logarithm are provided for n = 2 and n = 3.

SE(n) elements are stored as :class:`RigidTransform` ``(rot, t)`` pairs; the
homogeneous ``(n+1) x (n+1)`` matrix ``[[R, t], [0, 1]]`` is the import/export
format.  Tangent vectors of an :class:`InvariantMetric` are ambient matrices
(``n x n`` for SO(n), homogeneous layout with a zero last row for SE(n)).
"""
import warnings
from dataclasses import dataclass

import numpy as np

from riemkit import kernels
from riemkit.base import Manifold
from riemkit.errors import (
    CutLocusError,
    CutLocusWarning,
    DimensionMismatchError,
    InvalidInputError,
    NotOnManifoldError,
)
from riemkit.numerics import DEFAULT_TOL, TolerancePolicy, skew, skew_expm_3, vee


def _so_pairs(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def so_hat(coords, n):
    """Algebra coordinates to a skew matrix (rotation-vector layout for n = 3)."""
    coords = np.asarray(coords, dtype=float)
    if n == 3:
        return skew(coords)
    k = np.zeros((n, n))
    for c, (i, j) in zip(coords, _so_pairs(n)):
        k[j, i] = c
        k[i, j] = -c
    return k


def so_vee(k, n):
    if n == 3:
        return vee(k)
    return np.array([k[j, i] for i, j in _so_pairs(n)])


def _angle_to_pi(theta, atol):
    return np.pi - theta <= atol


class SpecialOrthogonal:
    """SO(n) as a matrix group."""

    def __init__(self, n, tol: TolerancePolicy = DEFAULT_TOL):
        if n < 2:
            raise InvalidInputError("SO(n) needs n >= 2")
        self.n = n
        self.tol = tol
        self.alg_dim = n * (n - 1) // 2
        self.ambient_shape = (n, n)

    def __repr__(self):
        return f"SpecialOrthogonal({self.n})"

    @property
    def identity(self):
        return np.eye(self.n)

    def belongs(self, rot):
        r = np.asarray(rot, dtype=float)
        if r.shape != (self.n, self.n) or not np.all(np.isfinite(r)):
            return False
        ortho = np.max(np.abs(r.T @ r - np.eye(self.n)))
        return bool(ortho <= self.tol.atol and abs(np.linalg.det(r) - 1.0) <= self.tol.atol)

    def _check_dim(self, rot):
        r = np.asarray(rot, dtype=float)
        if r.shape != (self.n, self.n):
            raise DimensionMismatchError(f"expected {self.n}x{self.n}, got {r.shape}")
        return r

    def compose(self, a, b):
        return self._check_dim(a) @ self._check_dim(b)

    def inverse(self, a):
        return self._check_dim(a).T.copy()

    def random_uniform(self, rng):
        q, r = np.linalg.qr(rng.standard_normal((self.n, self.n)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        return q

    def hat(self, coords):
        return so_hat(coords, self.n)

    def vee(self, k):
        return so_vee(k, self.n)

    def _require_closed_form(self):
        if self.n not in (2, 3):
            raise NotImplementedError("closed-form exp/log are only available for n = 2, 3")

    def exp(self, coords):
        """Group exponential from algebra coordinates (rotation vector for n = 3)."""
        self._require_closed_form()
        if self.n == 3:
            return skew_expm_3(coords, self.tol.taylor_threshold)
        theta = float(np.ravel(coords)[0])
        c, s = np.cos(theta), np.sin(theta)
        return np.array([[c, -s], [s, c]])

    def log(self, rot):
        """Algebra coordinates of the canonical logarithm (angle in ``[0, pi]``).

        Within ``atol`` of a half turn the representative is not unique; a
        :class:`CutLocusWarning` is emitted and the deterministic branch
        (first nonzero axis component positive) is returned.
        """
        self._require_closed_form()
        r = self._check_dim(rot)
        if self.n == 2:
            theta = np.arctan2(r[1, 0], r[0, 0])
            if _angle_to_pi(abs(theta), self.tol.atol):
                warnings.warn("rotation angle is at the cut locus (pi)", CutLocusWarning, stacklevel=2)
                theta = np.pi
            return np.array([theta])
        w = kernels.so3_log(r[None], self.tol.taylor_threshold)[0]
        if _angle_to_pi(np.linalg.norm(w), self.tol.atol):
            warnings.warn("rotation angle is at the cut locus (pi)", CutLocusWarning, stacklevel=2)
        return w

    def exp_batch(self, coords):
        if self.n != 3:
            return np.stack([self.exp(c) for c in coords])
        return kernels.rodrigues(np.asarray(coords, dtype=float), self.tol.taylor_threshold)

    def log_batch(self, rots):
        if self.n != 3:
            return np.stack([self.log(r) for r in rots])
        return kernels.so3_log(np.asarray(rots, dtype=float), self.tol.taylor_threshold)

    def regularize(self, coords):
        """Canonical representative of a rotation vector: angle in ``[0, pi]``."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CutLocusWarning)
            return self.log(self.exp(coords))


@dataclass(frozen=True)
class RigidTransform:
    """Element ``x -> R x + t`` of SE(n)."""

    rot: np.ndarray
    t: np.ndarray

    @property
    def n(self):
        return len(self.t)

    def matrix(self):
        n = self.n
        x = np.eye(n + 1)
        x[:n, :n] = self.rot
        x[:n, n] = self.t
        return x

    @classmethod
    def from_matrix(cls, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 2 or x.shape[0] != x.shape[1] or x.shape[0] < 3:
            raise DimensionMismatchError(f"expected a square homogeneous matrix, got {x.shape}")
        n = x.shape[0] - 1
        return cls(x[:n, :n].copy(), x[:n, n].copy())

    def apply(self, points):
        return np.asarray(points) @ self.rot.T + self.t


class SpecialEuclidean:
    """SE(n) = SO(n) x| R^n.  Algebra coordinates are ``(rotation, translation)``."""

    def __init__(self, n, tol: TolerancePolicy = DEFAULT_TOL):
        self.n = n
        self.tol = tol
        self.rotations = SpecialOrthogonal(n, tol)
        self.alg_dim = self.rotations.alg_dim + n
        self.ambient_shape = (n + 1, n + 1)

    def __repr__(self):
        return f"SpecialEuclidean({self.n})"

    @property
    def identity(self):
        return RigidTransform(np.eye(self.n), np.zeros(self.n))

    def belongs(self, x):
        if not isinstance(x, RigidTransform):
            m = np.asarray(x, dtype=float)
            if m.shape != self.ambient_shape:
                return False
            bottom = np.zeros(self.n + 1)
            bottom[-1] = 1.0
            if np.max(np.abs(m[-1] - bottom)) > self.tol.atol:
                return False
            x = RigidTransform.from_matrix(m)
        t = np.asarray(x.t)
        return t.shape == (self.n,) and bool(np.all(np.isfinite(t))) and self.rotations.belongs(x.rot)

    def _check(self, x):
        if not isinstance(x, RigidTransform):
            x = RigidTransform.from_matrix(x)
        if x.n != self.n:
            raise DimensionMismatchError(f"expected an SE({self.n}) element, got SE({x.n})")
        return x

    def compose(self, a, b):
        a, b = self._check(a), self._check(b)
        return RigidTransform(a.rot @ b.rot, a.rot @ b.t + a.t)

    def inverse(self, a):
        a = self._check(a)
        rt = a.rot.T
        return RigidTransform(rt, -rt @ a.t)

    def random_uniform(self, rng, translation_scale=1.0):
        return RigidTransform(
            self.rotations.random_uniform(rng), translation_scale * rng.standard_normal(self.n)
        )

    def hat(self, coords):
        coords = np.asarray(coords, dtype=float)
        r = self.rotations.alg_dim
        x = np.zeros(self.ambient_shape)
        x[: self.n, : self.n] = self.rotations.hat(coords[:r])
        x[: self.n, self.n] = coords[r:]
        return x

    def vee(self, x):
        return np.concatenate([self.rotations.vee(x[: self.n, : self.n]), x[: self.n, self.n]])

    def from_vector(self, vec):
        """``(rotation vector, translation)`` to a transform (not the group exp)."""
        vec = np.asarray(vec, dtype=float)
        r = self.rotations.alg_dim
        if vec.shape != (self.alg_dim,):
            raise DimensionMismatchError(f"expected {self.alg_dim} values, got {vec.shape}")
        return RigidTransform(self.rotations.exp(vec[:r]), vec[r:].copy())

    def to_vector(self, x):
        x = self._check(x)
        return np.concatenate([self.rotations.log(x.rot), x.t])

    # -- group exponential (n = 3) -------------------------------------------
    def _v_coeffs(self, theta):
        if theta < self.tol.taylor_threshold:
            t2 = theta * theta
            return 0.5 - t2 / 24.0 + t2 * t2 / 720.0, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        return 2.0 * np.sin(0.5 * theta) ** 2 / theta**2, (theta - np.sin(theta)) / theta**3

    def group_exp(self, xi):
        """``(w, u) -> (exp([w]), V(w) u)``."""
        if self.n != 3:
            raise NotImplementedError("the SE(n) group exponential is implemented for n = 3")
        xi = np.asarray(xi, dtype=float)
        w, u = xi[:3], xi[3:]
        theta = float(np.linalg.norm(w))
        b, c = self._v_coeffs(theta)
        k = skew(w)
        v = np.eye(3) + b * k + c * (k @ k)
        return RigidTransform(self.rotations.exp(w), v @ u)

    def group_log(self, x):
        if self.n != 3:
            raise NotImplementedError("the SE(n) group logarithm is implemented for n = 3")
        x = self._check(x)
        w = kernels.so3_log(np.asarray(x.rot, dtype=float)[None], self.tol.taylor_threshold)[0]
        theta = float(np.linalg.norm(w))
        if _angle_to_pi(theta, self.tol.atol):
            raise CutLocusError("cut locus: rotation angle is at pi, the SE(3) logarithm is not unique")
        if theta < self.tol.taylor_threshold:
            t2 = theta * theta
            c = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
        else:
            c = (1.0 - theta * np.sin(theta) / (4.0 * np.sin(0.5 * theta) ** 2)) / theta**2
        k = skew(w)
        v_inv = np.eye(3) - 0.5 * k + c * (k @ k)
        return np.concatenate([w, v_inv @ x.t])


def quaternion_from_rotation(rot):
    """Unit quaternion ``(w, x, y, z)`` with ``w >= 0``.

    When ``w == 0`` (half turns) the first nonzero vector component is made
    positive so the double cover is resolved deterministically.
    """
    r = np.asarray(rot, dtype=float)
    tr = np.trace(r)
    diag = np.diag(r)
    k = int(np.argmax([tr, *diag]))
    if k == 0:
        s = 2.0 * np.sqrt(1.0 + tr)
        q = np.array([0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s])
    else:
        i = k - 1
        j, l = (i + 1) % 3, (i + 2) % 3
        s = 2.0 * np.sqrt(max(1.0 + r[i, i] - r[j, j] - r[l, l], 0.0))
        q = np.empty(4)
        q[0] = (r[l, j] - r[j, l]) / s
        q[1 + i] = 0.25 * s
        q[1 + j] = (r[j, i] + r[i, j]) / s
        q[1 + l] = (r[l, i] + r[i, l]) / s
    q /= np.linalg.norm(q)
    if q[0] < 0:
        q = -q
    elif q[0] == 0:
        nz = np.flatnonzero(np.abs(q[1:]) > 1e-15)
        if nz.size and q[1 + nz[0]] < 0:
            q = -q
    return q


def rotation_from_quaternion(quat):
    w, x, y, z = np.asarray(quat, dtype=float) / np.linalg.norm(quat)
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def quaternion_from_rotvec(w):
    w = np.asarray(w, dtype=float)
    theta = np.linalg.norm(w)
    half = 0.5 * theta
    scale = 0.5 - theta**2 / 48.0 if theta < 1e-6 else np.sin(half) / theta
    return np.concatenate([[np.cos(half)], scale * w])


class InvariantMetric(Manifold):
    """Left- or right-invariant metric from an SPD inner product on the algebra.

    ``exp_p(V) = p . exp_e(p^{-1} V)`` on the left (``exp_e(V p^{-1}) . p`` on
    the right).  For SO(n) ``exp_e`` is the group exponential, which gives the
    Riemannian exponential of bi-invariant metrics.  For SE(n) ``exp_e`` is
    the exponential of SO(n) x R^n, ``(w, u) -> (exp([w]), u)``: these are the
    true geodesics of left-invariant metrics whose inner product is
    ``diag(a I, b I)``, which includes the canonical one.  For other inner
    products the curves are invariant interpolants, not Riemannian geodesics.
    """

    def __init__(self, group, inner_at_identity=None, side="left"):
        super().__init__(group.tol)
        if side not in ("left", "right"):
            raise InvalidInputError("side must be 'left' or 'right'")
        d = group.alg_dim
        m = np.eye(d) if inner_at_identity is None else np.asarray(inner_at_identity, dtype=float)
        if m.shape != (d, d):
            raise DimensionMismatchError(f"inner product at identity must be {d}x{d}")
        if np.max(np.abs(m - m.T)) > self.tol.atol or np.linalg.eigvalsh(0.5 * (m + m.T))[0] <= self.tol.atol:
            raise InvalidInputError("inner product at identity must be symmetric positive definite")
        self.group = group
        self.side = side
        self.inner_at_identity = 0.5 * (m + m.T)
        self.dim = d
        self.ambient_shape = group.ambient_shape
        self._euclidean = isinstance(group, SpecialEuclidean)

    def __repr__(self):
        return f"InvariantMetric({self.group!r}, side={self.side!r})"

    def belongs(self, point):
        return self.group.belongs(point)

    # -- identity maps ---------------------------------------------------------
    def _rotation_log(self, rot):
        g = self.group.rotations if self._euclidean else self.group
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", CutLocusWarning)
            w = g.log(rot)
        if _angle_to_pi(float(np.linalg.norm(w)), self.tol.atol):
            raise CutLocusError("cut locus: rotation angle is at pi, the geodesic is not unique")
        return w

    def exp_from_identity(self, coords):
        if self._euclidean:
            r = self.group.rotations.alg_dim
            return RigidTransform(self.group.rotations.exp(coords[:r]), np.array(coords[r:], dtype=float))
        return self.group.exp(coords)

    def log_from_identity(self, point):
        if self._euclidean:
            return np.concatenate([self._rotation_log(point.rot), point.t])
        return self._rotation_log(point)

    # -- trivialisation --------------------------------------------------------
    def _mat(self, point):
        return point.matrix() if self._euclidean else np.asarray(point, dtype=float)

    def _inv_mat(self, point):
        return self._mat(self.group.inverse(point))

    def coords(self, tangent_vec, base_point):
        """Algebra coordinates of a tangent vector translated to the identity."""
        v = np.asarray(tangent_vec, dtype=float)
        if self.side == "left":
            return self.group.vee(self._inv_mat(base_point) @ v)
        return self.group.vee(v @ self._inv_mat(base_point))

    def from_coords(self, coords, base_point):
        x = self.group.hat(coords)
        if self.side == "left":
            return self._mat(base_point) @ x
        return x @ self._mat(base_point)

    def to_tangent(self, vector, base_point):
        w = np.asarray(vector, dtype=float)
        inv = self._inv_mat(base_point)
        a = inv @ w if self.side == "left" else w @ inv
        n = self.group.n
        # orthogonal projection onto the algebra: skew rotation block, keep translation
        alg = np.zeros_like(a)
        alg[:n, :n] = 0.5 * (a[:n, :n] - a[:n, :n].T)
        if self._euclidean:
            alg[:n, n] = a[:n, n]
        return self.from_coords(self.group.vee(alg), base_point)

    def egrad_to_rgrad(self, egrad, base_point):
        g = np.asarray(egrad, dtype=float)
        c = np.array(
            [np.sum(g * self.from_coords(np.eye(self.dim)[i], base_point)) for i in range(self.dim)]
        )
        return self.from_coords(np.linalg.solve(self.inner_at_identity, c), base_point)

    # -- metric ----------------------------------------------------------------
    def inner_product(self, tangent_a, tangent_b, base_point):
        a = self.coords(tangent_a, base_point)
        b = self.coords(tangent_b, base_point)
        return float(a @ self.inner_at_identity @ b)

    def exp(self, tangent_vec, base_point):
        g = self.exp_from_identity(self.coords(tangent_vec, base_point))
        if self.side == "left":
            return self.group.compose(base_point, g)
        return self.group.compose(g, base_point)

    def _relative(self, point, base_point):
        inv = self.group.inverse(base_point)
        if self.side == "left":
            return self.group.compose(inv, point)
        return self.group.compose(point, inv)

    def log(self, point, base_point):
        return self.from_coords(self.log_from_identity(self._relative(point, base_point)), base_point)

    def dist(self, point_a, point_b):
        xi = self.log_from_identity(self._relative(point_b, point_a))
        return float(np.sqrt(xi @ self.inner_at_identity @ xi))

    def tangent_basis(self, base_point):
        vals, vecs = np.linalg.eigh(self.inner_at_identity)
        return [self.from_coords(vecs[:, k] / np.sqrt(vals[k]), base_point) for k in range(self.dim)]

    def check_point(self, point):
        if not self.belongs(point):
            raise NotOnManifoldError(f"point does not belong to {self.group!r}")
        return point


def lie_geodesic(metric, start, end):
    """Geodesic of an invariant metric from ``start`` (t = 0) to ``end`` (t = 1)."""
    return metric.geodesic(start, end_point=end)
