"""Pure numpy implementation of the batched kernels.

Mirrors ``_kernels.pyx`` function by function.  All inputs are float64
arrays with a leading batch axis; callers in the manifold modules take
care of validation and of promoting single points to batches of one.
"""
import numpy as np


def _sinc(theta, taylor):
    """sin(t)/t, series below ``taylor``."""
    small = theta < taylor
    safe = np.where(small, 1.0, theta)
    t2 = theta * theta
    return np.where(small, 1.0 - t2 / 6.0 + t2 * t2 / 120.0, np.sin(safe) / safe)


def _asin_over(s):
    """asin(s)/s for small s, used when the cosine is positive."""
    s2 = s * s
    return 1.0 + s2 / 6.0 + 3.0 * s2 * s2 / 40.0


def sphere_exp(base, tangent, taylor):
    theta = np.linalg.norm(tangent, axis=1)
    coef = _sinc(theta, taylor)
    out = np.cos(theta)[:, None] * base + coef[:, None] * tangent
    # renormalise so that roundoff does not compound along iterations
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def sphere_log(base, point, taylor):
    c = np.einsum("ij,ij->i", base, point)
    w = point - c[:, None] * base
    s = np.linalg.norm(w, axis=1)
    theta = np.arctan2(s, c)
    small = (s < taylor) & (c > 0)
    safe = np.where(s > 0, s, 1.0)
    factor = np.where(small, _asin_over(s), theta / safe)
    return factor[:, None] * w


def sphere_dist(a, b):
    return 2.0 * np.arctan2(np.linalg.norm(a - b, axis=1), np.linalg.norm(a + b, axis=1))


def _minkowski(x, y):
    return -x[:, 0] * y[:, 0] + np.einsum("ij,ij->i", x[:, 1:], y[:, 1:])


def hyperbolic_exp(base, tangent, taylor):
    n = np.sqrt(np.maximum(_minkowski(tangent, tangent), 0.0))
    small = n < taylor
    safe = np.where(small, 1.0, n)
    n2 = n * n
    coef = np.where(small, 1.0 + n2 / 6.0 + n2 * n2 / 120.0, np.sinh(safe) / safe)
    return np.cosh(n)[:, None] * base + coef[:, None] * tangent


def hyperbolic_log(base, point, taylor):
    c = -_minkowski(base, point)
    w = point - c[:, None] * base
    s = np.sqrt(np.maximum(_minkowski(w, w), 0.0))
    d = np.where(c < 2.0, np.arcsinh(s), np.arccosh(np.maximum(c, 1.0)))
    small = s < taylor
    safe = np.where(small, 1.0, s)
    s2 = s * s
    factor = np.where(small, 1.0 - s2 / 6.0 + 3.0 * s2 * s2 / 40.0, d / safe)
    return factor[:, None] * w


def hyperbolic_dist(a, b):
    diff = a - b
    q = np.maximum(_minkowski(diff, diff), 0.0)
    return 2.0 * np.arcsinh(0.5 * np.sqrt(q))


def _skew(w):
    k = np.zeros(w.shape[:-1] + (3, 3))
    k[..., 0, 1] = -w[..., 2]
    k[..., 0, 2] = w[..., 1]
    k[..., 1, 0] = w[..., 2]
    k[..., 1, 2] = -w[..., 0]
    k[..., 2, 0] = -w[..., 1]
    k[..., 2, 1] = w[..., 0]
    return k


def rodrigues(w, taylor):
    theta = np.linalg.norm(w, axis=1)
    a = _sinc(theta, taylor)
    small = theta < taylor
    half = np.where(small, 1.0, theta)
    t2 = theta * theta
    b = np.where(
        small,
        0.5 - t2 / 24.0 + t2 * t2 / 720.0,
        2.0 * np.sin(0.5 * half) ** 2 / (half * half),
    )
    k = _skew(w)
    return np.eye(3) + a[:, None, None] * k + b[:, None, None] * (k @ k)


def so3_log(rot, taylor):
    n = rot.shape[0]
    v = 0.5 * np.stack(
        [rot[:, 2, 1] - rot[:, 1, 2], rot[:, 0, 2] - rot[:, 2, 0], rot[:, 1, 0] - rot[:, 0, 1]],
        axis=1,
    )
    s = np.linalg.norm(v, axis=1)
    c = np.clip(0.5 * (np.trace(rot, axis1=1, axis2=2) - 1.0), -1.0, 1.0)
    theta = np.arctan2(s, c)
    out = np.empty((n, 3))
    for i in range(n):
        if c[i] > -0.5:
            if s[i] < taylor:
                out[i] = _asin_over(s[i]) * v[i]
            else:
                out[i] = theta[i] / s[i] * v[i]
            continue
        # near a half turn: the symmetric part carries the axis
        sym = 0.5 * (rot[i] + rot[i].T) - c[i] * np.eye(3)
        j = int(np.argmax(np.diag(sym)))
        axis = sym[:, j] / np.linalg.norm(sym[:, j])
        proj = axis @ v[i]
        if s[i] > 1e-12:
            if proj < 0:
                axis = -axis
        else:
            nz = np.flatnonzero(np.abs(axis) > 1e-12)
            if axis[nz[0]] < 0:
                axis = -axis
        out[i] = theta[i] * axis
    return out


def pairwise_frobenius(flat):
    n = flat.shape[0]
    out = np.zeros((n, n))
    for i in range(n):
        d = np.linalg.norm(flat[i + 1:] - flat[i], axis=1)
        out[i, i + 1:] = d
        out[i + 1:, i] = d
    return out


def pairwise_spd_riemannian(mats):
    n = mats.shape[0]
    out = np.zeros((n, n))
    vals, vecs = np.linalg.eigh(mats)
    if np.any(vals <= 0):
        raise np.linalg.LinAlgError("matrix is not positive definite")
    for i in range(n - 1):
        inv_sqrt = (vecs[i] / np.sqrt(vals[i])) @ vecs[i].T
        congr = inv_sqrt @ mats[i + 1:] @ inv_sqrt
        lam = np.linalg.eigvalsh(0.5 * (congr + np.swapaxes(congr, 1, 2)))
        d = np.sqrt(np.sum(np.log(lam) ** 2, axis=1))
        out[i, i + 1:] = d
        out[i + 1:, i] = d
    return out
