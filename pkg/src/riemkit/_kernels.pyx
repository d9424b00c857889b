# cython: language_level=3
"""Compiled batched kernels.

Same signatures and semantics as ``_kernels_py``.  Loops run without the
GIL.  The pairwise SPD distance factors each row matrix once; pairs of
small matrices are diagonalised by cyclic Jacobi (LAPACK call overhead
dominates there), larger ones by LAPACK.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, acosh, asinh, cos, cosh, fabs, log, sin, sinh, sqrt
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport dpotrf, dsyev, dsygst

cnp.import_array()


cdef inline double _sinc(double t, double taylor) noexcept nogil:
    cdef double t2
    if t < taylor:
        t2 = t * t
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0
    return sin(t) / t


cdef inline double _asin_over(double s) noexcept nogil:
    cdef double s2 = s * s
    return 1.0 + s2 / 6.0 + 3.0 * s2 * s2 / 40.0


def sphere_exp(const double[:, ::1] base, const double[:, ::1] tangent, double taylor):
    cdef Py_ssize_t n = base.shape[0], d = base.shape[1], i, k
    out = np.empty((n, d))
    cdef double[:, ::1] o = out
    cdef double theta, c, a, nrm
    with nogil:
        for i in range(n):
            theta = 0.0
            for k in range(d):
                theta += tangent[i, k] * tangent[i, k]
            theta = sqrt(theta)
            c = cos(theta)
            a = _sinc(theta, taylor)
            nrm = 0.0
            for k in range(d):
                o[i, k] = c * base[i, k] + a * tangent[i, k]
                nrm += o[i, k] * o[i, k]
            # renormalise so that roundoff does not compound along iterations
            nrm = sqrt(nrm)
            for k in range(d):
                o[i, k] /= nrm
    return out


def sphere_log(const double[:, ::1] base, const double[:, ::1] point, double taylor):
    cdef Py_ssize_t n = base.shape[0], d = base.shape[1], i, k
    out = np.empty((n, d))
    cdef double[:, ::1] o = out
    cdef double c, s, f, w
    with nogil:
        for i in range(n):
            c = 0.0
            for k in range(d):
                c += base[i, k] * point[i, k]
            s = 0.0
            for k in range(d):
                w = point[i, k] - c * base[i, k]
                o[i, k] = w
                s += w * w
            s = sqrt(s)
            if s < taylor and c > 0:
                f = _asin_over(s)
            elif s > 0:
                f = atan2(s, c) / s
            else:
                f = 0.0
            for k in range(d):
                o[i, k] *= f
    return out


def sphere_dist(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], d = a.shape[1], i, k
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double dm, dp, x
    with nogil:
        for i in range(n):
            dm = 0.0
            dp = 0.0
            for k in range(d):
                x = a[i, k] - b[i, k]
                dm += x * x
                x = a[i, k] + b[i, k]
                dp += x * x
            o[i] = 2.0 * atan2(sqrt(dm), sqrt(dp))
    return out


cdef inline double _mink(const double[:, ::1] x, const double[:, ::1] y, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t k
    cdef double acc = -x[i, 0] * y[i, 0]
    for k in range(1, x.shape[1]):
        acc += x[i, k] * y[i, k]
    return acc


def hyperbolic_exp(const double[:, ::1] base, const double[:, ::1] tangent, double taylor):
    cdef Py_ssize_t n = base.shape[0], d = base.shape[1], i, k
    out = np.empty((n, d))
    cdef double[:, ::1] o = out
    cdef double nrm, ch, a, n2
    with nogil:
        for i in range(n):
            nrm = _mink(tangent, tangent, i)
            nrm = sqrt(nrm) if nrm > 0 else 0.0
            ch = cosh(nrm)
            if nrm < taylor:
                n2 = nrm * nrm
                a = 1.0 + n2 / 6.0 + n2 * n2 / 120.0
            else:
                a = sinh(nrm) / nrm
            for k in range(d):
                o[i, k] = ch * base[i, k] + a * tangent[i, k]
    return out


def hyperbolic_log(const double[:, ::1] base, const double[:, ::1] point, double taylor):
    cdef Py_ssize_t n = base.shape[0], d = base.shape[1], i, k
    out = np.empty((n, d))
    cdef double[:, ::1] o = out
    cdef double c, s, dist, f, s2, w
    with nogil:
        for i in range(n):
            c = -_mink(base, point, i)
            s = 0.0
            for k in range(d):
                w = point[i, k] - c * base[i, k]
                o[i, k] = w
                s += -w * w if k == 0 else w * w
            s = sqrt(s) if s > 0 else 0.0
            if s < taylor:
                s2 = s * s
                f = 1.0 - s2 / 6.0 + 3.0 * s2 * s2 / 40.0
            else:
                if c < 2.0:
                    dist = asinh(s)
                else:
                    dist = acosh(c)
                f = dist / s
            for k in range(d):
                o[i, k] *= f
    return out


def hyperbolic_dist(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], d = a.shape[1], i, k
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double q, x
    with nogil:
        for i in range(n):
            x = a[i, 0] - b[i, 0]
            q = -x * x
            for k in range(1, d):
                x = a[i, k] - b[i, k]
                q += x * x
            if q < 0:
                q = 0.0
            o[i] = 2.0 * asinh(0.5 * sqrt(q))
    return out


def rodrigues(const double[:, ::1] w, double taylor):
    cdef Py_ssize_t n = w.shape[0], i
    out = np.empty((n, 3, 3))
    cdef double[:, :, ::1] o = out
    cdef double x, y, z, t, t2, a, b, h
    with nogil:
        for i in range(n):
            x = w[i, 0]
            y = w[i, 1]
            z = w[i, 2]
            t2 = x * x + y * y + z * z
            t = sqrt(t2)
            a = _sinc(t, taylor)
            if t < taylor:
                b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
            else:
                h = sin(0.5 * t)
                b = 2.0 * h * h / t2
            # R = I + a K + b K^2, with K^2 = w w^T - t^2 I
            o[i, 0, 0] = 1.0 + b * (x * x - t2)
            o[i, 1, 1] = 1.0 + b * (y * y - t2)
            o[i, 2, 2] = 1.0 + b * (z * z - t2)
            o[i, 0, 1] = -a * z + b * x * y
            o[i, 1, 0] = a * z + b * x * y
            o[i, 0, 2] = a * y + b * x * z
            o[i, 2, 0] = -a * y + b * x * z
            o[i, 1, 2] = -a * x + b * y * z
            o[i, 2, 1] = a * x + b * y * z
    return out


def so3_log(const double[:, :, ::1] rot, double taylor):
    cdef Py_ssize_t n = rot.shape[0], i, j, k, jmax
    out = np.empty((n, 3))
    cdef double[:, ::1] o = out
    cdef double v[3]
    cdef double col[3]
    cdef double s, c, theta, f, best, nrm, proj
    with nogil:
        for i in range(n):
            v[0] = 0.5 * (rot[i, 2, 1] - rot[i, 1, 2])
            v[1] = 0.5 * (rot[i, 0, 2] - rot[i, 2, 0])
            v[2] = 0.5 * (rot[i, 1, 0] - rot[i, 0, 1])
            s = sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
            c = 0.5 * (rot[i, 0, 0] + rot[i, 1, 1] + rot[i, 2, 2] - 1.0)
            if c > 1.0:
                c = 1.0
            elif c < -1.0:
                c = -1.0
            theta = atan2(s, c)
            if c > -0.5:
                if s < taylor:
                    f = _asin_over(s)
                else:
                    f = theta / s
                for k in range(3):
                    o[i, k] = f * v[k]
                continue
            # near a half turn: the symmetric part carries the axis
            jmax = 0
            best = rot[i, 0, 0] - c
            for j in range(1, 3):
                if rot[i, j, j] - c > best:
                    best = rot[i, j, j] - c
                    jmax = j
            nrm = 0.0
            for k in range(3):
                col[k] = 0.5 * (rot[i, k, jmax] + rot[i, jmax, k])
                if k == jmax:
                    col[k] -= c
                nrm += col[k] * col[k]
            nrm = sqrt(nrm)
            proj = 0.0
            for k in range(3):
                col[k] /= nrm
                proj += col[k] * v[k]
            if s > 1e-12:
                if proj < 0:
                    for k in range(3):
                        col[k] = -col[k]
            else:
                for k in range(3):
                    if fabs(col[k]) > 1e-12:
                        if col[k] < 0:
                            for j in range(3):
                                col[j] = -col[j]
                        break
            for k in range(3):
                o[i, k] = theta * col[k]
    return out


def pairwise_frobenius(const double[:, ::1] flat):
    cdef Py_ssize_t n = flat.shape[0], m = flat.shape[1], i, j, k
    out = np.zeros((n, n))
    cdef double[:, ::1] o = out
    cdef double acc, x
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                acc = 0.0
                for k in range(m):
                    x = flat[i, k] - flat[j, k]
                    acc += x * x
                o[i, j] = sqrt(acc)
                o[j, i] = o[i, j]
    return out


cdef int _cholesky(double *m, int n) noexcept nogil:
    """In-place lower Cholesky factor of a row-major SPD matrix; 1 on failure."""
    cdef int i, j, k
    cdef double acc
    for j in range(n):
        acc = m[j * n + j]
        for k in range(j):
            acc -= m[j * n + k] * m[j * n + k]
        if acc <= 0:
            return 1
        m[j * n + j] = sqrt(acc)
        for i in range(j + 1, n):
            acc = m[i * n + j]
            for k in range(j):
                acc -= m[i * n + k] * m[j * n + k]
            m[i * n + j] = acc / m[j * n + j]
    return 0


cdef void _reduce(const double[:, :, ::1] mats, Py_ssize_t j, const double *chol, double *x, double *a, int n) noexcept nogil:
    """a = L^{-1} S_j L^{-T} by two forward substitutions, symmetrised."""
    cdef int r, c, k
    cdef double acc
    # x = L^{-1} S_j, column by column
    for c in range(n):
        for r in range(n):
            acc = mats[j, r, c]
            for k in range(r):
                acc -= chol[r * n + k] * x[k * n + c]
            x[r * n + c] = acc / chol[r * n + r]
    # a = L^{-1} x^T
    for c in range(n):
        for r in range(n):
            acc = x[c * n + r]
            for k in range(r):
                acc -= chol[r * n + k] * a[k * n + c]
            a[r * n + c] = acc / chol[r * n + r]
    for r in range(n):
        for c in range(r + 1, n):
            acc = 0.5 * (a[r * n + c] + a[c * n + r])
            a[r * n + c] = acc
            a[c * n + r] = acc


cdef int _jacobi_eigvals(double *a, double *w, int n) noexcept nogil:
    """Eigenvalues of a symmetric row-major matrix by cyclic Jacobi; 1 if not converged.

    A rotation is skipped once |a_pq| <= eps * sqrt(|a_pp a_qq|), the
    threshold that keeps small eigenvalues relatively accurate.
    """
    cdef int sweep, p, q, r, rotated
    cdef double apq, theta, t, c, s, tau, g, h
    for sweep in range(60):
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p * n + q]
                if fabs(apq) <= 2.220446049250313e-16 * sqrt(fabs(a[p * n + p] * a[q * n + q])):
                    continue
                rotated = 1
                theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq)
                if fabs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                a[p * n + p] -= t * apq
                a[q * n + q] += t * apq
                a[p * n + q] = 0.0
                a[q * n + p] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    g = a[r * n + p]
                    h = a[r * n + q]
                    a[r * n + p] = g - s * (h + g * tau)
                    a[p * n + r] = a[r * n + p]
                    a[r * n + q] = h + s * (g - h * tau)
                    a[q * n + r] = a[r * n + q]
        if not rotated:
            for p in range(n):
                w[p] = a[p * n + p]
            return 0
    return 1


# above this size LAPACK's eigensolver beats the per-pair Jacobi sweep
cdef int JACOBI_MAX_N = 4


def pairwise_spd_riemannian(const double[:, :, ::1] mats):
    """Affine-invariant distances from the eigenvalues of L_i^{-1} S_j L_i^{-T}.

    S_i = L_i L_i^T is factored once per row.  For n <= 4 each pair is
    reduced by forward substitution and diagonalised by cyclic Jacobi;
    larger matrices go through LAPACK (dsygst, dsyev).
    """
    cdef Py_ssize_t count = mats.shape[0], i, j
    cdef int n = <int>mats.shape[1], k, l, info = 0
    cdef int itype = 1, lwork = max(1, 3 * n - 1)
    cdef char jobz = b'N', uplo = b'L'
    cdef bint small = n <= JACOBI_MAX_N
    out = np.zeros((count, count))
    cdef double[:, ::1] o = out
    cdef double acc, lg
    cdef int failed = 0
    cdef double *chol = <double *>malloc(n * n * sizeof(double))
    cdef double *x = <double *>malloc(n * n * sizeof(double))
    cdef double *a = <double *>malloc(n * n * sizeof(double))
    cdef double *w = <double *>malloc(n * sizeof(double))
    cdef double *work = <double *>malloc(lwork * sizeof(double))
    if chol == NULL or x == NULL or a == NULL or w == NULL or work == NULL:
        free(chol); free(x); free(a); free(w); free(work)
        raise MemoryError()
    try:
        with nogil:
            for i in range(count):
                for k in range(n):
                    for l in range(n):
                        chol[k * n + l] = mats[i, k, l]
                if small:
                    failed = _cholesky(chol, n)
                else:
                    dpotrf(&uplo, &n, chol, &n, &info)
                    failed = info != 0
                if failed:
                    break
                for j in range(i + 1, count):
                    if small:
                        _reduce(mats, j, chol, x, a, n)
                        if _jacobi_eigvals(a, w, n):
                            failed = 2
                            break
                    else:
                        for k in range(n):
                            for l in range(n):
                                a[k * n + l] = mats[j, k, l]
                        dsygst(&itype, &uplo, &n, a, &n, chol, &n, &info)
                        if info == 0:
                            dsyev(&jobz, &uplo, &n, a, &n, w, work, &lwork, &info)
                        if info != 0:
                            failed = 1
                            break
                    acc = 0.0
                    for k in range(n):
                        if w[k] <= 0:
                            failed = 1
                            break
                        lg = log(w[k])
                        acc += lg * lg
                    if failed:
                        break
                    o[i, j] = sqrt(acc)
                    o[j, i] = o[i, j]
                if failed:
                    break
    finally:
        free(chol); free(x); free(a); free(w); free(work)
    if failed == 2:
        raise np.linalg.LinAlgError("Jacobi eigenvalue iteration did not converge")
    if failed:
        raise np.linalg.LinAlgError("matrix is not positive definite")
    return out
