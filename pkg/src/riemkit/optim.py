"""Riemannian gradient descent and squared-geodesic-distance losses."""
import csv
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from riemkit.errors import InvalidInputError


@dataclass
class ScalarField:
    """A function on the ambient space together with its Euclidean gradient."""

    value: Callable[[Any], float]
    euclidean_gradient: Callable[[Any], Any]


def quadratic_form(a):
    """``f(x) = x^T A x`` for a symmetric positive-definite ``A``."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or not np.allclose(a, a.T, atol=1e-8):
        raise InvalidInputError("quadratic form needs a symmetric square matrix")
    if np.linalg.eigvalsh(a)[0] <= 1e-8:
        raise InvalidInputError("quadratic form matrix must be positive definite")
    return ScalarField(value=lambda x: float(x @ a @ x), euclidean_gradient=lambda x: 2.0 * (a @ x))


@dataclass
class DescentTrace:
    iterates: list = field(default_factory=list)
    values: list = field(default_factory=list)
    grad_norms: list = field(default_factory=list)
    converged: bool = False

    def __len__(self):
        return len(self.iterates)

    def write_csv(self, path_or_file):
        """Columns: iteration, value, grad_norm, then the flattened point."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            width = np.size(self.iterates[0]) if self.iterates else 0
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iteration", "value", "grad_norm"] + [f"x{i}" for i in range(width)])
            for k, (x, v, g) in enumerate(zip(self.iterates, self.values, self.grad_norms)):
                writer.writerow([k, f"{v:.17g}", f"{g:.17g}"] + [f"{c:.17g}" for c in np.ravel(x)])
        finally:
            if own:
                fh.close()


def riemannian_gradient(manifold, field_, point):
    """Riemannian gradient of ``field_`` at ``point`` (tangent projection of the Euclidean one)."""
    manifold.check_point(point)
    return manifold.egrad_to_rgrad(field_.euclidean_gradient(point), point)


def riemannian_gd(manifold, field_, x0, lr=0.1, max_iter=1000, tol=1e-10):
    """Fixed-step descent ``x <- exp_x(-lr * grad f(x))``.

    Stops when the gradient norm falls below ``tol`` (``converged=True``)
    or after ``max_iter`` steps.  The trace records every visited point,
    including the start, with its value and gradient norm.
    """
    if lr <= 0:
        raise InvalidInputError("learning rate must be positive")
    x = manifold.check_point(x0)
    trace = DescentTrace()
    for _ in range(max_iter + 1):
        grad = manifold.egrad_to_rgrad(field_.euclidean_gradient(x), x)
        gnorm = float(manifold.norm(grad, x))
        trace.iterates.append(x)
        trace.values.append(float(field_.value(x)))
        trace.grad_norms.append(gnorm)
        if gnorm < tol:
            trace.converged = True
            break
        if len(trace) > max_iter:
            break
        x = manifold.exp(-lr * grad, x)
    return trace


def squared_geodesic_loss(manifold, y_pred, y_true):
    return float(manifold.squared_dist(y_pred, y_true))


def loss_gradient(manifold, y_pred, y_true):
    """Riemannian gradient of ``d(y_pred, y_true)^2`` with respect to ``y_pred``."""
    return -2.0 * manifold.log(y_true, y_pred)
