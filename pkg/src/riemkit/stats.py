"""Fréchet mean, variance and tangent PCA on any manifold of :mod:`riemkit`."""
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from riemkit.errors import CutLocusError, InvalidInputError, MeanUndefinedError, NotOnManifoldError


@dataclass
class WeightedSample:
    points: list
    weights: np.ndarray

    @classmethod
    def build(cls, manifold, points, weights=None):
        points = list(points)
        if not points:
            raise InvalidInputError("sample is empty")
        w = np.ones(len(points)) if weights is None else np.asarray(weights, dtype=float)
        if w.shape != (len(points),):
            raise InvalidInputError(f"{len(points)} points but {w.size} weights")
        if np.any(w < 0) or not np.all(np.isfinite(w)) or w.sum() <= 0:
            raise InvalidInputError("weights must be finite, nonnegative, with positive sum")
        bad = [i for i, p in enumerate(points) if not np.all(manifold.belongs(p))]
        if bad:
            err = NotOnManifoldError(f"points not on {manifold!r}: rows {bad}")
            err.rows = bad
            raise err
        return cls(points, w)


@dataclass
class FrechetResult:
    mean: Any
    iterations: int
    update_norms: list = field(default_factory=list)
    converged: bool = False
    variance: float = 0.0


def _sample(manifold, points, weights):
    if isinstance(points, WeightedSample):
        return points
    return WeightedSample.build(manifold, points, weights)


def _log_all(manifold, points, base):
    if isinstance(points[0], np.ndarray) and points[0].ndim == 1:
        stacked = np.stack(points)
        return manifold.log(stacked, np.broadcast_to(base, stacked.shape))
    return np.stack([manifold.log(p, base) for p in points])


def _weighted_tangent_mean(manifold, points, weights, base):
    logs = _log_all(manifold, points, base)
    return np.tensordot(weights, logs, axes=1) / weights.sum()


def variance(manifold, points, base_point, weights=None):
    """Weighted mean of squared distances to ``base_point``."""
    sample = _sample(manifold, points, weights)
    manifold.check_point(base_point)
    d2 = np.array([manifold.squared_dist(base_point, p) for p in sample.points])
    return float(sample.weights @ d2 / sample.weights.sum())


def frechet_mean(manifold, points, weights=None, epsilon=1e-10, max_iter=64, init=None):
    """Weighted Fréchet mean by the unit-step Gauss-Newton iteration.

    Starting from the first sample point, repeat
    ``m <- exp_m(sum_i w_i log_m(x_i) / sum_i w_i)`` until the squared norm
    of the update drops below ``epsilon``.  Hitting ``max_iter`` returns the
    last iterate with ``converged=False``.

    Raises
    ------
    MeanUndefinedError
        If a logarithm fails (cut locus) during the iteration.
    """
    sample = _sample(manifold, points, weights)
    mean = sample.points[0] if init is None else init
    norms = []
    converged = False
    for k in range(1, max_iter + 1):
        try:
            step = _weighted_tangent_mean(manifold, sample.points, sample.weights, mean)
        except CutLocusError as exc:
            raise MeanUndefinedError(f"logarithm failed: {exc}", iteration=k) from exc
        sq = float(manifold.squared_norm(step, mean))
        norms.append(sq)
        mean = manifold.exp(step, mean)
        if sq < epsilon:
            converged = True
            break
    return FrechetResult(
        mean=mean,
        iterations=len(norms),
        update_norms=norms,
        converged=converged,
        variance=variance(manifold, sample, mean),
    )


@dataclass
class TangentPCAResult:
    base_point: Any
    eigenvalues: np.ndarray
    components: list
    explained_ratio: np.ndarray


def tangent_pca(manifold, points, weights=None, base_point=None, **mean_kwargs):
    """PCA of the log-lifted sample in a metric-orthonormal tangent basis.

    ``base_point=None`` uses the Fréchet mean.  Components are returned as
    tangent vectors at the base point, orthonormal in the metric.
    """
    sample = _sample(manifold, points, weights)
    if base_point is None:
        base_point = frechet_mean(manifold, sample, **mean_kwargs).mean
    else:
        manifold.check_point(base_point)
    basis = manifold.tangent_basis(base_point)
    logs = _log_all(manifold, sample.points, base_point)
    coords = np.array([manifold.coordinates(v, basis, base_point) for v in logs])
    w = sample.weights / sample.weights.sum()
    centred = coords - w @ coords
    cov = (centred * w[:, None]).T @ centred
    vals, vecs = np.linalg.eigh(cov)
    order = np.argsort(vals)[::-1]
    vals = np.clip(vals[order], 0.0, None)
    vecs = vecs[:, order]
    components = [sum(c * b for c, b in zip(vecs[:, k], basis)) for k in range(len(basis))]
    total = vals.sum()
    ratio = vals / total if total > 0 else np.zeros_like(vals)
    return TangentPCAResult(base_point, vals, components, ratio)
