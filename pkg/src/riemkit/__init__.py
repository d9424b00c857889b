"""Riemannian geometry and geometric statistics on classical manifolds."""
from riemkit.base import Euclidean, GeodesicCurve, Manifold, Tangent
from riemkit.embedded import HyperbolicSpace, Hypersphere
from riemkit.kernels import BACKEND
from riemkit.liegroup import (
    InvariantMetric,
    RigidTransform,
    SpecialEuclidean,
    SpecialOrthogonal,
    lie_geodesic,
)
from riemkit.numerics import DEFAULT_TOL, TolerancePolicy
from riemkit.optim import ScalarField, riemannian_gd, riemannian_gradient
from riemkit.spd import SPDMatrices
from riemkit.stats import frechet_mean, tangent_pca, variance

__all__ = [
    "BACKEND",
    "DEFAULT_TOL",
    "Euclidean",
    "GeodesicCurve",
    "HyperbolicSpace",
    "Hypersphere",
    "InvariantMetric",
    "Manifold",
    "RigidTransform",
    "SPDMatrices",
    "ScalarField",
    "SpecialEuclidean",
    "SpecialOrthogonal",
    "Tangent",
    "TolerancePolicy",
    "frechet_mean",
    "lie_geodesic",
    "riemannian_gd",
    "riemannian_gradient",
    "tangent_pca",
    "variance",
]
