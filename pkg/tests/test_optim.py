import io

import numpy as np
import pytest

from riemkit.embedded import HyperbolicSpace, Hypersphere
from riemkit.errors import InvalidInputError
from riemkit.liegroup import InvariantMetric, SpecialEuclidean, SpecialOrthogonal
from riemkit.optim import (
    ScalarField,
    loss_gradient,
    quadratic_form,
    riemannian_gd,
    riemannian_gradient,
    squared_geodesic_loss,
)
from riemkit.spd import SPDMatrices

from conftest import random_spd

S2 = Hypersphere(2)
A = np.diag([1.0, 2.0, 3.0])


def test_quadratic_form_validation():
    with pytest.raises(InvalidInputError):
        quadratic_form(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        quadratic_form(np.diag([1.0, -1.0]))


def test_gradient_examples(rng):
    radial = ScalarField(lambda x: float(x @ x), lambda x: 2.0 * x)
    p = S2.random_uniform(rng)
    assert np.allclose(riemannian_gradient(S2, radial, p), 0.0, atol=1e-15)
    f = quadratic_form(A)
    assert np.allclose(riemannian_gradient(S2, f, np.array([0.0, 1.0, 0.0])), 0.0)


def test_gradient_tangency(rng):
    h3 = HyperbolicSpace(3)
    f = quadratic_form(random_spd(rng, 4, 0.5, 2.0))
    for _ in range(20):
        p = S2.random_uniform(rng)
        assert abs(riemannian_gradient(S2, quadratic_form(A), p) @ p) < 1e-10
        q = h3.random_point(rng)
        g = riemannian_gradient(h3, f, q)
        assert abs(-g[0] * q[0] + g[1:] @ q[1:]) < 1e-10


def test_gradient_matches_directional_derivatives(rng):
    f = quadratic_form(A)
    for _ in range(5):
        p = S2.random_uniform(rng)
        g = riemannian_gradient(S2, f, p)
        v = S2.to_tangent(rng.standard_normal(3), p)
        h = 1e-6
        fd = (f.value(S2.exp(h * v, p)) - f.value(S2.exp(-h * v, p))) / (2 * h)
        assert fd == pytest.approx(S2.inner_product(g, v, p), rel=1e-5, abs=1e-9)


def test_spd_gradient_is_symmetric(rng):
    spd = SPDMatrices(3)
    c = rng.standard_normal((3, 3))
    field_ = ScalarField(lambda s: float(np.sum(c * s)), lambda s: c)
    g = riemannian_gradient(spd, field_, random_spd(rng, 3, 0.5, 2.0))
    assert np.allclose(g, g.T, atol=1e-14)


def test_gd_critical_start():
    trace = riemannian_gd(S2, quadratic_form(A), np.array([1.0, 0.0, 0.0]))
    assert len(trace) == 1 and trace.converged


def test_gd_quadratic_benchmark():
    x0 = np.ones(3) / np.sqrt(3)
    trace = riemannian_gd(S2, quadratic_form(A), x0, lr=0.1, max_iter=5000)
    assert trace.converged
    assert abs(trace.iterates[-1][0]) > 1 - 1e-6
    vals = np.array(trace.values)
    assert np.all(np.diff(vals) <= 1e-15)


def test_gd_max_iter():
    trace = riemannian_gd(S2, quadratic_form(A), np.ones(3) / np.sqrt(3), max_iter=3)
    assert not trace.converged and len(trace) == 4
    with pytest.raises(InvalidInputError):
        riemannian_gd(S2, quadratic_form(A), np.ones(3) / np.sqrt(3), lr=0.0)


def test_trace_csv_is_deterministic():
    texts = []
    for _ in range(2):
        buf = io.StringIO()
        riemannian_gd(S2, quadratic_form(A), np.ones(3) / np.sqrt(3), max_iter=20).write_csv(buf)
        texts.append(buf.getvalue())
    assert texts[0] == texts[1]
    assert texts[0].splitlines()[0] == "iteration,value,grad_norm,x0,x1,x2"


def test_loss_examples():
    p = np.array([1.0, 0.0, 0.0])
    q = np.array([0.0, 1.0, 0.0])
    assert squared_geodesic_loss(S2, p, p) == 0.0
    assert np.allclose(loss_gradient(S2, p, p), 0.0)
    assert squared_geodesic_loss(S2, p, q) == pytest.approx((np.pi / 2) ** 2)
    assert np.linalg.norm(loss_gradient(S2, p, q)) == pytest.approx(np.pi)


@pytest.mark.parametrize(
    "manifold, sample",
    [
        (S2, lambda rng: Hypersphere(2).random_uniform(rng)),
        (SPDMatrices(3), lambda rng: random_spd(rng, 3, 0.2, 5.0)),
        (InvariantMetric(SpecialOrthogonal(3)), lambda rng: SpecialOrthogonal(3).random_uniform(rng)),
        (InvariantMetric(SpecialEuclidean(3)), lambda rng: SpecialEuclidean(3).random_uniform(rng)),
    ],
    ids=["sphere", "spd", "so3", "se3"],
)
def test_exact_step_reaches_target(manifold, sample, rng):
    y_pred, y_true = sample(rng), sample(rng)
    g = loss_gradient(manifold, y_pred, y_true)
    d = np.sqrt(squared_geodesic_loss(manifold, y_pred, y_true))
    step = manifold.exp(-d * g / manifold.norm(g, y_pred), y_pred)
    assert squared_geodesic_loss(manifold, step, y_true) < 1e-10
