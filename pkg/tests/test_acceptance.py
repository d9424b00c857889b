"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line; the lines are repeated in the
pytest terminal summary.  Run alone with ``pytest tests/test_acceptance.py``.
"""
import csv
import itertools
import sys
import time
import warnings

import numpy as np
import pytest
import scipy.linalg

import conftest
from conftest import random_congruence, random_rotvec, random_spd
from riemkit.base import Euclidean
from riemkit.cli import main
from riemkit.connectome import make_synthetic, regularized_laplacian, run_pipeline
from riemkit.embedded import HyperbolicSpace, Hypersphere, minkowski_inner
from riemkit.errors import CutLocusError
from riemkit.liegroup import InvariantMetric, SpecialEuclidean, SpecialOrthogonal, lie_geodesic
from riemkit.optim import loss_gradient, quadratic_form, riemannian_gd, squared_geodesic_loss
from riemkit.spd import SPDMatrices
from riemkit.stats import frechet_mean, tangent_pca

SUITE_START = time.perf_counter()

SO3 = SpecialOrthogonal(3)
SE3 = SpecialEuclidean(3)
SPD3 = SPDMatrices(3)


def report(tag, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} {tag}: {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def rotation_angle(r):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return float(np.linalg.norm(SO3.log(r)))


def random_pair(rng, sampler, metric):
    """Two points whose logarithm is defined (away from the rotation cut locus)."""
    while True:
        a, b = sampler(rng), sampler(rng)
        try:
            metric.log(b, a)
        except CutLocusError:
            continue
        if not isinstance(metric, InvariantMetric):
            return a, b
        rel = metric.group.compose(metric.group.inverse(a), b)
        rot = rel.rot if hasattr(rel, "rot") else rel
        if rotation_angle(rot) <= np.pi - 0.1:
            return a, b


# -- 1 -------------------------------------------------------------------------------
def _sphere_errors(rng, dim, n):
    sphere = Hypersphere(dim)
    p = sphere.random_uniform(rng, n)
    v = sphere.to_tangent(rng.standard_normal((n, dim + 1)), p)
    v *= (rng.uniform(0, np.pi - 0.1, n) / np.linalg.norm(v, axis=1))[:, None]
    return np.linalg.norm(sphere.log(sphere.exp(v, p), p) - v, axis=1).max()


def _hyperbolic_errors(rng, dim, n):
    space = HyperbolicSpace(dim)
    p = space.random_point(rng, n)
    v = space.to_tangent(rng.standard_normal((n, dim + 1)), p)
    v *= (rng.uniform(0, 10.0, n) / np.sqrt(minkowski_inner(v, v)))[:, None]
    back = space.log(space.exp(v, p), p)
    # error measured in the metric norm of the base tangent space
    diff = space.to_tangent(back - v, p)
    return np.sqrt(np.maximum(minkowski_inner(diff, diff), 0.0)).max()


def _spd_errors(rng, n):
    worst = 0.0
    for _ in range(n):
        s1, s2 = random_spd(rng, 3), random_spd(rng, 3)
        v = SPD3.log(s2, s1)
        # tangent error in the affine-invariant norm at the base, point error entrywise
        worst = max(worst, SPD3.norm(SPD3.log(SPD3.exp(v, s1), s1) - v, s1))
        worst = max(worst, np.max(np.abs(SPD3.exp(v, s1) - s2)))
    return worst


def _so3_errors(rng, n):
    w = np.stack([random_rotvec(rng, np.pi - 0.1) for _ in range(n)])
    return np.linalg.norm(SO3.log_batch(SO3.exp_batch(w)) - w, axis=1).max()


def _se3_errors(rng, n):
    worst = 0.0
    for _ in range(n):
        xi = np.r_[random_rotvec(rng, np.pi - 0.1), rng.uniform(-5, 5, 3)]
        worst = max(worst, np.linalg.norm(SE3.group_log(SE3.group_exp(xi)) - xi))
    return worst


def test_c1_exp_log_roundtrips():
    rng = np.random.default_rng(1)
    n = 1000
    start = time.perf_counter()
    errors = {
        "S2": _sphere_errors(rng, 2, n),
        "S5": _sphere_errors(rng, 5, n),
        "H2": _hyperbolic_errors(rng, 2, n),
        "H5": _hyperbolic_errors(rng, 5, n),
        "SPD3": _spd_errors(rng, n),
        "SO3": _so3_errors(rng, n),
        "SE3": _se3_errors(rng, n),
    }
    elapsed = time.perf_counter() - start
    worst = max(errors.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errors.items())
    report("C1 exp/log roundtrips", worst <= 1e-8 and elapsed < 5.0, f"max err {worst:.2e} ({detail}); {elapsed:.2f} s")


# -- 2 -------------------------------------------------------------------------------
def _spd_sampler(rng):
    return random_spd(rng, 3)


def _axiom_cases():
    return [
        ("S2", Hypersphere(2).dist, lambda r: Hypersphere(2).random_uniform(r)),
        ("S5", Hypersphere(5).dist, lambda r: Hypersphere(5).random_uniform(r)),
        ("H2", HyperbolicSpace(2).dist, lambda r: HyperbolicSpace(2).random_point(r, max_radius=4.0)),
        ("H5", HyperbolicSpace(5).dist, lambda r: HyperbolicSpace(5).random_point(r, max_radius=4.0)),
        ("SPD3 d_R", SPD3.dist_riemannian, _spd_sampler),
        ("SPD3 d_LED", SPD3.dist_log_euclidean, _spd_sampler),
        ("SPD3 frobenius", SPD3.dist_frobenius, _spd_sampler),
        ("SO3", InvariantMetric(SO3).dist, SO3.random_uniform),
        ("SE3", InvariantMetric(SE3).dist, SE3.random_uniform),
    ]


def metric_axiom_violations(dist, points_triples):
    sym = zero = tri = 0.0
    for a, b, c in points_triples:
        ab, ba, bc, ac = dist(a, b), dist(b, a), dist(b, c), dist(a, c)
        sym = max(sym, abs(ab - ba))
        zero = max(zero, abs(dist(a, a)))
        tri = max(tri, ac - (ab + bc))
    return sym, zero, tri


def test_c2_metric_axioms():
    rng = np.random.default_rng(2)
    failures, worst = [], [0.0, 0.0, -np.inf]
    for name, dist, sampler in _axiom_cases():
        triples = []
        while len(triples) < 100:
            t = [sampler(rng) for _ in range(3)]
            try:
                for a, b in itertools.permutations(t, 2):
                    dist(a, b)
            except CutLocusError:
                continue
            triples.append(t)
        sym, zero, tri = metric_axiom_violations(dist, triples)
        worst = [max(worst[0], sym), max(worst[1], zero), max(worst[2], tri)]
        if sym > 1e-10 or zero > 1e-10 or tri > 1e-8:
            failures.append(name)
    report(
        "C2 metric axioms",
        not failures,
        f"symmetry {worst[0]:.1e}, self-distance {worst[1]:.1e}, triangle excess {worst[2]:.1e}"
        + (f"; failing {failures}" if failures else ""),
    )


# -- 3 -------------------------------------------------------------------------------
def test_c3_invariance():
    rng = np.random.default_rng(3)
    affine = 0.0
    for _ in range(100):
        s1, s2 = random_spd(rng, 3), random_spd(rng, 3)
        g = random_congruence(rng, 3, max_cond=100.0)
        assert np.linalg.cond(g) <= 100.0 + 1e-9
        d = SPD3.dist_riemannian(s1, s2)
        affine = max(affine, abs(SPD3.dist_riemannian(g.T @ s1 @ g, g.T @ s2 @ g) - d))
    left = 0.0
    for group in (SO3, SE3):
        d = group.alg_dim
        a = rng.standard_normal((d, d))
        for metric in (InvariantMetric(group), InvariantMetric(group, a @ a.T + np.eye(d))):
            for _ in range(100):
                p, q = random_pair(rng, group.random_uniform, metric)
                g = group.random_uniform(rng)
                moved = metric.dist(group.compose(g, p), group.compose(g, q))
                left = max(left, abs(moved - metric.dist(p, q)))
    report("C3 invariance", affine <= 1e-7 and left <= 1e-9, f"affine d_R err {affine:.2e}, left-invariance err {left:.2e}")


# -- 4 -------------------------------------------------------------------------------
def test_c4_quadratic_form_benchmark():
    sphere = Hypersphere(2)
    worst, iters, converged = 1.0, 0, 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        a = SPD3.random_uniform(rng)
        x0 = sphere.random_uniform(rng)
        trace = riemannian_gd(sphere, quadratic_form(a), x0, lr=0.1, max_iter=5000)
        v_min = scipy.linalg.eigh(a)[1][:, 0]
        worst = min(worst, abs(trace.iterates[-1] @ v_min))
        iters = max(iters, len(trace) - 1)
        converged += trace.converged
    report(
        "C4 quadratic-form benchmark",
        worst > 1 - 1e-4 and iters <= 5000,
        f"min |x.v_min| = {worst:.12f} over 20 seeds, max iterations {iters}, {converged}/20 hit gradient tolerance",
    )


# -- 5 -------------------------------------------------------------------------------
def grid_minimizer(points, radius, step=0.005):
    """Brute-force minimizer of the sum of squared arccos distances near the north pole."""
    theta = np.arange(0.0, radius + step, step)
    phi = np.arange(0.0, 2 * np.pi, step)
    t, f = np.meshgrid(theta, phi, indexing="ij")
    grid = np.stack([np.sin(t) * np.cos(f), np.sin(t) * np.sin(f), np.cos(t)], axis=-1).reshape(-1, 3)
    cost = np.zeros(len(grid))
    for x in points:
        cost += np.arccos(np.clip(grid @ x, -1.0, 1.0)) ** 2
    return grid[np.argmin(cost)]


def test_c5_frechet_mean_oracle():
    sphere = Hypersphere(2)
    pole = np.array([0.0, 0.0, 1.0])
    worst = 0.0
    for seed in range(5):
        rng = np.random.default_rng(50 + seed)
        pts = []
        for _ in range(10):
            d = rng.standard_normal(2)
            d = np.r_[d / np.linalg.norm(d), 0.0]
            r = rng.uniform(0, np.pi / 4)
            pts.append(np.cos(r) * pole + np.sin(r) * d)
        mean = frechet_mean(sphere, pts).mean
        ref = grid_minimizer(pts, np.pi / 4)
        worst = max(worst, float(np.arccos(np.clip(mean @ ref, -1, 1))))
    rng = np.random.default_rng(55)
    data = rng.standard_normal((25, 4)) * 10
    w = rng.uniform(0.1, 5, 25)
    flat = np.max(np.abs(frechet_mean(Euclidean(4), list(data), w).mean - np.average(data, axis=0, weights=w)))
    report("C5 Frechet mean oracle", worst <= 1e-2 and flat <= 1e-12, f"grid distance {worst:.2e} (5 seeds), flat stub err {flat:.1e}")


# -- 6 -------------------------------------------------------------------------------
def test_c6_tangent_pca():
    rng = np.random.default_rng(6)
    sphere = Hypersphere(2)
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    angles = rng.uniform(-1.0, 1.0, 20)
    pts = [np.cos(a) * q[:, 0] + np.sin(a) * q[:, 1] for a in angles]
    ratio = tangent_pca(sphere, pts).explained_ratio[0]
    data = rng.standard_normal((50, 5)) @ rng.standard_normal((5, 5))
    res = tangent_pca(Euclidean(5), list(data))
    centred = data - data.mean(axis=0)
    _, sing, vt = np.linalg.svd(centred, full_matrices=False)
    vals_err = np.max(np.abs(res.eigenvalues - sing**2 / len(data)))
    comp_err = max(1 - abs(res.components[k] @ vt[k]) for k in range(5))
    flat = max(vals_err, comp_err)
    report("C6 tangent PCA", ratio >= 0.999 and flat <= 1e-10, f"great-circle ratio {ratio:.15f}, flat-stub vs SVD PCA err {flat:.1e}")


# -- 7 -------------------------------------------------------------------------------
def fd_relative_error(manifold, y_pred, y_true, h=1e-6):
    basis = manifold.tangent_basis(y_pred)
    grad = loss_gradient(manifold, y_pred, y_true)
    closed = np.array([manifold.inner_product(grad, b, y_pred) for b in basis])
    fd = np.array(
        [
            (
                squared_geodesic_loss(manifold, manifold.exp(h * b, y_pred), y_true)
                - squared_geodesic_loss(manifold, manifold.exp(-h * b, y_pred), y_true)
            )
            / (2 * h)
            for b in basis
        ]
    )
    return np.linalg.norm(fd - closed) / np.linalg.norm(closed)


def test_c7_loss_gradients():
    rng = np.random.default_rng(7)
    cases = {
        "S2": (Hypersphere(2), lambda r: Hypersphere(2).random_uniform(r)),
        "SPD3": (SPD3, lambda r: SPD3.random_uniform(r)),
        "SO3": (InvariantMetric(SO3), SO3.random_uniform),
        "SE3": (InvariantMetric(SE3), SE3.random_uniform),
    }
    errors = {}
    for name, (manifold, sampler) in cases.items():
        worst = 0.0
        for _ in range(10):
            a, b = random_pair(rng, sampler, manifold)
            if name == "S2" and a @ b < -0.99:
                continue
            worst = max(worst, fd_relative_error(manifold, a, b))
        errors[name] = worst
    worst = max(errors.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errors.items())
    report("C7 loss gradients", worst <= 1e-5, f"max relative error {worst:.2e} ({detail})")


# -- 8 -------------------------------------------------------------------------------
def _rotation_part(x):
    return x.rot if hasattr(x, "rot") else np.asarray(x)


def _membership(x):
    r = _rotation_part(x)
    err = max(np.max(np.abs(r.T @ r - np.eye(3))), abs(np.linalg.det(r) - 1.0))
    if hasattr(x, "matrix"):
        m = x.matrix()
        err = max(err, np.max(np.abs(m[3] - [0.0, 0.0, 0.0, 1.0])))
    return err


def _point_err(a, b):
    return np.max(np.abs((a.matrix() - b.matrix()) if hasattr(a, "matrix") else np.asarray(a) - b))


def test_c8_geodesic_interpolation():
    rng = np.random.default_rng(8)
    ts = np.linspace(0.0, 1.0, 51)
    end_err = member = speed = 0.0
    for group in (SO3, SE3):
        metric = InvariantMetric(group)
        for _ in range(10):
            p, q = random_pair(rng, group.random_uniform, metric)
            curve = lie_geodesic(metric, p, q)
            samples = [curve(t) for t in ts]
            end_err = max(end_err, _point_err(samples[0], p), _point_err(samples[-1], q))
            member = max(member, max(_membership(x) for x in samples))
            steps = np.array(
                [rotation_angle(_rotation_part(a).T @ _rotation_part(b)) for a, b in zip(samples, samples[1:])]
            )
            speed = max(speed, np.ptp(steps) / steps.mean())
    report(
        "C8 geodesic interpolation",
        end_err <= 1e-10 and member <= 1e-9 and speed <= 1e-6,
        f"endpoint err {end_err:.1e}, membership err {member:.1e}, rotation speed spread {speed:.1e}",
    )


# -- 9 -------------------------------------------------------------------------------
def _poincare_run(tmp, figure, tag):
    out = tmp / f"{figure}_{tag}.csv"
    code = main(["poincare", "--figure", figure, "--seed", "9", "--out", str(out)])
    assert code == 0
    return out.read_bytes(), out.with_suffix(".svg").read_bytes()


def test_c9_poincare_figures(tmp_path, capsys):
    # default grid: 9 lines per axis, the middle line of each family has its foot at the origin
    lines = 9
    through_origin = {"grid": {lines // 2, lines + lines // 2}, "square": set()}
    max_norm, straight, identical = 0.0, 0.0, True
    for figure in ("grid", "square"):
        first = _poincare_run(tmp_path, figure, "a")
        second = _poincare_run(tmp_path, figure, "b")
        identical &= first == second
        rows = list(csv.DictReader(first[0].decode().splitlines()))
        curves = {}
        for r in rows:
            curves.setdefault(int(r["curve"]), []).append([float(r["disk_x"]), float(r["disk_y"])])
        for k, pts in curves.items():
            pts = np.array(pts)
            norms = np.linalg.norm(pts, axis=1)
            max_norm = max(max_norm, norms.max())
            if k in through_origin[figure]:
                # every sample on one line through the disk centre
                direction = pts[np.argmax(norms)] / norms.max()
                straight = max(straight, np.max(np.abs(pts[:, 0] * direction[1] - pts[:, 1] * direction[0])))
    capsys.readouterr()
    report(
        "C9 Poincare figures",
        max_norm < 1.0 and straight <= 1e-9 and identical,
        f"max disk norm {max_norm:.6f}, collinearity err of lines through the origin {straight:.1e}, "
        f"reruns byte-identical: {identical}",
    )


# -- 10 ------------------------------------------------------------------------------
def test_c10_connectome_pipeline():
    records, templates = make_synthetic(np.random.default_rng(10), n_nodes=8, per_class=20)
    spd = SPDMatrices(8)
    between = spd.dist_riemannian(regularized_laplacian(templates["ring"]), regularized_laplacian(templates["community"]))
    report_ = run_pipeline(records, gamma=1.0, metric="riemannian")
    d = np.array(report_["distance_matrix"])
    labels = np.array(report_["labels"])
    same = labels[:, None] == labels[None, :]
    within = d[same].max()
    sym = np.max(np.abs(d - d.T))
    zero = np.max(np.abs(np.diag(d)))
    tri = np.max(d[:, None, :] - (d[:, :, None] + d[None, :, :]))
    axioms = sym <= 1e-10 and zero <= 1e-10 and tri <= 1e-8
    elapsed = time.perf_counter() - SUITE_START
    report(
        "C10 synthetic connectome",
        between >= 2 and within < 0.5 and report_["accuracy"] >= 0.9 and axioms and elapsed < 60,
        f"d_R(class means) {between:.3f}, max within-class {within:.3f}, accuracy {report_['accuracy']:.3f}, "
        f"axioms ok: {axioms}, acceptance suite {elapsed:.1f} s",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
