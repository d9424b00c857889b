"""Command-line entry point: ``riemkit <subcommand> [options]``.

Exit codes: 0 success, 1 input error, 2 numerical failure (non-convergence
or cut locus).  CSV output uses ``,`` separators and 17 significant digits.
"""
import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from riemkit import connectome, plotting
from riemkit.base import Euclidean
from riemkit.embedded import HyperbolicSpace, Hypersphere
from riemkit.errors import InvalidInputError, NotOnManifoldError, NumericalError
from riemkit.liegroup import InvariantMetric, RigidTransform, SpecialEuclidean, SpecialOrthogonal
from riemkit.numerics import TolerancePolicy
from riemkit.optim import quadratic_form, riemannian_gd
from riemkit.spd import METRICS, SPDMatrices
from riemkit.stats import frechet_mean, tangent_pca

MANIFOLDS = ("sphere", "hyperbolic", "spd", "so3", "se3", "euclidean")


def _g(x):
    return f"{float(x):.17g}"


def _emit(text, out):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    parent = os.path.dirname(os.path.abspath(out))
    os.makedirs(parent, exist_ok=True)
    with open(out, "w", newline="") as fh:
        fh.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_g(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _json_text(obj):
    return json.dumps(obj, indent=2) + "\n"


def _svg_path(args, default_stem):
    if getattr(args, "svg", None):
        return args.svg
    if args.out and args.out != "-":
        return os.path.splitext(args.out)[0] + ".svg"
    return default_stem + ".svg"


def _vector(text, name):
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise InvalidInputError(f"--{name}: expected comma-separated numbers, got {text!r}") from exc


def _load_matrix(path):
    try:
        with open(path) as fh:
            text = fh.read()
        if text.lstrip().startswith("["):
            return np.asarray(json.loads(text), dtype=float)
        return np.loadtxt(io.StringIO(text), delimiter=",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read matrix from {path}: {exc}") from exc


# -- optimize-sphere ---------------------------------------------------------------
def cmd_optimize_sphere(args):
    rng = np.random.default_rng(args.seed)
    tol = TolerancePolicy(atol=args.atol)
    if args.matrix:
        a = _load_matrix(args.matrix)
    else:
        a = SPDMatrices(args.dim, tol).random_uniform(rng, bound=args.bound)
    n = a.shape[0]
    sphere = Hypersphere(n - 1, tol)
    field_ = quadratic_form(a)
    if args.x0:
        x0 = _vector(args.x0, "x0")
        if x0.shape != (n,):
            raise InvalidInputError(f"--x0 needs {n} values")
        x0 = sphere.projection(x0)
    else:
        x0 = sphere.random_uniform(rng)
    trace = riemannian_gd(sphere, field_, x0, lr=args.lr, max_iter=args.max_iter, tol=args.tol)
    if args.format == "json":
        _emit(
            _json_text(
                {
                    "matrix": a.tolist(),
                    "converged": trace.converged,
                    "iterates": [np.asarray(x).tolist() for x in trace.iterates],
                    "values": trace.values,
                    "grad_norms": trace.grad_norms,
                }
            ),
            args.out,
        )
    else:
        buf = io.StringIO()
        trace.write_csv(buf)
        _emit(buf.getvalue(), args.out)
    if n == 3:
        _emit(plotting.sphere_trajectory_svg(np.stack(trace.iterates)), _svg_path(args, "optimize_sphere"))
    x = trace.iterates[-1]
    print(
        f"iterations={len(trace) - 1} value={trace.values[-1]:.12g} "
        f"grad_norm={trace.grad_norms[-1]:.3g} converged={trace.converged} "
        f"x=[{', '.join(f'{c:.9f}' for c in x)}]",
        file=sys.stderr,
    )
    return 0 if trace.converged else 2


# -- poincare -----------------------------------------------------------------------
def poincare_grid(space, lines, extent, resolution):
    """Geodesics orthogonal to the two coordinate axes at regularly spaced feet."""
    o = space.origin
    taus = np.linspace(-extent, extent, resolution)
    curves = []
    for axis, other in ((1, 2), (2, 1)):
        for s in np.linspace(-extent, extent, lines):
            v = np.zeros(3)
            v[axis] = s
            foot = space.exp(v, o)
            direction = np.zeros(3)
            direction[other] = 1.0
            # the normal direction is parallel along the axis geodesic
            direction = space.to_tangent(direction, foot)
            pts = space.exp(taus[:, None] * direction, np.broadcast_to(foot, (resolution, 3)))
            curves.append(pts)
    return curves


def poincare_square(space, size, resolution):
    """Four geodesic edges between vertices at distance ``size`` from the origin."""
    o = space.origin
    angles = np.pi / 4 + np.pi / 2 * np.arange(4)
    vertices = [space.exp(np.array([0.0, size * np.cos(a), size * np.sin(a)]), o) for a in angles]
    ts = np.linspace(0.0, 1.0, resolution)
    curves = []
    for k in range(4):
        curve = space.geodesic(vertices[k], end_point=vertices[(k + 1) % 4])
        curves.append(curve(ts))
    return curves


def cmd_poincare(args):
    if args.resolution < 2:
        raise InvalidInputError("--resolution must be at least 2")
    space = HyperbolicSpace(2, TolerancePolicy(atol=args.atol))
    if args.figure == "grid":
        curves = poincare_grid(space, args.lines, args.extent, args.resolution)
    else:
        curves = poincare_square(space, args.size, args.resolution)
    disk = [space.to_poincare_disk(c) for c in curves]
    worst = max(float(np.max(np.linalg.norm(d, axis=1))) for d in disk)
    if not worst < 1.0:
        raise NumericalError("a sample left the open unit disk")
    header = ["curve", "index", "x0", "x1", "x2", "disk_x", "disk_y"]
    rows = [
        [k, i, *map(float, p), *map(float, q)]
        for k, (c, d) in enumerate(zip(curves, disk))
        for i, (p, q) in enumerate(zip(c, d))
    ]
    if args.format == "json":
        _emit(_json_text({"figure": args.figure, "curves": [d.tolist() for d in disk]}), args.out)
    else:
        _emit(_csv_text(header, rows), args.out)
    title = "Geodesic grid on H2" if args.figure == "grid" else "Geodesic square on H2"
    _emit(plotting.poincare_svg(disk, title, dots=args.figure == "square"), _svg_path(args, "poincare"))
    return 0


# -- connectome -------------------------------------------------------------------------
def cmd_connectome(args):
    records = connectome.load_dataset(args.data_dir)
    report = connectome.run_pipeline(records, gamma=args.gamma, metric=args.metric)
    for w in report["warnings"]:
        print(f"warning: {w}", file=sys.stderr)
    if args.format == "csv":
        names = report["names"]
        rows = [[n, *map(float, row)] for n, row in zip(names, report["distance_matrix"])]
        _emit(_csv_text(["name", *names], rows), args.out)
    else:
        _emit(_json_text(report), args.out)
    print(f"metric={args.metric} accuracy={report['accuracy']:.4f} f1={report['f1']:.4f}", file=sys.stderr)
    return 0


def cmd_make_connectomes(args):
    rng = np.random.default_rng(args.seed)
    records, _ = connectome.make_synthetic(rng, args.nodes, args.per_class, args.noise)
    connectome.write_dataset(records, args.out_dir)
    print(f"wrote {len(records)} records to {args.out_dir}", file=sys.stderr)
    return 0


# -- geodesic ---------------------------------------------------------------------------
def cmd_geodesic(args):
    tol = TolerancePolicy(atol=args.atol)
    if args.steps < 1:
        raise InvalidInputError("--steps must be positive")
    start, end = _vector(getattr(args, "from"), "from"), _vector(args.to, "to")
    if args.group == "so3":
        group = SpecialOrthogonal(3, tol)
        if start.shape != (3,) or end.shape != (3,):
            raise InvalidInputError("so3 endpoints are rotation vectors (3 values)")
        p, q = group.exp(start), group.exp(end)
    else:
        group = SpecialEuclidean(3, tol)
        if start.shape != (6,) or end.shape != (6,):
            raise InvalidInputError("se3 endpoints are (rotation vector, translation) 6-vectors")
        p, q = group.from_vector(start), group.from_vector(end)
    metric = InvariantMetric(group)
    curve = metric.geodesic(p, end_point=q)
    ts = np.linspace(0.0, 1.0, args.steps + 1)
    points = [curve(t) for t in ts]
    points[0], points[-1] = p, q
    size = 3 if args.group == "so3" else 4
    header = ["step", "t"] + [f"m{i}{j}" for i in range(size) for j in range(size)] + ["rx", "ry", "rz"]
    if args.group == "se3":
        header += ["tx", "ty", "tz"]
    rows = []
    for k, (t, x) in enumerate(zip(ts, points)):
        if args.group == "so3":
            mat, vec = x, group.log(x)
        else:
            mat, vec = x.matrix(), group.to_vector(x)
        rows.append([k, float(t), *map(float, mat.ravel()), *map(float, vec)])
    if args.format == "json":
        _emit(_json_text({"group": args.group, "columns": header, "rows": rows}), args.out)
    else:
        _emit(_csv_text(header, rows), args.out)
    return 0


# -- frechet / tpca ---------------------------------------------------------------------
def _manifold_and_points(args, raw):
    tol = TolerancePolicy(atol=args.atol)
    data = [np.asarray(p, dtype=float) for p in raw]
    if not data:
        raise InvalidInputError("points file is empty")
    kind = args.manifold
    if kind == "sphere":
        return Hypersphere(data[0].size - 1, tol), data
    if kind == "hyperbolic":
        return HyperbolicSpace(data[0].size - 1, tol), data
    if kind == "euclidean":
        return Euclidean(data[0].size, tol), data
    if kind == "spd":
        return SPDMatrices(data[0].shape[0], tol), data
    if kind == "so3":
        group = SpecialOrthogonal(3, tol)
        return InvariantMetric(group), [group.exp(p) if p.shape == (3,) else p for p in data]
    group = SpecialEuclidean(3, tol)
    pts = [
        group.from_vector(p) if p.shape == (6,) else RigidTransform.from_matrix(p) if p.shape == (4, 4) else p
        for p in data
    ]
    return InvariantMetric(group), pts


def _point_json(manifold, point):
    if isinstance(point, RigidTransform):
        return {"matrix": point.matrix().tolist(), "vector": manifold.group.to_vector(point).tolist()}
    if isinstance(manifold, InvariantMetric):
        return {"matrix": np.asarray(point).tolist(), "vector": manifold.group.log(point).tolist()}
    return np.asarray(point).tolist()


def _load_points(args):
    try:
        with open(args.points) as fh:
            raw = json.load(fh)
    except (OSError, ValueError) as exc:
        raise InvalidInputError(f"cannot read points from {args.points}: {exc}") from exc
    if not isinstance(raw, list):
        raise InvalidInputError("points file must hold a JSON array")
    manifold, points = _manifold_and_points(args, raw)
    bad = []
    for i, p in enumerate(points):
        try:
            ok = bool(np.all(manifold.belongs(p)))
        except (InvalidInputError, ValueError):
            ok = False
        if not ok:
            bad.append(i)
    if bad:
        err = NotOnManifoldError(f"points not on the {args.manifold} manifold: rows {bad}")
        err.rows = bad
        raise err
    weights = None
    if args.weights:
        if os.path.isfile(args.weights):
            with open(args.weights) as fh:
                weights = np.asarray(json.load(fh), dtype=float)
        else:
            weights = _vector(args.weights, "weights")
    return manifold, points, weights


def cmd_frechet(args):
    manifold, points, weights = _load_points(args)
    res = frechet_mean(manifold, points, weights, epsilon=args.epsilon, max_iter=args.max_iter)
    out = {
        "manifold": args.manifold,
        "mean": _point_json(manifold, res.mean),
        "iterations": res.iterations,
        "update_norms": res.update_norms,
        "converged": res.converged,
        "variance": res.variance,
    }
    _emit(_json_text(out), args.out)
    return 0 if res.converged else 2


def cmd_tpca(args):
    manifold, points, weights = _load_points(args)
    res = tangent_pca(manifold, points, weights, epsilon=args.epsilon, max_iter=args.max_iter)
    out = {
        "manifold": args.manifold,
        "base_point": _point_json(manifold, res.base_point),
        "eigenvalues": res.eigenvalues.tolist(),
        "explained_ratio": res.explained_ratio.tolist(),
        "components": [np.asarray(c).tolist() for c in res.components],
    }
    _emit(_json_text(out), args.out)
    return 0


# -- parser -----------------------------------------------------------------------------
def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--atol", type=float, default=1e-8, help="membership tolerance")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)

    parser = argparse.ArgumentParser(prog="riemkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize-sphere", parents=[common], help="minimise x^T A x on the sphere")
    p.add_argument("--matrix", help="SPD matrix as JSON or CSV; sampled from --seed when omitted")
    p.add_argument("--dim", type=int, default=3, help="size of the sampled matrix")
    p.add_argument("--bound", type=float, default=1.0, help="entry bound of the SPD sampler")
    p.add_argument("--x0", help="comma-separated start point (normalised); random when omitted")
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--max-iter", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-10, help="gradient-norm stopping threshold")
    p.add_argument("--svg", help="SVG path (default: next to --out)")
    p.set_defaults(func=cmd_optimize_sphere, default_format="csv")

    p = sub.add_parser("poincare", parents=[common], help="geodesic grid or square in the Poincare disk")
    p.add_argument("--figure", choices=("grid", "square"), default="grid")
    p.add_argument("--resolution", type=int, default=64, help="samples per geodesic")
    p.add_argument("--lines", type=int, default=9, help="grid lines per direction")
    p.add_argument("--extent", type=float, default=2.0, help="grid half-width (geodesic distance)")
    p.add_argument("--size", type=float, default=1.5, help="distance from centre to square vertices")
    p.add_argument("--svg", help="SVG path (default: next to --out)")
    p.set_defaults(func=cmd_poincare, default_format="csv")

    p = sub.add_parser("connectome", parents=[common], help="classify graphs by SPD Laplacian distances")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--metric", choices=METRICS, default="riemannian")
    p.set_defaults(func=cmd_connectome, default_format="json")

    p = sub.add_parser("make-connectomes", parents=[common], help="write a synthetic two-class dataset")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--nodes", type=int, default=8)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--noise", type=float, default=0.05)
    p.set_defaults(func=cmd_make_connectomes, default_format="csv")

    p = sub.add_parser("geodesic", parents=[common], help="SO(3)/SE(3) geodesic interpolation")
    p.add_argument("--group", choices=("so3", "se3"), default="so3")
    p.add_argument("--from", required=True, help="rotation vector (so3) or rotvec,translation (se3)")
    p.add_argument("--to", required=True)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=cmd_geodesic, default_format="csv")

    for name, func, text in (
        ("frechet", cmd_frechet, "weighted Frechet mean"),
        ("tpca", cmd_tpca, "tangent PCA at the Frechet mean"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--points", required=True, help="JSON array of points")
        p.add_argument("--manifold", choices=MANIFOLDS, required=True)
        p.add_argument("--weights", help="JSON file or comma-separated weights")
        p.add_argument("--epsilon", type=float, default=1e-10)
        p.add_argument("--max-iter", type=int, default=64)
        p.set_defaults(func=func, default_format="json")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        TolerancePolicy(atol=args.atol)
        return args.func(args)
    except (InvalidInputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
