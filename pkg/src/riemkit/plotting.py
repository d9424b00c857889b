"""Static SVG figures: orthographic view of S^2 and the Poincaré disk.

Fixed 512 x 512 viewbox and fixed colours so that reruns are byte-identical.
"""
import numpy as np

SIZE = 512
CENTER = 256.0
RADIUS = 240.0

BOUNDARY = "#333333"
GUIDE = "#bbbbbb"
TRAJECTORY = "#d62728"
CURVE = "#1f77b4"
START = "#2ca02c"
END = "#1f3fb4"


def _xy(p):
    return CENTER + RADIUS * p[0], CENTER - RADIUS * p[1]


def _fmt(v):
    if not np.isfinite(v):
        raise ValueError("refusing to emit a non-finite SVG coordinate")
    return f"{v:.4f}"


def _polyline(points, colour, width=1.5, dashed=False):
    coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(_xy, points))
    dash = ' stroke-dasharray="4 3"' if dashed else ""
    return f'<polyline points="{coords}" fill="none" stroke="{colour}" stroke-width="{width}"{dash}/>'


def _circle(center, r, colour, fill="none", width=1.5):
    x, y = _xy(center)
    return (
        f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{fill}" '
        f'stroke="{colour}" stroke-width="{width}"/>'
    )


def _document(elements, title):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">\n<title>{title}</title>\n'
        f'<rect width="{SIZE}" height="{SIZE}" fill="#ffffff"/>\n'
    )
    return head + "\n".join(elements) + "\n</svg>\n"


def sphere_trajectory_svg(points, title="Riemannian gradient descent on S2"):
    """Orthographic projection seen from +z; the far hemisphere is dashed."""
    pts = np.asarray(points, dtype=float)
    elements = [_circle((0.0, 0.0), RADIUS, BOUNDARY)]
    t = np.linspace(0.0, 2.0 * np.pi, 121)
    for lat in (-60, -30, 30, 60):
        r = np.cos(np.radians(lat))
        elements.append(_polyline(np.c_[r * np.cos(t), r * np.sin(t)], GUIDE, width=0.75, dashed=lat < 0))
    for lon in range(0, 180, 30):
        a = np.radians(lon)
        elements.append(_polyline(np.c_[np.cos(a) * np.cos(t), np.sin(a) * np.cos(t)], GUIDE, width=0.75))
    if len(pts):
        visible = pts[:, 2] >= 0
        start = 0
        for k in range(1, len(pts) + 1):
            if k == len(pts) or visible[k] != visible[start]:
                seg = pts[max(start - 1, 0):k, :2]
                if len(seg) > 1:
                    elements.append(_polyline(seg, TRAJECTORY, width=2.0, dashed=not visible[start]))
                start = k
        elements.append(_circle(pts[0, :2], 5.0, START, fill=START))
        elements.append(_circle(pts[-1, :2], 5.0, END, fill=END))
    return _document(elements, title)


def poincare_svg(curves, title="Poincare disk", dots=False):
    """Unit-disk boundary plus one polyline per curve of disk coordinates."""
    elements = [_circle((0.0, 0.0), RADIUS, BOUNDARY)]
    for curve in curves:
        curve = np.asarray(curve, dtype=float)
        if len(curve) > 1:
            elements.append(_polyline(curve, CURVE))
        if dots or len(curve) == 1:
            elements.extend(_circle(p, 2.5, TRAJECTORY, fill=TRAJECTORY) for p in curve)
    return _document(elements, title)
