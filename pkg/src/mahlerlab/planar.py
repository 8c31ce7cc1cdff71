"""Small exact 2D kernel: shoelace areas, halfplane clipping, hull duality."""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull

from .errors import CollinearPoints


def shoelace(poly: np.ndarray) -> float:
    """Signed area of a polygon given as an (n,2) vertex array."""
    p = np.asarray(poly, dtype=float)
    if len(p) < 3:
        return 0.0
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def clip_halfplane(poly: np.ndarray, n, c: float) -> np.ndarray:
    """Clip a convex polygon to the halfplane {p : n.p <= c} (Sutherland-Hodgman)."""
    p = np.asarray(poly, dtype=float)
    n = np.asarray(n, dtype=float)
    if len(p) == 0:
        return p
    out = []
    vals = p @ n - c
    m = len(p)
    for i in range(m):
        j = (i + 1) % m
        vi, vj = vals[i], vals[j]
        if vi <= 0:
            out.append(p[i])
        if (vi < 0) != (vj < 0) and vi != vj:
            t = vi / (vi - vj)
            out.append(p[i] + t * (p[j] - p[i]))
    return np.array(out) if out else np.empty((0, 2))


def clip_quadrant(poly: np.ndarray, sx: int, sy: int) -> np.ndarray:
    """Clip to {sx*x >= 0, sy*y >= 0}."""
    q = clip_halfplane(poly, (-sx, 0.0), 0.0)
    return clip_halfplane(q, (0.0, -sy), 0.0)


def dual_vertex2(p, q):
    """The point v with v.p = v.q = 1."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    det = p[0] * q[1] - p[1] * q[0]
    if abs(det) <= 1e-14 * max(1.0, float(np.abs(p).max() * np.abs(q).max())):
        raise CollinearPoints("points are linearly dependent")
    return np.array([q[1] - p[1], p[0] - q[0]]) / det


def halfspaces_to_polygon(normals: np.ndarray) -> np.ndarray:
    """Vertices (ccw) of {p : a.p <= 1 for each row a}, origin interior.

    Uses polar duality: the region is the polar of conv{a_i}, so its
    vertices are the edge duals of that hull, which keeps everything exact.
    """
    a = np.asarray(normals, dtype=float)
    scale = np.max(np.abs(a))
    a = a[np.linalg.norm(a, axis=1) > 1e-12 * scale]
    hull = ConvexHull(a)
    cyc = hull.vertices  # ccw order
    pts = []
    for i in range(len(cyc)):
        p, q = a[cyc[i]], a[cyc[(i + 1) % len(cyc)]]
        pts.append(dual_vertex2(p, q))
    poly = np.array(pts)
    if shoelace(poly) < 0:
        poly = poly[::-1]
    return poly


def hull2(points: np.ndarray) -> np.ndarray:
    """CCW convex hull vertices of a 2D point cloud."""
    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    return pts[hull.vertices]
