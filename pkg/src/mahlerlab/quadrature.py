"""Spherical quadrature and every scalar measure used downstream.

The sphere is parametrized as P(alpha, beta) = (cos a, sin a cos b,
sin a sin b).  Grids are product Gauss-Legendre in cos(alpha) (split at
alpha = pi/2) times midpoint in beta, so no quadrature cell straddles a
coordinate plane and octant restrictions are exact sub-sums.

Polytopes bypass quadrature: volumes by convex hulls, octant volumes by
halfspace clipping, sections by facet duality, projections by shadow
hulls.  That keeps the extremizer values (cube, cross-polytope) exact to
machine precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull, HalfspaceIntersection

from . import planar
from .body import ConvexBody3, SymmetricPolytope, polar, sphere_point
from .errors import BadGridSize, ClassificationUnstable, NoConvergence

TWO_PI = 2.0 * math.pi

# octant numbering by sign pattern of (x, y, z)
OCTANT_SIGNS = (
    (1, 1, 1),
    (-1, 1, 1),
    (-1, -1, 1),
    (1, -1, 1),
    (1, 1, -1),
    (-1, 1, -1),
    (-1, -1, -1),
    (1, -1, -1),
)
_SIGN_TO_OCTANT = {s: i for i, s in enumerate(OCTANT_SIGNS)}


@dataclass(frozen=True)
class SphereGrid:
    n_alpha: int
    n_beta: int
    alpha: np.ndarray  # (n_alpha,) ascending
    w_alpha: np.ndarray  # GL weights in cos(alpha); sum 2
    beta: np.ndarray  # (n_beta,) GL nodes per quadrant of the circle
    w_beta: np.ndarray  # matching weights; sum 2*pi
    units: np.ndarray  # (n_alpha*n_beta, 3)
    weights: np.ndarray  # product weights; sum 4*pi
    octant: np.ndarray  # (N,) 0..7


def make_grid(n_alpha: int, n_beta: int) -> SphereGrid:
    """Product grid, split at every coordinate plane.

    Gauss-Legendre in cos(alpha), separately on the two half-ranges, and
    Gauss-Legendre in beta separately on each quadrant of the circle, so
    octant restrictions of the quadrature are spectrally accurate sub-sums
    (a single uniform beta rule would drop to O(n^-2) there).
    """
    if not (8 <= n_alpha <= 4096 and 16 <= n_beta <= 4096):
        raise BadGridSize("grid sizes must lie in [8,4096] x [16,4096]")
    if n_alpha % 2 or n_beta % 4:
        raise BadGridSize("need n_alpha even and n_beta divisible by 4")
    x, w = np.polynomial.legendre.leggauss(n_alpha // 2)
    cos_nodes = np.concatenate([(x - 1.0) / 2.0, (x + 1.0) / 2.0])
    w_alpha = np.concatenate([w / 2.0, w / 2.0])
    alpha = np.arccos(cos_nodes)
    order = np.argsort(alpha)
    alpha, w_alpha = alpha[order], w_alpha[order]
    xb, wb = np.polynomial.legendre.leggauss(n_beta // 4)
    quarter = 0.5 * math.pi
    beta = np.concatenate([(xb + 1.0) / 2.0 * quarter + q * quarter for q in range(4)])
    w_beta = np.tile(wb * quarter / 2.0, 4)
    units = sphere_point(alpha[:, None], beta[None, :]).reshape(-1, 3)
    weights = (w_alpha[:, None] * w_beta[None, :]).reshape(-1)
    signs = np.where(units > 0, 1, -1)
    octant = np.fromiter(
        (_SIGN_TO_OCTANT[tuple(s)] for s in signs), dtype=int, count=len(signs)
    )
    return SphereGrid(
        n_alpha, n_beta, alpha, w_alpha, beta, w_beta, units, weights, octant
    )


def _is_polytope(K) -> bool:
    return isinstance(K, SymmetricPolytope)


# ---------------------------------------------------------------------------
# volumes


def volume(K: ConvexBody3, grid: SphereGrid, method: str = "auto") -> float:
    """|K|; exact hull volume for polytopes, (1/3) sum w rho^3 otherwise."""
    if method == "auto":
        method = "exact" if _is_polytope(K) else "quadrature"
    if method == "exact":
        return float(ConvexHull(K.vertices).volume)
    rho = K.radial_many(grid.units)
    return float(np.sum(grid.weights * rho**3) / 3.0)


def _octant_halfspace_volume(K: SymmetricPolytope, signs) -> float:
    half = np.hstack([K.facets, -np.ones((len(K.facets), 1))])
    extra = np.zeros((3, 4))
    for k, s in enumerate(signs):
        extra[k, k] = -s
    u = np.array(signs, dtype=float) / math.sqrt(3.0)
    interior = u * (0.5 / K.gauge(u))
    hs = HalfspaceIntersection(np.vstack([half, extra]), interior)
    return float(ConvexHull(hs.intersections).volume)


def octant_volumes(K: ConvexBody3, grid: SphereGrid, method: str = "auto"):
    """|Delta_i| for the eight octants, in the fixed sign-pattern order."""
    if method == "auto":
        method = "exact" if _is_polytope(K) else "quadrature"
    if method == "exact":
        return np.array([_octant_halfspace_volume(K, s) for s in OCTANT_SIGNS])
    rho3 = K.radial_many(grid.units) ** 3 * grid.weights
    return np.array(
        [np.sum(rho3[grid.octant == i]) / 3.0 for i in range(8)]
    )


def wedge_volume(K: SymmetricPolytope, b0: float, b1: float) -> float:
    """Exact |K ∩ {b0 <= beta <= b1}|, beta the angle around the x-axis.

    beta is measured in the (y, z) plane from +y toward +z, matching the
    second spherical coordinate; requires 0 <= b1 - b0 <= pi."""
    if b1 - b0 < 1e-9:
        return 0.0
    half = np.hstack([K.facets, -np.ones((len(K.facets), 1))])
    n0 = np.array([0.0, -math.sin(b0), math.cos(b0)])  # beta >= b0
    n1 = np.array([0.0, -math.sin(b1), math.cos(b1)])  # beta <= b1
    extra = np.array([[*(-n0), 0.0], [*n1, 0.0]])
    m = 0.5 * (b0 + b1)
    u = np.array([0.0, math.cos(m), math.sin(m)])
    interior = u * (0.5 / K.gauge(u))
    hs = HalfspaceIntersection(np.vstack([half, extra]), interior)
    return float(ConvexHull(hs.intersections).volume)


def _classify_octants(x: np.ndarray):
    """Octant index per row of x; also the fraction of near-plane points."""
    scale = np.linalg.norm(x, axis=-1)
    near = np.min(np.abs(x), axis=-1) < 1e-9 * scale
    idx = np.zeros(len(x), dtype=int)
    neg = x < 0
    # piecewise map of the sign pattern to the fixed octant order
    for i, s in enumerate(OCTANT_SIGNS):
        m = (neg[:, 0] == (s[0] < 0)) & (neg[:, 1] == (s[1] < 0)) & (
            neg[:, 2] == (s[2] < 0)
        )
        idx[m] = i
    return idx, float(np.mean(near)) if len(x) else 0.0


def polar_piece_volumes(K: ConvexBody3, grid: SphereGrid, method: str = "auto"):
    """|K°_i|: pieces of the polar classified by where Lambda maps back on ∂K."""
    if method == "auto":
        method = "exact" if _is_polytope(K) else "quadrature"
    Kp = polar(K)
    if method == "exact":
        hull = ConvexHull(Kp.vertices)
        eq = hull.equations
        duals = eq[:, :3] / (-eq[:, 3][:, None])  # vertices of K, one per simplex
        idx, near = _classify_octants(duals)
        if near > 0:
            raise ClassificationUnstable("a vertex lies on a coordinate plane")
        simplices = Kp.vertices[hull.simplices]  # (m,3,3)
        vols = np.abs(np.linalg.det(simplices)) / 6.0
        out = np.zeros(8)
        np.add.at(out, idx, vols)
        return out
    rho = Kp.radial_many(grid.units)
    y = grid.units * rho[:, None]
    x = Kp.lambda_many(y)
    idx, near = _classify_octants(x)
    if near > 1e-3:
        raise ClassificationUnstable(
            f"{near:.2%} of nodes sit on a piece boundary"
        )
    contrib = grid.weights * rho**3 / 3.0
    out = np.zeros(8)
    np.add.at(out, idx, contrib)
    return out


# ---------------------------------------------------------------------------
# planar measures

# coordinate frames of the three central planes: plane i kills axis i-1 and
# uses the cyclic pair as (first, second) in-plane coordinates.
_PLANE_COORDS = {1: (1, 2), 2: (2, 0), 3: (0, 1)}


def circle_dirs(plane: int, t):
    """Unit directions in central plane `plane` at in-plane angle t."""
    t = np.asarray(t, dtype=float)
    z = np.zeros_like(t)
    c, s = np.cos(t), np.sin(t)
    if plane == 1:
        return np.stack([z, c, s], axis=-1)
    if plane == 2:
        return np.stack([s, z, c], axis=-1)
    return np.stack([c, s, z], axis=-1)


def section_polygon(K: SymmetricPolytope, plane: int) -> np.ndarray:
    """Exact polygon (in-plane coords, ccw) of K cut by a coordinate plane."""
    j, k = _PLANE_COORDS[plane]
    return planar.halfspaces_to_polygon(K.facets[:, [j, k]])


def projection_polygon(K: SymmetricPolytope, plane: int) -> np.ndarray:
    j, k = _PLANE_COORDS[plane]
    return planar.hull2(K.vertices[:, [j, k]])


_N_CIRCLE = 2048


def _section_area_quad(K: ConvexBody3, plane: int) -> float:
    t = np.arange(_N_CIRCLE) * (TWO_PI / _N_CIRCLE)
    rho = K.radial_many(circle_dirs(plane, t))
    return 0.5 * float(np.sum(rho**2)) * (TWO_PI / _N_CIRCLE)


def _projection_area_quad(K: ConvexBody3, plane: int) -> float:
    # shadow area from the restricted support function: (1/2)∫(h² - h'²)
    t = np.arange(_N_CIRCLE) * (TWO_PI / _N_CIRCLE)
    h = K.support_many(circle_dirs(plane, t))
    hk = np.fft.rfft(h)
    freq = np.arange(len(hk))
    dh = np.fft.irfft(1j * freq * hk, n=_N_CIRCLE)
    return 0.5 * float(np.sum(h**2 - dh**2)) * (TWO_PI / _N_CIRCLE)


def plane_measures(K: ConvexBody3, grid: SphereGrid, method: str = "auto"):
    """(Q, Pproj): central section areas and orthogonal shadow areas."""
    if method == "auto":
        method = "exact" if _is_polytope(K) else "quadrature"
    if method == "exact":
        Q = np.array(
            [abs(planar.shoelace(section_polygon(K, p))) for p in (1, 2, 3)]
        )
        P = np.array(
            [abs(planar.shoelace(projection_polygon(K, p))) for p in (1, 2, 3)]
        )
        return Q, P
    Q = np.array([_section_area_quad(K, p) for p in (1, 2, 3)])
    P = np.array([_projection_area_quad(K, p) for p in (1, 2, 3)])
    return Q, P


# quarter-plane cone pieces: (plane, quadrant signs in plane coords)
_QUARTERS = (
    (1, 1, 1),  # O*d : x=0, y>=0, z>=0
    (1, -1, 1),  # O*e : x=0, y<=0, z>=0
    (2, 1, 1),  # O*f : y=0, z>=0, x>=0
    (2, -1, 1),  # O*g : y=0, z<=0, x>=0
    (3, 1, 1),  # O*h : z=0, x>=0, y>=0
    (3, -1, 1),  # O*i : z=0, x<=0, y>=0
)

_GL64 = np.polynomial.legendre.leggauss(64)


def _arc_area(K: ConvexBody3, plane: int, t0: float, t1: float) -> float:
    x, w = _GL64
    t = 0.5 * (t1 - t0) * x + 0.5 * (t0 + t1)
    rho = K.radial_many(circle_dirs(plane, t))
    return 0.25 * (t1 - t0) * float(np.sum(w * rho**2))


def quarter_areas(K: ConvexBody3, method: str = "auto") -> np.ndarray:
    """(|O*d|, |O*e|, |O*f|, |O*g|, |O*h|, |O*i|)."""
    if method == "auto":
        method = "exact" if _is_polytope(K) else "quadrature"
    out = np.empty(6)
    for n, (plane, s0, s1) in enumerate(_QUARTERS):
        if method == "exact":
            poly = section_polygon(K, plane)
            out[n] = abs(planar.shoelace(planar.clip_quadrant(poly, s0, s1)))
        else:
            t0, t1 = (0.0, 0.5 * math.pi) if s0 > 0 else (0.5 * math.pi, math.pi)
            out[n] = _arc_area(K, plane, t0, t1)
    return out


# ---------------------------------------------------------------------------
# volume product and Santalo point


def volume_product(K: ConvexBody3, grid: SphereGrid) -> float:
    return volume(K, grid) * volume(polar(K), grid)


def santalo_point(K, grid: SphereGrid):
    """Translation z minimizing |K^z| (Nelder-Mead on the polar-volume form).

    Accepts a ConvexBody3 or a plain (n,3) vertex array of a general
    (possibly non-symmetric) polytope.
    """
    if isinstance(K, ConvexBody3):
        h = K.support_many(grid.units)
        start = np.zeros(3)
    else:
        verts = np.asarray(K, dtype=float)
        h = np.max(grid.units @ verts.T, axis=1)
        start = verts.mean(axis=0)
    u = grid.units
    w = grid.weights

    def objective(z):
        den = h - u @ z
        if np.min(den) <= 1e-12:
            return np.inf
        return float(np.sum(w / den**3) / 3.0)

    res = minimize(
        objective,
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 10_000, "maxfev": 20_000},
    )
    if not res.success:
        raise NoConvergence(f"Santalo search failed: {res.message}")
    return res.x
