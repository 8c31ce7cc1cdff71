"""The 3D volume-product chain: boundary curve vectors, the eight test
points, the pairing inequalities, the sharp estimate P(K) >= 32/3 under the
balanced-piece condition, cone-volume comparisons, and equality detection."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .body import ConvexBody3, SymmetricPolytope, polar
from .errors import MembershipViolated, SingularFace
from .normalize import condition_residuals
from .quadrature import (
    SphereGrid,
    octant_volumes,
    plane_measures,
    polar_piece_volumes,
    quarter_areas,
    volume,
)

__all__ = [
    "CurveVectors",
    "ChainReport",
    "ConeCheck",
    "curve_vectors",
    "test_points",
    "verify_chain",
    "cone_inequality_check",
    "dual_vertex3",
    "detect_equality",
]

LOWER_BOUND = 32.0 / 3.0


def _axis_points(K: ConvexBody3):
    eye = np.eye(3)
    rho = K.radial_many(eye)
    return rho[0] * eye[0], rho[1] * eye[1], rho[2] * eye[2]


def _segment_samples(K: ConvexBody3, P: np.ndarray, Q: np.ndarray, n: int):
    """Boundary points of the radially projected chord, t in [0,1]."""
    t = np.linspace(0.0, 1.0, n + 1)
    pts = np.outer(1.0 - t, P) + np.outer(t, Q)
    return pts / K.gauge_many(pts)[:, None]


def _dual_polyline_smooth(K: ConvexBody3, P, Q, n: int) -> np.ndarray:
    return K.lambda_many(_segment_samples(K, P, Q, n))


def _dual_polyline_polytope(K: SymmetricPolytope, P, Q, n: int) -> np.ndarray:
    """Ordered distinct contact vertices on the polar along the segment.

    The dual curve of a polytope is piecewise constant with jumps where the
    chord crosses a facet boundary; each coarse interval whose endpoints
    disagree is bisected recursively so that no intermediate vertex is
    skipped.
    """

    def lam(t):
        p = (1.0 - t) * P + t * Q
        x = p / K.gauge(p)
        return K.lambda_many(x[None, :])[0]

    scale = max(float(np.abs(K.vertices).max()), 1.0)
    tol = 1e-9 * scale
    ts = np.linspace(0.0, 1.0, n + 1)
    ys = _dual_polyline_smooth(K, P, Q, n)
    out = [ys[0]]

    def refine(t0, y0, t1, y1, depth):
        if np.max(np.abs(y0 - y1)) <= tol:
            return
        if depth == 0 or t1 - t0 < 1e-14:
            out.append(y1)
            return
        tm = 0.5 * (t0 + t1)
        ym = lam(tm)
        refine(t0, y0, tm, ym, depth - 1)
        refine(tm, ym, t1, y1, depth - 1)

    for k in range(n):
        refine(ts[k], ys[k], ts[k + 1], ys[k + 1], 48)
    return np.array(out)


def _cross_sum(poly: np.ndarray) -> np.ndarray:
    """Sum of cross(p_k, p_{k+1}); the three pairwise determinant integrals
    of the chordal polyline (components in the (2,3),(3,1),(1,2) order)."""
    if len(poly) < 2:
        return np.zeros(3)
    return np.sum(np.cross(poly[:-1], poly[1:]), axis=0)


def _dual_curve_vector(K: ConvexBody3, P, Q, n: int) -> np.ndarray:
    if isinstance(K, SymmetricPolytope):
        return _cross_sum(_dual_polyline_polytope(K, P, Q, n))
    # chord sums are O(h^2); one Richardson step removes the leading bias
    ys = _dual_polyline_smooth(K, P, Q, n)
    full = _cross_sum(ys)
    half = _cross_sum(ys[::2])
    return (4.0 * full - half) / 3.0


@dataclass(frozen=True)
class CurveVectors:
    """Determinant-integral vectors of the six axis-to-axis boundary curves.

    d, e lie in the x=0 plane, f, g in y=0, h, i in z=0 (fields without
    suffix are computed on the body, the _p fields on its polar via the
    boundary contact map)."""

    d: np.ndarray
    e: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray
    i: np.ndarray
    d_p: np.ndarray
    e_p: np.ndarray
    f_p: np.ndarray
    g_p: np.ndarray
    h_p: np.ndarray
    i_p: np.ndarray


def curve_vectors(K: ConvexBody3, n_curve: int = 512) -> CurveVectors:
    """Curve vectors of the six oriented boundary segments and their duals.

    Body-side vectors are planar, so they reduce to twice the quarter-arc
    areas placed in the normal slot; polar-side vectors accumulate the
    pairwise determinant integrals of the contact-map image curves."""
    if n_curve < 64 or n_curve % 2:
        raise ValueError("n_curve must be an even integer >= 64")
    qa = quarter_areas(K)
    A, B, C = _axis_points(K)
    ex, ey, ez = np.eye(3)
    body = {
        "d": 2.0 * qa[0] * ex,
        "e": 2.0 * qa[1] * ex,
        "f": 2.0 * qa[2] * ey,
        "g": 2.0 * qa[3] * ey,
        "h": 2.0 * qa[4] * ez,
        "i": 2.0 * qa[5] * ez,
    }
    segs = {
        "d": (B, C),
        "e": (C, -B),
        "f": (C, A),
        "g": (A, -C),
        "h": (A, B),
        "i": (B, -A),
    }
    dual = {
        k + "_p": _dual_curve_vector(K, P, Q, n_curve) for k, (P, Q) in segs.items()
    }
    return CurveVectors(**body, **dual)


def _combine(v1, v2, v3, s1, s2, s3):
    return s1 * v1 + s2 * v2 + s3 * v3


def test_points(K: ConvexBody3, grid: SphereGrid, n_curve: int = 512):
    """The four points S_i in K and four points R_i in the polar.

    Each is a signed combination of three curve vectors divided by six
    times the matching piece volume; membership (gauge <= 1 + 1e-6) follows
    from the cone-volume comparison and doubles as a consistency check
    of the quadrature, so a violation raises."""
    cv = curve_vectors(K, n_curve)
    piece = octant_volumes(K, grid)[:4]
    piece_p = polar_piece_volumes(K, grid)[:4]
    nums_s = [
        _combine(cv.d_p, cv.f_p, cv.h_p, 1, 1, 1),
        _combine(cv.d_p, cv.g_p, cv.i_p, -1, 1, 1),
        _combine(cv.e_p, cv.g_p, cv.h_p, -1, -1, 1),
        _combine(cv.e_p, cv.f_p, cv.i_p, 1, -1, 1),
    ]
    nums_r = [
        _combine(cv.d, cv.f, cv.h, 1, 1, 1),
        _combine(cv.d, cv.g, cv.i, -1, 1, 1),
        _combine(cv.e, cv.g, cv.h, -1, -1, 1),
        _combine(cv.e, cv.f, cv.i, 1, -1, 1),
    ]
    # a piece that vanishes (possible for the polar pieces of a polytope)
    # gets the degenerate test point O, whose pairing is trivially 0
    eps_s = 1e-12 * float(np.sum(piece_p))
    eps_r = 1e-12 * float(np.sum(piece))
    S = np.array(
        [v / (6.0 * p) if p > eps_s else np.zeros(3) for v, p in zip(nums_s, piece_p)]
    )
    R = np.array(
        [v / (6.0 * p) if p > eps_r else np.zeros(3) for v, p in zip(nums_r, piece)]
    )
    Kp = polar(K)
    gS = K.gauge_many(S)
    gR = Kp.gauge_many(R)
    if np.max(gS) > 1.0 + 1e-6 or np.max(gR) > 1.0 + 1e-6:
        raise MembershipViolated(
            "test point outside body: gauges %s / %s" % (gS, gR)
        )
    return S, R


@dataclass(frozen=True)
class ChainReport:
    piece_volumes: np.ndarray  # (4,)
    polar_pieces: np.ndarray  # (4,)
    s_points: np.ndarray  # (4,3)
    r_points: np.ndarray  # (4,3)
    pairings: np.ndarray  # (4,) R_i . S_i
    section_areas: np.ndarray  # (3,) central sections of K
    projection_areas: np.ndarray  # (3,) shadows of the polar
    planar_products: np.ndarray  # (3,)
    sum_products: float
    nine_quarter: float  # (9/4)|K||K^polar|
    volume: float
    polar_volume: float
    product: float
    slack: float  # product - 32/3
    condition_residual: float  # max |balanced-piece residual| / |K|
    applicable: bool
    pairings_ok: bool
    planar_ok: bool
    chain_ok: bool


def verify_chain(K: ConvexBody3, grid: SphereGrid, n_curve: int = 512) -> ChainReport:
    """Evaluate the whole product estimate on one body.

    The chain: each pairing R_i . S_i <= 1; summing the pairings under the
    balanced-piece condition gives (9/4)|K||K'| >= sum of the three
    section-shadow products; each such planar product is >= 8 since the
    factors are polar to each other; hence the product is >= 32/3.  When
    the condition residual is large the report is marked not applicable but
    the pairings and planar products are still evaluated (they hold
    unconditionally)."""
    vol = volume(K, grid)
    Kp = polar(K)
    vol_p = volume(Kp, grid)
    product = vol * vol_p
    _, r23 = condition_residuals(K, grid)
    resid = float(np.max(np.abs(r23))) / vol
    applicable = resid < 1e-4
    S, R = test_points(K, grid, n_curve)
    pairings = np.einsum("ij,ij->i", R, S)
    piece = octant_volumes(K, grid)[:4]
    piece_p = polar_piece_volumes(K, grid)[:4]
    Q, _ = plane_measures(K, grid)
    _, P = plane_measures(Kp, grid)
    planar_products = Q * P
    sum_products = float(np.sum(planar_products))
    nine_quarter = 2.25 * product
    pairings_ok = bool(np.all(pairings <= 1.0 + 1e-8))
    planar_ok = bool(np.all(planar_products >= 8.0 - 1e-6))
    chain_ok = (
        pairings_ok
        and planar_ok
        and nine_quarter >= sum_products - 1e-8 * product
        and (not applicable or product >= LOWER_BOUND - 1e-6)
    )
    return ChainReport(
        piece_volumes=piece,
        polar_pieces=piece_p,
        s_points=S,
        r_points=R,
        pairings=pairings,
        section_areas=Q,
        projection_areas=P,
        planar_products=planar_products,
        sum_products=sum_products,
        nine_quarter=nine_quarter,
        volume=vol,
        polar_volume=vol_p,
        product=product,
        slack=product - LOWER_BOUND,
        condition_residual=resid,
        applicable=applicable,
        pairings_ok=pairings_ok,
        planar_ok=planar_ok,
        chain_ok=chain_ok,
    )


# ---------------------------------------------------------------------------
# cone-volume comparison


_GL8 = np.polynomial.legendre.leggauss(8)
_GL64 = np.polynomial.legendre.leggauss(64)


def _gauge_line_integral(K: ConvexBody3, P, Q, panels: int = 64) -> float:
    """int_0^1 gauge((1-t)P + tQ)^(-2) dt, composite Gauss-Legendre."""
    x, w = _GL8
    edges = np.linspace(0.0, 1.0, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 / panels
    t = (mid[:, None] + half * x[None, :]).ravel()
    pts = np.outer(1.0 - t, P) + np.outer(t, Q)
    g = K.gauge_many(pts)
    wt = np.tile(w * half, panels)
    return float(np.sum(wt / g**2))


def curve_vector_between(K: ConvexBody3, P, Q, panels: int = 64) -> np.ndarray:
    """Curve vector of the oriented boundary segment from P to Q.

    For the radial projection of a chord the integrand factorizes: the
    vector is cross(P, Q) times the line integral of gauge^(-2)."""
    return np.cross(P, Q) * _gauge_line_integral(K, P, Q, panels)


def cone_volume(K: ConvexBody3, A1, A2, A3, n: int = 64) -> float:
    """Volume of the radial cone over the boundary patch spanned by the
    directions of A1, A2, A3 (collapsed-square quadrature on the flat
    triangle; the radial factor reduces to gauge^(-3))."""
    x, w = _GL64
    xi = 0.5 * (x + 1.0)
    wi = 0.5 * w
    a = xi[:, None]
    b = xi[None, :] * (1.0 - a)
    jac = (wi[:, None] * wi[None, :]) * (1.0 - a)
    u = (
        np.asarray(A1)[None, None, :]
        + a[:, :, None] * (np.asarray(A2) - np.asarray(A1))[None, None, :]
        + b[:, :, None] * (np.asarray(A3) - np.asarray(A1))[None, None, :]
    )
    g = K.gauge_many(u.reshape(-1, 3)).reshape(u.shape[:2])
    det = float(np.linalg.det(np.array([A1, A2, A3])))
    return det / 3.0 * float(np.sum(jac / g**3))


@dataclass(frozen=True)
class ConeCheck:
    trials: int
    violations: int
    worst_margin: float  # min over trials of cone volume - signed cone sum


def cone_inequality_check(
    K: ConvexBody3, trials: int = 1000, seed: int = 0
) -> ConeCheck:
    """Signed-volume comparison on random boundary triangles.

    For boundary points A1, A2, A3 with det(A1,A2,A3) > 0 and any P in K,
    one sixth of P dotted with the sum of the three segment curve vectors
    (the signed volume of the cone from P over the three chordal fans) is
    at most the radial cone volume over the patch (up to 1e-6 slack).
    """
    rng = np.random.default_rng(seed)
    violations = 0
    worst = math.inf
    done = 0
    while done < trials:
        u = rng.standard_normal((3, 3))
        u /= np.linalg.norm(u, axis=1)[:, None]
        det = float(np.linalg.det(u))
        if abs(det) < 0.05:
            continue
        if det < 0:
            u[[1, 2]] = u[[2, 1]]
        A = u / K.gauge_many(u)[:, None]
        up = rng.standard_normal(3)
        up /= np.linalg.norm(up)
        P = rng.random() ** (1.0 / 3.0) / K.gauge(up) * up
        c = (
            curve_vector_between(K, A[0], A[1])
            + curve_vector_between(K, A[1], A[2])
            + curve_vector_between(K, A[2], A[0])
        )
        lhs = float(P @ c) / 6.0
        vol = cone_volume(K, A[0], A[1], A[2])
        margin = vol - lhs
        worst = min(worst, margin)
        if margin < -1e-6:
            violations += 1
        done += 1
    return ConeCheck(trials=trials, violations=violations, worst_margin=worst)


# ---------------------------------------------------------------------------
# dual faces and equality cases


def dual_vertex3(p1, p2, p3) -> np.ndarray:
    """The point v with v.p1 = v.p2 = v.p3 = 1 (dual vertex of a face)."""
    M = np.array([p1, p2, p3], dtype=float)
    scale = max(float(np.abs(M).max()), 1.0)
    if abs(np.linalg.det(M)) <= 1e-12 * scale**3:
        raise SingularFace("face points are linearly dependent")
    v = np.linalg.solve(M, np.ones(3))
    if np.max(np.abs(M @ v - 1.0)) > 1e-10:
        raise SingularFace("dual vertex solve is ill-conditioned")
    return v


def _is_parallelepiped(K: ConvexBody3, tol: float) -> bool:
    if not isinstance(K, SymmetricPolytope):
        return False
    if len(K.vertices) != 8 or len(K.facets) != 6:
        return False
    # pair facets by negation and check the vertex set is B^{-1}{+-1}^3
    fac = K.facets
    used = np.zeros(6, dtype=bool)
    normals = []
    scale = float(np.abs(fac).max())
    for a in range(6):
        if used[a]:
            continue
        match = None
        for b in range(a + 1, 6):
            if not used[b] and np.allclose(fac[a], -fac[b], atol=tol * scale):
                match = b
                break
        if match is None:
            return False
        used[a] = used[match] = True
        normals.append(fac[a])
    B = np.array(normals)
    if abs(np.linalg.det(B)) < 1e-10 * scale**3:
        return False
    corners = np.array(
        [np.linalg.solve(B, s) for s in np.array(np.meshgrid(*[[-1, 1]] * 3)).T.reshape(-1, 3)]
    )
    vscale = float(np.abs(K.vertices).max())
    for v in K.vertices:
        if np.min(np.max(np.abs(corners - v), axis=1)) > tol * vscale:
            return False
    return True


def detect_equality(K: ConvexBody3, tol: float = 1e-5) -> str:
    """Classify a body as an extremizer shape.

    Returns "parallelepiped" if the body itself is one (within tol),
    "cross_polytope_dual" if its polar is, "neither" otherwise.  Smooth
    bodies are never extremizers, so non-polytopes report "neither"."""
    if _is_parallelepiped(K, tol):
        return "parallelepiped"
    if isinstance(K, SymmetricPolytope) and _is_parallelepiped(polar(K), tol):
        return "cross_polytope_dual"
    return "neither"
