"""Centrally symmetric convex bodies and their basic evaluators.

A body K is used through three functions: the gauge mu_K (Minkowski
functional), the radial function rho_K = 1/mu_K, and the support function
h_K(u) = max_{x in K} u.x.  The boundary map Lambda(x) = grad(mu_K^2/2)
sends a boundary point of K to the boundary point y of the polar body
with x.y = 1.

All evaluators are vectorized over trailing-axis-3 arrays and bodies are
immutable after construction, so they are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    BadParameter,
    DegenerateBody,
    NotOnBoundary,
    NotSymmetric,
    OriginNotInterior,
    ParseError,
    SingularMap,
    ZeroVector,
)

_ZERO_TOL = 1e-13


@dataclass(frozen=True)
class Direction:
    """Spherical direction; embeds as (cos a, sin a cos b, sin a sin b)."""

    alpha: float
    beta: float

    def unit(self) -> np.ndarray:
        sa = math.sin(self.alpha)
        return np.array(
            [math.cos(self.alpha), sa * math.cos(self.beta), sa * math.sin(self.beta)]
        )


def sphere_point(alpha, beta):
    """Vectorized version of Direction.unit for array arguments."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    sa = np.sin(alpha)
    return np.stack(
        [np.cos(alpha) * np.ones_like(beta), sa * np.cos(beta), sa * np.sin(beta)],
        axis=-1,
    )


class LinearMap3:
    """Invertible 3x3 linear map with cached determinant and inverse."""

    __slots__ = ("matrix", "det", "inverse")

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.shape != (3, 3):
            raise BadParameter("LinearMap3 expects a 3x3 matrix")
        d = float(np.linalg.det(m))
        if abs(d) <= 1e-12:
            raise SingularMap(f"matrix is singular (det={d:g})")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "det", d)
        object.__setattr__(self, "inverse", np.linalg.inv(m))

    def __setattr__(self, *a):  # immutable
        raise AttributeError("LinearMap3 is immutable")

    @staticmethod
    def identity():
        return LinearMap3(np.eye(3))

    @staticmethod
    def rotation_x(t):
        c, s = math.cos(t), math.sin(t)
        return LinearMap3([[1, 0, 0], [0, c, -s], [0, s, c]])

    @staticmethod
    def rotation_y(t):
        c, s = math.cos(t), math.sin(t)
        return LinearMap3([[c, 0, s], [0, 1, 0], [-s, 0, c]])

    @staticmethod
    def rotation_z(t):
        c, s = math.cos(t), math.sin(t)
        return LinearMap3([[c, -s, 0], [s, c, 0], [0, 0, 1]])

    def compose(self, other: "LinearMap3") -> "LinearMap3":
        """self after other (matrix product self.matrix @ other.matrix)."""
        return LinearMap3(self.matrix @ other.matrix)


def _as_map(A) -> LinearMap3:
    if isinstance(A, LinearMap3):
        return A
    return LinearMap3(A)


class ConvexBody3:
    """Base class; subclasses implement the vectorized evaluators."""

    provenance: str = ""

    # -- evaluators ---------------------------------------------------
    def gauge_many(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def support_many(self, us: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def lambda_many(self, pts: np.ndarray) -> np.ndarray:
        """Boundary map on points of ∂K (inputs are renormalized radially)."""
        raise NotImplementedError

    def polar_body(self) -> "ConvexBody3":
        raise NotImplementedError

    def transformed(self, A: LinearMap3) -> "ConvexBody3":
        return TransformedBody(self, A)

    def radial_many(self, us: np.ndarray) -> np.ndarray:
        return 1.0 / self.gauge_many(us)

    # convenience scalar wrappers
    def gauge(self, v) -> float:
        return float(self.gauge_many(np.asarray(v, dtype=float)[None, :])[0])

    def support(self, u) -> float:
        return float(self.support_many(np.asarray(u, dtype=float)[None, :])[0])


def _dedup_rows(rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Merge rows that agree within tol (coplanar hull simplices)."""
    keys = np.round(rows / tol)
    _, idx = np.unique(keys, axis=0, return_index=True)
    out = rows[np.sort(idx)]
    # second pass: keys straddling a rounding boundary
    keep = np.ones(len(out), dtype=bool)
    for i in range(len(out)):
        if not keep[i]:
            continue
        close = np.all(np.abs(out - out[i]) < 2 * tol, axis=1)
        close[i] = False
        keep &= ~close
    return out[keep]


def _check_symmetric_vertices(verts: np.ndarray) -> None:
    scale = np.max(np.abs(verts))
    tol = 1e-9 * max(scale, 1.0)
    for v in verts:
        d = np.min(np.linalg.norm(verts + v, axis=1))
        if d > tol:
            raise NotSymmetric("vertex list is not closed under x -> -x")


class SymmetricPolytope(ConvexBody3):
    """Polytope given by vertices; facets a_i.x <= 1 derived by hull duality.

    Vertices and facets are stored in sorted (lexicographic) order so that
    tie-breaking in the boundary map is deterministic.
    """

    __slots__ = ("vertices", "facets", "provenance")

    def __init__(self, vertices, facets=None, provenance="polytope"):
        verts = np.array(vertices, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3 or len(verts) == 0:
            raise DegenerateBody("need a nonempty list of vertices in R^3")
        _check_symmetric_vertices(verts)
        if len(verts) < 4:
            raise DegenerateBody("need at least 4 vertices in R^3")
        try:
            hull = ConvexHull(verts)
        except QhullError as e:
            raise DegenerateBody(f"vertices are affinely dependent: {e}") from None
        if facets is None:
            eq = hull.equations  # n.x + b <= 0
            n, b = eq[:, :3], eq[:, 3]
            if np.any(b >= -1e-12):
                raise OriginNotInterior("origin is not interior to the hull")
            fac = _dedup_rows(n / (-b[:, None]))
        else:
            fac = np.array(facets, dtype=float)
        verts = verts[hull.vertices]  # drop non-extreme points
        order = np.lexsort(verts.T[::-1])
        verts = verts[order]
        order = np.lexsort(fac.T[::-1])
        fac = fac[order]
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "facets", fac)
        object.__setattr__(self, "provenance", provenance)

    def __setattr__(self, *a):
        raise AttributeError("bodies are immutable")

    def gauge_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.max(pts @ self.facets.T, axis=-1)

    def support_many(self, us):
        us = np.asarray(us, dtype=float)
        return np.max(us @ self.vertices.T, axis=-1)

    def lambda_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        vals = pts @ self.facets.T
        top = np.max(vals, axis=-1, keepdims=True)
        # lowest facet index among (numerically) active facets
        idx = np.argmax(vals >= top - 1e-12 * np.abs(top), axis=-1)
        y = self.facets[idx]
        return y / np.max(vals, axis=-1)[..., None] * 1.0  # scale to x.y = 1

    def polar_body(self):
        return SymmetricPolytope(
            self.facets, facets=self.vertices, provenance=f"polar({self.provenance})"
        )

    def transformed(self, A):
        A = _as_map(A)
        return SymmetricPolytope(
            self.vertices @ A.matrix.T,
            facets=self.facets @ A.inverse,
            provenance=f"map({self.provenance})",
        )


class LpBall(ConvexBody3):
    """{ sum |x_i / a_i|^p <= 1 } with p in (1, inf)."""

    __slots__ = ("p", "axes", "q", "provenance")

    def __init__(self, p, axes=(1.0, 1.0, 1.0), provenance="lp"):
        p = float(p)
        if not (p > 1.0 and math.isfinite(p)):
            raise BadParameter("lp exponent must lie in (1, inf)")
        axes = np.array(axes, dtype=float)
        if axes.shape != (3,) or np.any(axes <= 0):
            raise DegenerateBody("semi-axes must be three positive numbers")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "q", p / (p - 1.0))
        object.__setattr__(self, "provenance", provenance)

    def __setattr__(self, *a):
        raise AttributeError("bodies are immutable")

    def gauge_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        z = np.abs(pts) / self.axes
        return np.sum(z**self.p, axis=-1) ** (1.0 / self.p)

    def support_many(self, us):
        us = np.asarray(us, dtype=float)
        z = np.abs(us) * self.axes
        return np.sum(z**self.q, axis=-1) ** (1.0 / self.q)

    def lambda_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        mu = self.gauge_many(pts)
        x = pts / mu[..., None]  # renormalize onto the boundary
        z = np.abs(x) / self.axes
        grad = np.sign(x) * z ** (self.p - 1.0) / self.axes
        return grad

    def polar_body(self):
        return LpBall(self.q, 1.0 / self.axes, provenance=f"polar({self.provenance})")


class Ellipsoid(ConvexBody3):
    """{ x . M x <= 1 } for positive definite M."""

    __slots__ = ("M", "Minv", "provenance")

    def __init__(self, M, provenance="ellipsoid"):
        M = np.array(M, dtype=float)
        if M.shape != (3, 3):
            raise BadParameter("ellipsoid matrix must be 3x3")
        M = 0.5 * (M + M.T)
        if np.min(np.linalg.eigvalsh(M)) <= 1e-12:
            raise DegenerateBody("ellipsoid matrix is not positive definite")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "Minv", np.linalg.inv(M))
        object.__setattr__(self, "provenance", provenance)

    def __setattr__(self, *a):
        raise AttributeError("bodies are immutable")

    @staticmethod
    def from_axes(a, b, c):
        return Ellipsoid(np.diag([1.0 / a**2, 1.0 / b**2, 1.0 / c**2]))

    def gauge_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", pts, self.M, pts))

    def support_many(self, us):
        us = np.asarray(us, dtype=float)
        return np.sqrt(np.einsum("...i,ij,...j->...", us, self.Minv, us))

    def lambda_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        mu = self.gauge_many(pts)
        return (pts / mu[..., None]) @ self.M.T

    def polar_body(self):
        return Ellipsoid(self.Minv, provenance=f"polar({self.provenance})")

    def transformed(self, A):
        A = _as_map(A)
        return Ellipsoid(
            A.inverse.T @ self.M @ A.inverse, provenance=f"map({self.provenance})"
        )


def _table_units(na, nb):
    al = np.linspace(0.0, math.pi, na + 1)
    be = np.arange(nb) * (2.0 * math.pi / nb)
    return sphere_point(al[:, None], be[None, :])


def _max_dot(x, pts):
    """max_j x . pts[j] for a batch of query vectors, chunked for memory."""
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1, 3)
    out = np.empty(len(flat))
    step = max(1, 4_000_000 // max(len(pts), 1))
    for k in range(0, len(flat), step):
        out[k : k + step] = np.max(flat[k : k + step] @ pts.T, axis=1)
    return out.reshape(x.shape[:-1])


def _polar_table(vals, units):
    """Radial table of (conv of the tabulated boundary points)^polar."""
    pts = (vals[..., None] * units).reshape(-1, 3)
    return 1.0 / _max_dot(units, pts)


class RadialField(ConvexBody3):
    """Body from a table of radial values on a uniform (alpha, beta) grid.

    rho[i, j] at alpha_i = i*pi/na (i = 0..na), beta_j = j*2*pi/nb.
    Bilinear interpolation; documented first-order accurate.  The support
    function is the exact support of the convex hull of the tabulated
    boundary points, and the stored table is canonicalized with a double
    polar at construction.  The double polar acts as a closure operator on
    tables, so tables in its image are exact fixed points: polar_body is an
    involution to machine precision, while the canonical table differs from
    the raw input only by its convexity defect (zero at hull vertices).
    """

    __slots__ = ("values", "n_alpha", "n_beta", "provenance", "_bpts")

    def __init__(self, values, provenance="radial"):
        vals = np.array(values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] < 9 or vals.shape[1] < 8:
            raise DegenerateBody("radial table too small")
        na, nb = vals.shape[0] - 1, vals.shape[1]
        if nb % 2:
            raise BadParameter("radial table needs an even beta count")
        if np.min(vals) <= 0:
            raise OriginNotInterior("radial values must be strictly positive")
        # collapse the poles to a single value
        vals[0, :] = np.mean(vals[0, :])
        vals[-1, :] = np.mean(vals[-1, :])
        anti = np.roll(vals[::-1], nb // 2, axis=1)
        if np.max(np.abs(vals - anti)) > 1e-12 * np.max(vals):
            raise NotSymmetric("radial table is not centrally symmetric")
        units = _table_units(na, nb)
        vals = _polar_table(_polar_table(vals, units), units)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "n_alpha", na)
        object.__setattr__(self, "n_beta", nb)
        object.__setattr__(self, "provenance", provenance)
        object.__setattr__(self, "_bpts", (vals[..., None] * units).reshape(-1, 3))

    def __setattr__(self, *a):
        raise AttributeError("bodies are immutable")

    @staticmethod
    def from_function(rho, n_alpha=128, n_beta=256, provenance="radial"):
        """Sample rho(units array) -> radii on the uniform grid."""
        al = np.linspace(0.0, math.pi, n_alpha + 1)
        be = np.arange(n_beta) * (2.0 * math.pi / n_beta)
        units = sphere_point(al[:, None], be[None, :])
        return RadialField(rho(units), provenance=provenance)

    def _interp(self, alpha, beta):
        na, nb = self.n_alpha, self.n_beta
        fa = np.clip(alpha / math.pi * na, 0.0, na - 1e-12)
        fb = np.mod(beta, 2.0 * math.pi) / (2.0 * math.pi) * nb
        ia = fa.astype(int)
        ib = np.floor(fb).astype(int) % nb
        ta = fa - ia
        tb = fb - np.floor(fb)
        v = self.values
        v00 = v[ia, ib]
        v10 = v[ia + 1, ib]
        v01 = v[ia, (ib + 1) % nb]
        v11 = v[ia + 1, (ib + 1) % nb]
        return (
            v00 * (1 - ta) * (1 - tb)
            + v10 * ta * (1 - tb)
            + v01 * (1 - ta) * tb
            + v11 * ta * tb
        )

    def radial_many(self, us):
        us = np.asarray(us, dtype=float)
        norm = np.linalg.norm(us, axis=-1)
        u = us / norm[..., None]
        alpha = np.arccos(np.clip(u[..., 0], -1.0, 1.0))
        beta = np.arctan2(u[..., 2], u[..., 1])
        return self._interp(alpha, beta) / norm

    def gauge_many(self, pts):
        return 1.0 / self.radial_many(pts)

    def support_many(self, us):
        return _max_dot(us, self._bpts)

    def lambda_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        mu = self.gauge_many(pts)
        x = pts / mu[..., None]
        # maximize x.y over y in the polar: y = u / h_K(u)
        flat = x.reshape(-1, 3)
        na, nb = self.n_alpha, self.n_beta
        al = np.linspace(0.0, math.pi, na + 1)
        be = np.arange(nb) * (2.0 * math.pi / nb)
        units = sphere_point(al[:, None], be[None, :]).reshape(-1, 3)
        h = self.support_many(units)
        ppts = units / h[:, None]
        dots = flat @ ppts.T
        best = np.argmax(dots, axis=1)
        ia = np.clip(best // nb, 1, na - 1).astype(float)
        ib = (best % nb).astype(float)
        da, db = math.pi / na, 2.0 * math.pi / nb
        # one quadratic-fit refinement step on g(a,b) = x . u(a,b)/h(u(a,b))
        def val(a, b):
            u = sphere_point(a, b)
            return np.einsum("...i,...i->...", flat, u) / self.support_many(u)

        a0, b0 = ia * da, ib * db
        s = np.empty((len(flat), 3, 3))
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                s[:, di + 1, dj + 1] = val(a0 + di * da, b0 + dj * db)
        gx = 0.5 * (s[:, 2, 1] - s[:, 0, 1])
        gy = 0.5 * (s[:, 1, 2] - s[:, 1, 0])
        hxx = s[:, 2, 1] - 2 * s[:, 1, 1] + s[:, 0, 1]
        hyy = s[:, 1, 2] - 2 * s[:, 1, 1] + s[:, 1, 0]
        hxy = 0.25 * (s[:, 2, 2] - s[:, 0, 2] - s[:, 2, 0] + s[:, 0, 0])
        det = hxx * hyy - hxy * hxy
        ok = (hxx < 0) & (det > 0)
        dx = np.where(ok, np.clip((-gx * hyy + gy * hxy) / np.where(det == 0, 1, det), -1, 1), 0.0)
        dy = np.where(ok, np.clip((-gy * hxx + gx * hxy) / np.where(det == 0, 1, det), -1, 1), 0.0)
        a1, b1 = a0 + dx * da, b0 + dy * db
        u1 = sphere_point(a1, b1)
        y = u1 / self.support_many(u1)[:, None]
        return y.reshape(pts.shape)

    def polar_body(self):
        units = _table_units(self.n_alpha, self.n_beta)
        return RadialField(
            _polar_table(self.values, units), provenance=f"polar({self.provenance})"
        )


class TransformedBody(ConvexBody3):
    """A K for a base body K and invertible map A."""

    __slots__ = ("base", "map", "provenance")

    def __init__(self, base, A, provenance=None):
        A = _as_map(A)
        if isinstance(base, TransformedBody):  # flatten chains
            A = A.compose(base.map)
            base = base.base
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "map", A)
        object.__setattr__(
            self, "provenance", provenance or f"map({base.provenance})"
        )

    def __setattr__(self, *a):
        raise AttributeError("bodies are immutable")

    def gauge_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        return self.base.gauge_many(pts @ self.map.inverse.T)

    def support_many(self, us):
        us = np.asarray(us, dtype=float)
        return self.base.support_many(us @ self.map.matrix)

    def lambda_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        y = self.base.lambda_many(pts @ self.map.inverse.T)
        return y @ self.map.inverse

    def polar_body(self):
        return TransformedBody(
            self.base.polar_body(),
            LinearMap3(self.map.inverse.T),
            provenance=f"polar({self.provenance})",
        )

    def transformed(self, A):
        return TransformedBody(self, A)


# ---------------------------------------------------------------------------
# public operations


def make_body(spec) -> ConvexBody3:
    """Build a body from a descriptor dict (see the CLI schema)."""
    if isinstance(spec, ConvexBody3):
        return spec
    if not isinstance(spec, dict) or "type" not in spec:
        raise ParseError("body descriptor must be a dict with a 'type' field")
    kind = spec["type"]
    label = spec.get("label")
    try:
        if kind == "polytope":
            body = SymmetricPolytope(spec["vertices"])
        elif kind == "lp":
            body = LpBall(spec["p"], spec.get("axes", (1.0, 1.0, 1.0)))
        elif kind == "ellipsoid":
            body = Ellipsoid(spec["matrix"])
        elif kind == "radial":
            body = RadialField(spec["values"])
        elif kind == "transformed":
            # .transformed keeps exact representations (polytope, ellipsoid)
            body = make_body(spec["base"]).transformed(LinearMap3(spec["matrix"]))
        else:
            raise ParseError(f"unknown body type {kind!r}")
    except KeyError as e:
        raise ParseError(f"body descriptor missing field {e}") from None
    if label:
        object.__setattr__(body, "provenance", label)
    return body


def gauge_radial(K: ConvexBody3, v):
    """(mu_K(v), rho_K(v)); rho(v) v lies on the boundary of K."""
    v = np.asarray(v, dtype=float)
    if np.linalg.norm(v) < _ZERO_TOL:
        raise ZeroVector("gauge_radial of the zero vector")
    mu = K.gauge(v)
    return mu, 1.0 / mu


def support(K: ConvexBody3, u) -> float:
    u = np.asarray(u, dtype=float)
    if np.linalg.norm(u) < _ZERO_TOL:
        raise ZeroVector("support of the zero vector")
    return K.support(u)


def polar(K: ConvexBody3) -> ConvexBody3:
    return K.polar_body()


def boundary_map(K: ConvexBody3, x):
    """Lambda(x) = grad(mu_K^2/2)(x): the point y of the polar with x.y = 1."""
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) < _ZERO_TOL:
        raise ZeroVector("boundary_map of the zero vector")
    mu = K.gauge(x)
    if abs(mu - 1.0) > 1e-8:
        raise NotOnBoundary(f"point has gauge {mu:.3e}, not on the boundary")
    return K.lambda_many(x[None, :])[0]


def apply_linear(K: ConvexBody3, A) -> ConvexBody3:
    return K.transformed(_as_map(A))


# convenient stock bodies used throughout the test-suite and scripts
def cube() -> SymmetricPolytope:
    signs = np.array(
        [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
        dtype=float,
    )
    return SymmetricPolytope(signs, provenance="cube")


def cross_polytope() -> SymmetricPolytope:
    v = np.vstack([np.eye(3), -np.eye(3)])
    return SymmetricPolytope(v, provenance="cross-polytope")


def ball() -> LpBall:
    return LpBall(2.0, (1.0, 1.0, 1.0), provenance="ball")
