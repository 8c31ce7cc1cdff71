"""Balance angles, the unit shear, the (F,G,H) field, and its zero finder.

The balance angle Theta splits the beta-integral of rho^3 into equal
halves; Phi and Psi do the same for rho^2 along the beta=0 and
beta=Theta half-circles.  The associated unit upper-triangular shear
makes three of the seven normalization equations hold identically; the
remaining three are the field (F, G, H) over the rotation box
D = {(s, phi, psi)} whose zero yields the fully normalized body.

Angle equations are solved through a spectral antiderivative: the
defining integrands are pi-periodic and smooth for smooth bodies, so we
sample them uniformly, take the Fourier antiderivative, and bisect on
the resulting monotone function.  This keeps every (F,G,H) evaluation at
a couple of grid passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from . import planar
from .body import ConvexBody3, LinearMap3, SymmetricPolytope, sphere_point
from .errors import BadParameter, NoConvergence, NotGeneric, NoZeroFound
from .quadrature import (
    SphereGrid,
    octant_volumes,
    quarter_areas,
    volume,
    wedge_volume,
)

PI = math.pi


@dataclass(frozen=True)
class BalanceAngles:
    theta_cap: float  # Theta
    phi_cap: float  # Phi
    psi_cap: float  # Psi


@dataclass(frozen=True)
class BoxPoint:
    s: float
    phi: float
    psi: float

    def __post_init__(self):
        if not (0.0 <= self.s <= 1.0 and 0.0 <= self.phi <= PI and 0.0 <= self.psi <= PI):
            raise BadParameter("box point outside [0,1] x [0,pi] x [0,pi]")


@dataclass
class NormalizationResult:
    angles: tuple  # (theta, phi, psi)
    shear: LinearMap3
    normalized_body: ConvexBody3
    residual23: np.ndarray  # 4 signed residuals of the target condition
    fgh_norm: float


@dataclass
class WindingTrace:
    samples: np.ndarray  # rows (t, G, H, accumulated angle)
    winding: int


# ---------------------------------------------------------------------------
# spectral half-balance solver


def _periodic_cumulative(vals: np.ndarray, period: float):
    """Antiderivative C(t) = int_0^t g for g sampled uniformly over a period."""
    n = len(vals)
    c = np.fft.rfft(vals) / n
    w = 2.0 * PI / period
    k = np.arange(1, len(c))
    fac = np.full(len(c) - 1, 2.0)
    if n % 2 == 0:
        fac[-1] = 1.0

    def C(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        phase = np.exp(1j * t[:, None] * (k * w)[None, :])
        terms = ((phase - 1.0) / (1j * k * w)) * c[1:]
        return c[0].real * t + terms.real @ fac

    return C


def _half_balance(vals: np.ndarray, period: float = PI) -> float:
    """Solve C(x) = C(period)/2 for the monotone antiderivative by bisection."""
    C = _periodic_cumulative(vals, period)
    target = C(period)[0] / 2.0
    lo, hi = 0.0, period
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        if C(mid)[0] < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# balance angles and shear


def _theta_polytope(K: SymmetricPolytope) -> float:
    """Exact theta balance for polytopes via halfspace wedge volumes."""
    upper = wedge_volume(K, 0.0, PI)
    lo, hi = 1e-5, PI - 1e-5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if wedge_volume(K, 0.0, mid) < 0.5 * upper:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sector_polytope(K: SymmetricPolytope, beta: float) -> float:
    """Exact circle balance for polytopes: the in-plane angle splitting the
    upper half of the central section (plane through the x-axis at angle
    beta) into equal areas, by clipped-polygon bisection."""
    w = np.array([0.0, math.cos(beta), math.sin(beta)])
    normals = np.column_stack([K.facets[:, 0], K.facets @ w])
    poly = planar.halfspaces_to_polygon(normals)
    upper = planar.clip_halfplane(poly, (0.0, -1.0), 0.0)
    target = 0.5 * planar.shoelace(upper)

    def sector(phi):
        cut = planar.clip_halfplane(upper, (-math.sin(phi), math.cos(phi)), 0.0)
        return planar.shoelace(cut)

    lo, hi = 1e-5, PI - 1e-5
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if sector(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _theta_only(K: ConvexBody3, grid: SphereGrid) -> float:
    if isinstance(K, SymmetricPolytope):
        return _theta_polytope(K)
    m = grid.n_beta  # samples of the pi-periodic beta profile
    betas = np.arange(m) * (PI / m)
    dirs = sphere_point(grid.alpha[:, None], betas[None, :])
    rho = K.radial_many(dirs)
    J = np.sum(grid.w_alpha[:, None] * rho**3, axis=0)
    return _half_balance(J)


def _circle_balance(K: ConvexBody3, beta: float, grid: SphereGrid) -> float:
    if isinstance(K, SymmetricPolytope):
        return _sector_polytope(K, beta)
    m = 4 * max(grid.n_beta, 2 * grid.n_alpha)
    alphas = np.arange(m) * (PI / m)
    rho = K.radial_many(sphere_point(alphas, np.full(m, beta)))
    return _half_balance(rho**2)


def balance_angles(K: ConvexBody3, grid: SphereGrid) -> BalanceAngles:
    theta = _theta_only(K, grid)
    phi = _circle_balance(K, 0.0, grid)
    psi = _circle_balance(K, theta, grid)
    return BalanceAngles(theta, phi, psi)


def balance_residuals(K: ConvexBody3, ang: BalanceAngles, n: int = 200):
    """Independent Gauss-Legendre check of the three balance equations.

    Returns (I_theta, I_phi, I_psi): differences of the two sides, each
    computed with composite GL on the split intervals (no FFT involved).
    """
    x, w = np.polynomial.legendre.leggauss(n)

    def seg(f, a, b):
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        return 0.5 * (b - a) * np.sum(w * f(t))

    def J(beta_arr):
        out = np.empty(len(beta_arr))
        for idx, b in enumerate(beta_arr):
            out[idx] = seg(
                lambda a: K.radial_many(sphere_point(a, np.full_like(a, b))) ** 3
                * np.sin(a),
                0.0,
                PI,
            )
        return out

    def i_theta():
        xx, ww = np.polynomial.legendre.leggauss(64)

        def half(a, b):
            t = 0.5 * (b - a) * xx + 0.5 * (a + b)
            return 0.5 * (b - a) * np.sum(ww * J(t))

        return half(0.0, ang.theta_cap) - half(ang.theta_cap, PI)

    def circle(beta, cut):
        f = lambda a: K.radial_many(sphere_point(a, np.full_like(a, beta))) ** 2
        return seg(f, 0.0, cut) - seg(f, cut, PI)

    return (
        i_theta(),
        circle(0.0, ang.phi_cap),
        circle(ang.theta_cap, ang.psi_cap),
    )


def shear_matrix(ang: BalanceAngles) -> LinearMap3:
    """Inverse of [[1, 1/tanPhi, 1/(sinTheta tanPsi)], [0,1,1/tanTheta], [0,0,1]]."""
    a = 1.0 / math.tan(ang.phi_cap)
    c = 1.0 / math.tan(ang.theta_cap)
    b = 1.0 / (math.sin(ang.theta_cap) * math.tan(ang.psi_cap))
    return LinearMap3([[1.0, -a, a * c - b], [0.0, 1.0, -c], [0.0, 0.0, 1.0]])


def shear(K: ConvexBody3, grid: SphereGrid) -> LinearMap3:
    return shear_matrix(balance_angles(K, grid))


def rotate(K: ConvexBody3, theta: float, phi: float, psi: float) -> ConvexBody3:
    """X(theta) Y(phi) Z(psi) K."""
    R = (
        LinearMap3.rotation_x(theta)
        .compose(LinearMap3.rotation_y(phi))
        .compose(LinearMap3.rotation_z(psi))
    )
    return K.transformed(R)


# ---------------------------------------------------------------------------
# the (F, G, H) field


def _fgh_body(L: ConvexBody3, grid: SphereGrid):
    """(F,G,H) of a body under its own shear; also the pieces used."""
    ang = balance_angles(L, grid)
    A = shear_matrix(ang)
    M = L.transformed(A)
    qa = quarter_areas(M)
    ov = octant_volumes(M, grid)
    F = qa[0] - qa[1]
    G = ov[0] + ov[2] - ov[1] - ov[3]
    H = ov[0] + ov[3] - ov[1] - ov[2]
    return np.array([F, G, H]), ang, A, M


def _theta_cap0(K: ConvexBody3, phi: float, psi: float, grid: SphereGrid) -> float:
    """Theta(0, phi, psi) of K: the box-height angle at (phi, psi)."""
    return _theta_only(rotate(K, 0.0, phi, psi), grid)


def _fgh_raw(K, s, phi, psi, grid, th0=None):
    if th0 is None:
        th0 = _theta_cap0(K, phi, psi, grid)
    theta = (PI - th0) * s
    L = rotate(K, theta, phi, psi)
    return _fgh_body(L, grid)[0]


def fgh(K: ConvexBody3, point: BoxPoint, grid: SphereGrid) -> np.ndarray:
    """(F, G, H) at a box point (s, phi, psi)."""
    return _fgh_raw(K, point.s, point.phi, point.psi, grid)


def condition_residuals(K: ConvexBody3, grid: SphereGrid):
    """Signed residuals of the shear condition (r22) and the target (r23)."""
    ov = octant_volumes(K, grid)
    qa = quarter_areas(K)
    r22 = np.array([qa[2] - qa[3], qa[4] - qa[5], ov[0] + ov[1] - ov[2] - ov[3]])
    r23 = np.array([ov[0] - ov[1], ov[0] - ov[2], ov[0] - ov[3], qa[0] - qa[1]])
    return r22, r23


# ---------------------------------------------------------------------------
# the Gamma / T reparametrization of the box faces


def gamma_map(K: ConvexBody3, psi: float, theta: float, grid: SphereGrid) -> float:
    """Gamma_psi(theta) = pi - Theta(theta, 0, psi) + theta (strictly increasing)."""
    return PI - _theta_only(rotate(K, theta, 0.0, psi), grid) + theta


def t_map(K: ConvexBody3, s: float, psi: float, grid: SphereGrid) -> float:
    """The face-matching map T_psi(s) (decreasing, T(0)=1, T(1)=0)."""
    th0 = _theta_cap0(K, 0.0, psi, grid)
    height = PI - th0
    target = PI - th0 * s
    lo, hi = 0.0, height
    for _ in range(48):
        mid = 0.5 * (lo + hi)
        if gamma_map(K, psi, mid, grid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) / height


# ---------------------------------------------------------------------------
# symmetry identities (the property-test backbone)


def symmetry_residuals(K: ConvexBody3, point: BoxPoint, grid: SphereGrid) -> dict:
    """Absolute residuals of the reflection/rotation identities at a box point.

    Keys group as: angle identities of the three half-turns and the
    X(pi-Theta) turn, the sign relations of (F,G,H) under those maps, and
    the three face-matching identities of the box field.
    """
    res = {}
    th0 = _theta_cap0(K, point.phi, point.psi, grid)
    theta = (PI - th0) * point.s
    L = rotate(K, theta, point.phi, point.psi)
    FL, angL, _, _ = _fgh_body(L, grid)
    Th, Ph, Ps = angL.theta_cap, angL.phi_cap, angL.psi_cap

    # L2 = X(pi - Theta) L : complementary body
    L2 = L.transformed(LinearMap3.rotation_x(PI - Th))
    F2, ang2, _, _ = _fgh_body(L2, grid)
    res["comp_theta_sum"] = abs(Th + ang2.theta_cap - PI)
    res["comp_phi"] = abs(ang2.phi_cap - (PI - Ps))
    res["comp_psi"] = abs(ang2.psi_cap - Ph)
    res["comp_F"] = abs(F2[0] + FL[0])
    res["comp_G"] = abs(F2[1] + FL[2])
    res["comp_H"] = abs(F2[2] - FL[1])

    # half turn about the x-axis
    LX = L.transformed(LinearMap3.rotation_x(PI))
    FX, angX, _, _ = _fgh_body(LX, grid)
    res["xpi_theta"] = abs(angX.theta_cap - Th)
    res["xpi_phi"] = abs(angX.phi_cap - (PI - Ph))
    res["xpi_psi"] = abs(angX.psi_cap - (PI - Ps))
    res["xpi_F"] = abs(FX[0] - FL[0])
    res["xpi_G"] = abs(FX[1] + FL[1])
    res["xpi_H"] = abs(FX[2] + FL[2])

    # half turn about the y-axis
    LY = L.transformed(LinearMap3.rotation_y(PI))
    FY, angY, _, _ = _fgh_body(LY, grid)
    res["ypi_theta"] = abs(angY.theta_cap - (PI - Th))
    res["ypi_phi"] = abs(angY.phi_cap - (PI - Ph))
    res["ypi_psi"] = abs(angY.psi_cap - Ps)
    res["ypi_F"] = abs(FY[0] + FL[0])
    res["ypi_G"] = abs(FY[1] + FL[1])
    res["ypi_H"] = abs(FY[2] - FL[2])

    # half turn about the z-axis
    LZ = L.transformed(LinearMap3.rotation_z(PI))
    FZ, angZ, _, _ = _fgh_body(LZ, grid)
    res["zpi_theta"] = abs(angZ.theta_cap - (PI - Th))
    res["zpi_phi"] = abs(angZ.phi_cap - Ph)
    res["zpi_psi"] = abs(angZ.psi_cap - (PI - Ps))
    res["zpi_F"] = abs(FZ[0] + FL[0])
    res["zpi_G"] = abs(FZ[1] - FL[1])
    res["zpi_H"] = abs(FZ[2] + FL[2])

    # top face vs bottom face of the box
    f0 = _fgh_raw(K, 0.0, point.phi, point.psi, grid, th0=th0)
    f1 = _fgh_raw(K, 1.0, point.phi, point.psi, grid, th0=th0)
    res["face_s_F"] = abs(f1[0] + f0[0])
    res["face_s_G"] = abs(f1[1] + f0[2])
    res["face_s_H"] = abs(f1[2] - f0[1])

    # phi = pi face vs phi = 0 face through T_psi
    ts = t_map(K, point.s, point.psi, grid)
    fpi = _fgh_raw(K, point.s, PI, point.psi, grid)
    f0t = _fgh_raw(K, ts, 0.0, point.psi, grid)
    res["face_phi_F"] = abs(fpi[0] - f0t[0])
    res["face_phi_G"] = abs(fpi[1] + f0t[2])
    res["face_phi_H"] = abs(fpi[2] + f0t[1])

    # psi = pi face vs psi = 0 face
    fps = _fgh_raw(K, point.s, point.phi, PI, grid)
    f0p = _fgh_raw(K, point.s, PI - point.phi, 0.0, grid)
    res["face_psi_F"] = abs(fps[0] - f0p[0])
    res["face_psi_G"] = abs(fps[1] + f0p[1])
    res["face_psi_H"] = abs(fps[2] + f0p[2])

    # endpoints of the face-matching map
    res["t_map_0"] = abs(t_map(K, 0.0, point.psi, grid) - 1.0)
    res["t_map_1"] = abs(t_map(K, 1.0, point.psi, grid))
    return res


# ---------------------------------------------------------------------------
# winding number on the bottom-face boundary


def _contour_angles(t: float):
    """Four-leg parametrization of the boundary of the s=0 face."""
    if t <= PI:
        return t, 0.0
    if t <= 2 * PI:
        return PI, t - PI
    if t <= 3 * PI:
        return 3 * PI - t, PI
    return 0.0, 4 * PI - t


def winding(K: ConvexBody3, n_samples: int, grid: SphereGrid) -> WindingTrace:
    volK = volume(K, grid)
    thr = 1e-9 * volK
    cache: dict[float, tuple] = {}

    def gh(t: float):
        if t not in cache:
            phi, psi = _contour_angles(t)
            v = _fgh_body(rotate(K, 0.0, phi, psi), grid)[0]
            if math.hypot(v[1], v[2]) < thr:
                raise NotGeneric("(G,H) vanishes on the contour")
            cache[t] = (v[1], v[2])
        return cache[t]

    def step(v0, v1):
        cross = v0[0] * v1[1] - v0[1] * v1[0]
        dot = v0[0] * v1[0] + v0[1] * v1[1]
        return math.atan2(cross, dot)

    ts = list(np.linspace(0.0, 4 * PI, n_samples + 1))
    for t in ts:
        gh(t)
    # adaptive bisection of long angular steps
    i = 0
    while i < len(ts) - 1:
        if len(ts) > 1 << 20:
            raise NoConvergence("contour refinement exceeded 2^20 samples")
        d = step(gh(ts[i]), gh(ts[i + 1]))
        if abs(d) >= 0.5 * PI and ts[i + 1] - ts[i] > 1e-12:
            ts.insert(i + 1, 0.5 * (ts[i] + ts[i + 1]))
        else:
            i += 1
    total = 0.0
    rows = []
    prev = None
    for t in ts:
        v = gh(t)
        if prev is not None:
            total += step(prev, v)
        rows.append((t, v[0], v[1], total))
        prev = v
    w = int(round(total / (2 * PI)))
    return WindingTrace(samples=np.array(rows), winding=w)


# ---------------------------------------------------------------------------
# zero finder


def find_normalization(K: ConvexBody3, grid: SphereGrid) -> NormalizationResult:
    """Locate a zero of (F,G,H) in the box and return the normalized body.

    Coarse 9^3 scan, then damped Newton (central finite differences) from
    the best candidates, then recursive local rescans around the best
    point at halved spacing, up to depth 12.
    """
    volK = volume(K, grid)
    target = 1e-8 * volK
    th0_cache: dict[tuple, float] = {}

    def th0(phi, psi):
        key = (round(phi, 12), round(psi, 12))
        if key not in th0_cache:
            th0_cache[key] = _theta_cap0(K, phi, psi, grid)
        return th0_cache[key]

    def f(x):
        s, phi, psi = x
        return _fgh_raw(K, s, phi, psi, grid, th0=th0(phi, psi))

    def norm(v):
        return float(np.max(np.abs(v)))

    def clip(x):
        return np.array(
            [min(max(x[0], 0.0), 1.0), min(max(x[1], 0.0), PI), min(max(x[2], 0.0), PI)]
        )

    def newton(x0, v0):
        x, v = np.array(x0, dtype=float), v0
        h = np.array([1e-4, 1e-4, 1e-4])
        for _ in range(40):
            if norm(v) < target:
                return x, v
            J = np.empty((3, 3))
            for j in range(3):
                e = np.zeros(3)
                e[j] = h[j]
                J[:, j] = (f(x + e) - f(x - e)) / (2 * h[j])
            try:
                d = np.linalg.solve(J, -v)
            except np.linalg.LinAlgError:
                return None
            lam = 1.0
            while lam > 1e-3:
                x1 = clip(x + lam * d)
                v1 = f(x1)
                if norm(v1) < norm(v):
                    x, v = x1, v1
                    break
                lam *= 0.5
            else:
                return None
        return (x, v) if norm(v) < target else None

    def refine(x0, v0):
        got = newton(x0, v0)
        if got is not None:
            return got
        # the Newton direction degenerates when the zero set is locally a
        # curve; a bounded trust-region step still descends there
        res = least_squares(
            f,
            np.asarray(x0, dtype=float),
            bounds=([0.0, 0.0, 0.0], [1.0, PI, PI]),
            xtol=3e-16,
            ftol=3e-16,
            gtol=3e-16,
            diff_step=1e-6,
        )
        if norm(res.fun) < 1e-6 * volK:
            return np.asarray(res.x), res.fun
        return None

    # quick exit for bodies already normalized at the origin of the box
    v0 = f(np.array([0.0, 0.0, 0.0]))
    if norm(v0) < target:
        return _build_result(K, (0.0, 0.0, 0.0), grid)

    svals = np.linspace(0.0, 1.0, 9)
    avals = np.linspace(0.0, PI, 9)
    cand = [(norm(v0), (0.0, 0.0, 0.0), v0)]
    for phi in avals:
        for psi in avals:
            for s in svals:
                x = np.array([s, phi, psi])
                v = f(x)
                cand.append((norm(v), tuple(x), v))
    cand.sort(key=lambda c: c[0])

    zeros = []
    for _, x0, vv in cand[:6]:
        got = refine(x0, vv)
        if got is not None:
            zeros.append(got)
    depth, spacing = 0, np.array([1.0 / 8.0, PI / 8.0, PI / 8.0])
    center = np.array(cand[0][1])
    while not zeros and depth < 12:
        spacing = spacing / 2.0
        local = []
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for dk in (-1, 0, 1):
                    x = clip(center + spacing * np.array([di, dj, dk]))
                    v = f(x)
                    local.append((norm(v), tuple(x), v))
        local.sort(key=lambda c: c[0])
        center = np.array(local[0][1])
        got = refine(local[0][1], local[0][2])
        if got is not None:
            zeros.append(got)
        depth += 1
    if not zeros:
        raise NoZeroFound("no zero of (F,G,H) located in the box")
    zeros.sort(key=lambda z: (norm(z[1]), tuple(np.round(z[0], 9))))
    x = zeros[0][0]
    return _build_result(K, (x[0], x[1], x[2]), grid)


def _build_result(K, spp, grid) -> NormalizationResult:
    s, phi, psi = spp
    th0 = _theta_cap0(K, phi, psi, grid)
    theta = (PI - th0) * s
    L = rotate(K, theta, phi, psi)
    v, ang, A, M = _fgh_body(L, grid)
    _, r23 = condition_residuals(M, grid)
    return NormalizationResult(
        angles=(theta, phi, psi),
        shear=A,
        normalized_body=M,
        residual23=r23,
        fgh_norm=float(np.max(np.abs(v))),
    )
