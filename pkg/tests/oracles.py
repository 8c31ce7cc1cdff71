"""Independent reference computations used to validate library results.

Everything here deliberately avoids the code paths under test: volumes by
Monte Carlo, gauges through support-function duality, areas by rational
shoelace, balance equations by brute-force cumulative sums, ball cone
volumes by spherical excess.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def mc_points(rng, n, box):
    """Uniform points in [-box, box]^3."""
    return rng.uniform(-box, box, size=(n, 3))


def mc_volume(K, n=200_000, seed=1234):
    """Monte Carlo volume from gauge membership."""
    rng = np.random.default_rng(seed)
    box = float(max(K.support((1, 0, 0)), K.support((0, 1, 0)), K.support((0, 0, 1))))
    pts = mc_points(rng, n, box)
    inside = K.gauge_many(pts) <= 1.0
    return (2.0 * box) ** 3 * np.count_nonzero(inside) / n


def mc_octant_volumes(K, n=400_000, seed=1234):
    """Monte Carlo octant volumes, same sign-pattern order as the library."""
    from mahlerlab.quadrature import OCTANT_SIGNS

    rng = np.random.default_rng(seed)
    box = float(max(K.support((1, 0, 0)), K.support((0, 1, 0)), K.support((0, 0, 1))))
    pts = mc_points(rng, n, box)
    inside = pts[K.gauge_many(pts) <= 1.0]
    cell = (2.0 * box) ** 3 / n
    out = []
    for s in OCTANT_SIGNS:
        m = np.all(inside * np.array(s) >= 0, axis=1)
        out.append(cell * np.count_nonzero(m))
    return np.array(out)


def support_gauge(K, x, n=4000, seed=5):
    """Lower bound on the gauge via mu(x) = sup_u (x.u)/h(u) over sampled u."""
    rng = np.random.default_rng(seed)
    us = rng.standard_normal((n, 3))
    us /= np.linalg.norm(us, axis=1)[:, None]
    h = K.support_many(us)
    return float(np.max(us @ np.asarray(x, dtype=float) / h))


def frac_shoelace(poly):
    """Exact signed polygon area treating the float coordinates as rationals."""
    pts = [(Fraction(float(x)), Fraction(float(y))) for x, y in poly]
    acc = Fraction(0)
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        acc += x0 * y1 - x1 * y0
    return acc / 2


def cumulative_theta(K, n_beta=2000, n_alpha=400):
    """Brute-force cumulative rho^3 mass in beta (trapezoid in alpha)."""
    from mahlerlab.body import sphere_point

    beta = (np.arange(n_beta) + 0.5) * (math.pi / n_beta)
    alpha = np.linspace(0.0, math.pi, n_alpha + 1)
    rho = K.radial_many(sphere_point(alpha[:, None], beta[None, :]))
    J = np.trapezoid(rho**3 * np.sin(alpha)[:, None], alpha, axis=0)
    return beta, np.cumsum(J) * (math.pi / n_beta)


def brute_theta(K, n_beta=2000, n_alpha=400):
    """Balance angle in beta by dense cumulative bisection."""
    beta, C = cumulative_theta(K, n_beta, n_alpha)
    return float(np.interp(C[-1] / 2.0, C, beta))


def brute_circle_angle(K, beta, n=200_000):
    """Half-area angle of the planar radial profile at fixed beta."""
    from mahlerlab.body import sphere_point

    a = (np.arange(n) + 0.5) * (math.pi / n)
    rho = K.radial_many(sphere_point(a, np.full(n, beta)))
    C = np.cumsum(rho**2)
    return float(np.interp(C[-1] / 2.0, C, a))


def solid_angle(a, b, c):
    """Spherical excess of the triangle with unit vertices a, b, c."""

    def ang(u, v):
        return math.acos(np.clip(float(u @ v), -1.0, 1.0))

    sa, sb, sc = ang(b, c), ang(c, a), ang(a, b)
    s = 0.5 * (sa + sb + sc)
    t = math.tan(s / 2) * math.tan((s - sa) / 2) * math.tan((s - sb) / 2) * math.tan(
        (s - sc) / 2
    )
    return 4.0 * math.atan(math.sqrt(max(t, 0.0)))


def ball_cone_volume(a, b, c, radius=1.0):
    """Volume of the radial cone of a ball over a spherical triangle."""
    return solid_angle(a, b, c) * radius**3 / 3.0
