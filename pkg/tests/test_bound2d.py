import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mahlerlab import errors
from mahlerlab.bound2d import (
    Polygon2,
    dual_vertex2,
    equality_family,
    normalize2,
    polar2,
    verify2,
)
from mahlerlab.planar import clip_quadrant, hull2, shoelace


def square2():
    return Polygon2([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def random_polygon(rng, pairs=4):
    while True:
        pts = rng.standard_normal((pairs, 2))
        v = hull2(np.vstack([pts, -pts]))
        if len(v) >= 4:
            return Polygon2(v)


def regular_gon(n):
    t = np.arange(n) * (2 * math.pi / n)
    return Polygon2(np.stack([np.cos(t), np.sin(t)], axis=1))


class TestPolygon2:
    def test_rejects_asymmetric(self):
        with pytest.raises(errors.NotSymmetric):
            Polygon2([[1, 0], [0, 1], [-1, 0], [0, -2]])

    def test_rejects_odd_count(self):
        with pytest.raises((errors.NotSymmetric, errors.DegenerateBody)):
            Polygon2([[1, 0], [0, 1], [-1, -1], [0, -1], [1, -1], [-1, 1]][:5])

    def test_rejects_flat(self):
        with pytest.raises(errors.DegenerateBody):
            Polygon2([[1, 0], [2, 0], [-1, 0], [-2, 0]])

    def test_ccw_and_canonical_start(self):
        P = Polygon2([[1, -1], [1, 1], [-1, 1], [-1, -1]])  # clockwise input
        assert shoelace(P.vertices) > 0
        assert tuple(P.vertices[0]) == (-1.0, -1.0)

    def test_gauge_support(self):
        P = square2()
        assert P.gauge((0.5, 0.0)) == pytest.approx(0.5, abs=1e-14)
        assert P.support((1.0, 1.0)) == pytest.approx(2.0, abs=1e-14)


class TestDualVertex2:
    def test_axes(self):
        assert np.allclose(dual_vertex2((1.0, 0.0), (0.0, 1.0)), (1.0, 1.0))

    def test_random_pairs(self):
        rng = np.random.default_rng(90)
        for _ in range(20):
            p, q = rng.standard_normal((2, 2))
            if abs(p[0] * q[1] - p[1] * q[0]) < 1e-6:
                continue
            v = dual_vertex2(p, q)
            assert abs(v @ p - 1.0) < 1e-12
            assert abs(v @ q - 1.0) < 1e-12

    def test_collinear(self):
        with pytest.raises(errors.CollinearPoints):
            dual_vertex2((1.0, 2.0), (2.0, 4.0))


class TestPolar2:
    def test_square_to_diamond(self):
        D = polar2(square2())
        want = Polygon2([[1, 0], [0, 1], [-1, 0], [0, -1]])
        assert np.allclose(D.vertices, want.vertices, atol=1e-12)

    def test_equality_family_polar(self):
        for a in (0.0, 0.3, 0.7, 1.0):
            K, Kp = equality_family(a)
            assert np.allclose(polar2(K).vertices, Kp.vertices, atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000), pairs=st.integers(2, 8))
    def test_involution(self, seed, pairs):
        P = random_polygon(np.random.default_rng(seed), pairs)
        PP = polar2(polar2(P))
        assert np.allclose(PP.vertices, P.vertices, atol=1e-10 * np.abs(P.vertices).max())


class TestNormalize2:
    def test_square_identity(self):
        M, Q = normalize2(square2())
        assert np.allclose(M, np.eye(2), atol=1e-12)
        assert np.allclose(Q.vertices, square2().vertices, atol=1e-12)

    def test_rotated_square(self):
        P = square2().transformed(
            np.array([[math.cos(math.pi / 6), -math.sin(math.pi / 6)],
                      [math.sin(math.pi / 6), math.cos(math.pi / 6)]])
        )
        M, Q = normalize2(P)
        a1 = shoelace(clip_quadrant(Q.vertices, 1, 1))
        a2 = shoelace(clip_quadrant(Q.vertices, -1, 1))
        assert abs(a1 - a2) < 1e-10 * Q.area()
        assert Q.gauge((1.0, 0.0)) == pytest.approx(1.0, abs=1e-12)
        assert Q.gauge((0.0, 1.0)) == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(seed=st.integers(0, 10_000))
    def test_random_hexagon_balanced(self, seed):
        P = random_polygon(np.random.default_rng(seed), pairs=3)
        _, Q = normalize2(P)
        a1 = float(oracles.frac_shoelace(clip_quadrant(Q.vertices, 1, 1)))
        a2 = float(oracles.frac_shoelace(clip_quadrant(Q.vertices, -1, 1)))
        assert abs(a1 - a2) < 1e-9 * Q.area()


class TestVerify2:
    def test_square(self):
        rep = verify2(square2())
        assert rep.product == pytest.approx(8.0, abs=1e-12)
        assert rep.pairings[0] == pytest.approx(1.0, abs=1e-12)
        assert rep.pairings[1] == pytest.approx(1.0, abs=1e-12)
        assert rep.bound_ok

    def test_equality_family_values(self):
        K, _ = equality_family(0.3)
        _, Q = normalize2(K)
        rep = verify2(Q)
        assert rep.area == pytest.approx(4.0 / 1.09, abs=1e-10)
        assert rep.polar_area == pytest.approx(2.0 * 1.09, abs=1e-10)
        assert rep.product == pytest.approx(8.0, abs=1e-10)

    def test_regular_14gon(self):
        _, Q = normalize2(regular_gon(14))
        rep = verify2(Q)
        assert rep.bound_ok
        assert rep.product >= 8.0 - 1e-9
        assert rep.area == pytest.approx(
            abs(float(oracles.frac_shoelace(Q.vertices))), rel=1e-12
        )

    def test_unnormalized_rejected(self):
        P = square2().transformed(np.diag([2.0, 1.0]))
        with pytest.raises(errors.NotNormalized):
            verify2(P)

    @settings(max_examples=60, deadline=None)
    @given(seed=st.integers(0, 100_000), pairs=st.integers(2, 12))
    def test_bound_and_memberships(self, seed, pairs):
        P = random_polygon(np.random.default_rng(seed), pairs)
        _, Q = normalize2(P)
        rep = verify2(Q)
        assert rep.bound_ok
        assert rep.product >= 8.0 - 1e-9
        Qp = polar2(Q)
        for s in rep.s_points:
            assert Q.gauge(s) <= 1.0 + 1e-10 or not np.any(s)
        for r in rep.r_points:
            assert Qp.gauge(r) <= 1.0 + 1e-10
        # near-equality forces a parallelogram
        if rep.product < 8.0 + 1e-6:
            assert len(Q.vertices) == 4

    def test_parallelogram_attains_eight(self):
        rng = np.random.default_rng(91)
        A = rng.standard_normal((2, 2))
        while abs(np.linalg.det(A)) < 0.3:
            A = rng.standard_normal((2, 2))
        _, Q = normalize2(square2().transformed(A))
        rep = verify2(Q)
        assert rep.product == pytest.approx(8.0, rel=1e-10)


class TestEqualityFamily:
    @pytest.mark.parametrize("a,area,polar_area", [
        (0.0, 4.0, 2.0),
        (0.5, 3.2, 2.5),
        (1.0, 2.0, 4.0),
    ])
    def test_areas(self, a, area, polar_area):
        K, Kp = equality_family(a)
        assert K.area() == pytest.approx(area, abs=1e-12)
        assert Kp.area() == pytest.approx(polar_area, abs=1e-12)
        assert K.area() * Kp.area() == pytest.approx(8.0, abs=1e-12)

    def test_bad_parameter(self):
        with pytest.raises(errors.BadParameter):
            equality_family(-1.0)
        with pytest.raises(errors.BadParameter):
            equality_family(1.5)
