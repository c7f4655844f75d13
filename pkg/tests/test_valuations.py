import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf, binomial, gamma, pi as mpi

from obstacleprm.geometry import ConvexPolytope, PolyconvexSet, RigidMotion, Segment, union_volume
from obstacleprm.shapes import disc_polygon
from obstacleprm.valuations import (
    PredictionInput, ValuationVector, Variant, alpha, boundary_valuations, crofton_sample,
    intrinsic_volumes, kinematic_measure, line_hit_fraction, mu_ball, mu_boundary, mu_segment,
    omega, predicted_success, sylvester_ratio, valuation_additivity_check,
)


def test_omega():
    assert omega(0) == 1.0
    assert omega(1) == pytest.approx(2.0, abs=1e-15)
    assert omega(2) == pytest.approx(math.pi, abs=1e-15)
    assert omega(3) == pytest.approx(4 * math.pi / 3, abs=1e-14)


def test_mu_ball_disc():
    assert mu_ball(2, 2) == pytest.approx(math.pi, abs=1e-12)
    assert mu_ball(1, 2) == pytest.approx(math.pi, abs=1e-12)
    assert mu_ball(1, 2, 2.0) == pytest.approx(2 * math.pi, abs=1e-12)
    assert mu_ball(0, 3) == pytest.approx(1.0, abs=1e-12)
    # unit 3-ball: mu_2 is half the surface area, mu_1 is twice the mean width
    assert mu_ball(2, 3) == pytest.approx(2 * math.pi, abs=1e-12)
    assert mu_ball(1, 3) == pytest.approx(4.0, abs=1e-12)


@given(i=st.integers(0, 6), extra=st.integers(0, 4), lam=st.floats(0.01, 100))
def test_mu_ball_homogeneous(i, extra, lam):
    n = i + extra
    assert mu_ball(i, n, lam) == pytest.approx(lam ** i * mu_ball(i, n, 1.0), rel=1e-12)


def test_mu_ball_against_mpmath():
    mp.dps = 30
    for n in range(1, 7):
        for i in range(n + 1):
            w = lambda k: mpi ** (mpf(k) / 2) / gamma(mpf(k) / 2 + 1)
            ref = binomial(n, i) * w(n) / w(n - i)
            assert mu_ball(i, n) == pytest.approx(float(ref), rel=1e-13)


def test_mu_segment():
    assert mu_segment(0, 3.7) == 1.0
    assert mu_segment(1, 0.5) == 0.5
    assert mu_segment(2, 0.5) == 0.0
    assert ValuationVector.segment(3, 0.25).mu == (1.0, 0.25, 0.0, 0.0)


def test_mu_boundary(unit_square, unit_cube):
    assert mu_boundary(unit_square, 1) == pytest.approx(4.0)
    assert mu_boundary(unit_square, 2) == 0.0
    assert mu_boundary(unit_cube, 2) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        mu_boundary(unit_cube, 0)


def test_intrinsic_volumes(unit_square, unit_cube):
    assert intrinsic_volumes(unit_square).mu == pytest.approx((1, 2, 1))
    assert intrinsic_volumes(unit_cube).mu == pytest.approx((1, 3, 3, 1))
    seg = intrinsic_volumes(np.array([[0.0, 0.0], [0.6, 0.8]]), 2)
    assert seg.mu == pytest.approx((1, 1, 0))


def test_intrinsic_volumes_near_ball():
    approx = intrinsic_volumes(ConvexPolytope.regular_polygon(512, 1.0))
    assert approx.mu == pytest.approx(ValuationVector.ball(2).mu, rel=1e-4)


def test_boundary_of_cube(unit_cube):
    assert boundary_valuations(unit_cube).mu == pytest.approx((2, 0, 6, 0))


class TestAdditivity:
    def test_abutting(self):
        a = ConvexPolytope.box([0, 0], [1, 1])
        b = ConvexPolytope.box([1, 0], [2, 1])
        assert valuation_additivity_check(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_disjoint(self):
        a = ConvexPolytope.box([0, 0], [1, 1])
        b = ConvexPolytope.box([3, 3], [4, 4])
        assert valuation_additivity_check(a, b) == pytest.approx(0.0, abs=1e-12)

    def test_overlap_oracle(self):
        # direct check of the residual against the rectangle closed form
        a = ConvexPolytope.box([0, 0], [2, 1])
        b = ConvexPolytope.box([1, 0.5], [3, 2])
        overlap = (2 - 1) * (1 - 0.5)
        assert union_volume(PolyconvexSet([a, b])) == pytest.approx(2 + 3 - overlap, abs=1e-12)
        assert valuation_additivity_check(a, b) < 1e-12

    def test_all_indices_for_convex_union(self):
        a = ConvexPolytope.box([0, 0], [1, 1])
        b = ConvexPolytope.box([0.5, 0], [2, 1])
        for i in range(3):
            assert valuation_additivity_check(a, b, i) < 1e-9

    def test_nonconvex_union_lower_index_rejected(self):
        a = ConvexPolytope.box([0, 0], [2, 1])
        b = ConvexPolytope.box([0, 0], [1, 2])
        with pytest.raises(ValueError):
            valuation_additivity_check(a, b, 1)


class TestSylvester:
    def test_homothety(self):
        assert sylvester_ratio(ValuationVector.ball(2), ValuationVector.ball(2, 2.0), 1) == pytest.approx(0.5)

    def test_identity(self):
        v = intrinsic_volumes(ConvexPolytope.regular_polygon(7, 1.3))
        assert sylvester_ratio(v, v, 1) == 1.0

    def test_square_in_disc_by_lines(self):
        square = ConvexPolytope.box([-0.5, -0.5], [0.5, 0.5])
        ratio = sylvester_ratio(intrinsic_volumes(square), ValuationVector.ball(2, 1.0), 1)
        assert ratio == pytest.approx(2 / math.pi)
        frac, se = line_hit_fraction(square, 1.0, (0.0, 0.0), 400_000, 5)
        assert abs(frac - ratio) < 3 * se


class TestKinematic:
    def test_point_reduces_to_volume(self):
        for n in (2, 3):
            a = ValuationVector.ball(n, 1.7)
            assert kinematic_measure(a, ValuationVector.point(n)) == pytest.approx(a[n], abs=1e-12)

    def test_symmetric(self):
        v = intrinsic_volumes(ConvexPolytope.regular_polygon(5, 1.0))
        w = intrinsic_volumes(ConvexPolytope.box([0, 0], [2, 0.5]))
        assert kinematic_measure(v, w) == pytest.approx(kinematic_measure(w, v), rel=1e-14)

    def test_two_discs(self):
        # two discs of radii r, s meet iff centres within r + s: measure pi (r + s)^2
        r, s = 0.7, 1.9
        val = kinematic_measure(ValuationVector.ball(2, r), ValuationVector.ball(2, s))
        assert val == pytest.approx(math.pi * (r + s) ** 2, rel=1e-12)


class TestPrediction:
    def test_literal_variant_example(self):
        mp.dps = 40
        a = 2 / mpi
        oracle = (a / mpi) * (4 * mpf("0.1") / ((a * 2 / (2 * 2)) * mpf("0.1") + 1))
        assert alpha(2) == pytest.approx(2 / math.pi, abs=1e-15)
        p = predicted_success(PredictionInput(2, 4.0, 0.1, 2.0, Variant.PAPER_LITERAL))
        assert p == pytest.approx(float(oracle), rel=1e-12)
        assert p == pytest.approx(0.07856, abs=1e-5)

    def test_corrected_example(self):
        a = 2 / math.pi
        expected = a * 4 * 0.1 / (a * math.pi * 0.1 + math.pi)
        p = predicted_success(PredictionInput(2, 4.0, 0.1, 2.0, Variant.RADIUS_CORRECTED))
        assert p == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("variant", list(Variant))
    def test_limits_and_linearity(self, variant):
        small = predicted_success(PredictionInput(2, 4.0, 1e-12, 2.0, variant))
        assert small < 1e-11
        p1 = predicted_success(PredictionInput(3, 5.0, 0.2, 3.0, variant))
        p2 = predicted_success(PredictionInput(3, 10.0, 0.2, 3.0, variant))
        assert p2 == pytest.approx(2 * p1, rel=1e-14)

    @pytest.mark.parametrize("variant", list(Variant))
    def test_monotone_grid(self, variant):
        for n in (2, 3):
            rates = [predicted_success(PredictionInput(n, b, 0.1, 4.0, variant)) for b in np.linspace(0.5, 20, 30)]
            assert all(x < y for x, y in zip(rates, rates[1:]))
            rates = [predicted_success(PredictionInput(n, 8.0, dl, 4.0, variant)) for dl in np.linspace(0.01, 4.0, 30)]
            assert all(x < y for x, y in zip(rates, rates[1:]))

    def test_input_validation(self):
        with pytest.raises(ValueError):
            PredictionInput(2, 4.0, -0.1, 2.0, Variant.PAPER_LITERAL)
        with pytest.raises(ValueError):
            PredictionInput(2, -4.0, 0.1, 2.0, Variant.PAPER_LITERAL)


class TestCrofton:
    def test_square(self, unit_square):
        est, se = crofton_sample(unit_square, 200_000, 1)
        assert est == pytest.approx(4.0, rel=0.02)
        assert abs(est - 4.0) < 4 * se

    def test_segment_counts_both_sides(self):
        seg = Segment((0.0, 0.0), (1.0, 0.0))
        est, se = crofton_sample(seg, 200_000, 2)
        assert abs(est - 2.0) < 4 * se

    def test_nonconvex_union(self, plus_sign):
        est, se = crofton_sample(plus_sign, 200_000, 3)
        assert abs(est - 16.0) < 4 * se

    def test_motion_invariance_in_distribution(self):
        shape = PolyconvexSet.of(disc_polygon(9, 1.0))
        moved = shape.transformed(RigidMotion.planar(0.4, (3.0, -2.0)))
        a, sa = crofton_sample(shape, 100_000, 8)
        b, sb = crofton_sample(moved, 100_000, 8)
        assert abs(a - b) < 3 * math.hypot(sa, sb)

    def test_deterministic(self, unit_square):
        assert crofton_sample(unit_square, 10_000, 4) == crofton_sample(unit_square, 10_000, 4)
