"""Constitutive curves, elements, waveforms, and the Legendre identity."""

import numpy as np
import pytest
from scipy.integrate import quad

from helpers import random_monotone_poly, random_pwl

from memlag.constitutive import (
    Element,
    ElementKind,
    Modulation,
    ScalarCurve,
    SourceWaveform,
    curve_antideriv,
    curve_deriv,
    curve_eval,
    curve_inverse,
    format_curve_literal,
    incremental_value,
    legendre_residual,
    parse_curve_literal,
    parse_domain_literal,
)
from memlag.errors import CurveDomainError, CurveError, CurveRangeError


CUBIC = ScalarCurve.poly((0.0, 1.0, 0.0, 1.0 / 3.0))


class TestCurveEval:
    def test_identity_poly(self):
        c = ScalarCurve.poly((0.0, 1.0))
        assert curve_eval(c, 3.0) == 3.0

    def test_cubic_origin(self):
        assert curve_eval(CUBIC, 0.0) == 0.0

    def test_pwl_interpolation(self):
        c = ScalarCurve.pwl(((-1.0, -2.0), (0.0, 0.0), (1.0, 2.0)))
        assert curve_eval(c, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_out_of_domain_names_the_point(self):
        c = ScalarCurve.poly((0.0, 1.0), domain=(-1.0, 1.0))
        with pytest.raises(CurveDomainError) as err:
            curve_eval(c, 2.0)
        assert "2" in str(err.value)


class TestCurveDeriv:
    def test_cubic(self):
        assert curve_deriv(CUBIC, 2.0) == pytest.approx(5.0, abs=1e-14)

    def test_linear_reduces_to_constant(self):
        c = ScalarCurve.poly((0.0, 0.02))
        for x in (-3.0, 0.0, 1.7):
            assert curve_deriv(c, x) == 0.02

    def test_pwl_segment_slope(self):
        c = ScalarCurve.pwl(((0.0, 0.0), (1.0, 1.0), (2.0, 3.0)))
        assert curve_deriv(c, 1.5) == pytest.approx(2.0, abs=1e-15)

    def test_pwl_breakpoint_uses_right_slope(self):
        c = ScalarCurve.pwl(((0.0, 0.0), (1.0, 1.0), (2.0, 3.0)))
        assert curve_deriv(c, 1.0) == pytest.approx(2.0, abs=1e-15)

    def test_matches_finite_difference(self):
        rng = np.random.default_rng(11)
        for trial in range(20):
            c = random_monotone_poly(rng)
            for x in rng.uniform(-1.8, 1.8, 10):
                h = 1e-6 * (1.0 + abs(x))
                fd = (curve_eval(c, x + h) - curve_eval(c, x - h)) / (2 * h)
                d = curve_deriv(c, x)
                assert abs(d - fd) <= 1e-6 * (1.0 + abs(d))


class TestCurveAntideriv:
    def test_linear(self):
        c = ScalarCurve.poly((0.0, 1.0))
        assert curve_antideriv(c, 2.0) == pytest.approx(2.0, abs=1e-15)

    def test_cubic_termwise(self):
        assert curve_antideriv(CUBIC, 1.0) == pytest.approx(
            0.5 + 1.0 / 12.0, abs=1e-15)

    def test_pwl_triangle(self):
        c = ScalarCurve.pwl(((0.0, 0.0), (1.0, 2.0)))
        assert curve_antideriv(c, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_matches_quadrature(self):
        rng = np.random.default_rng(12)
        for trial in range(5):
            c = random_pwl(rng)
            kinks = [p[0] for p in c.points]
            for x in rng.uniform(-1.9, 1.9, 4):
                lo, hi = min(0.0, x), max(0.0, x)
                inner = [k for k in kinks if lo < k < hi]
                ref, _ = quad(lambda s: curve_eval(c, s), lo, hi,
                              points=inner, limit=200)
                if x < 0.0:
                    ref = -ref
                assert curve_antideriv(c, x) == pytest.approx(ref, abs=1e-9)

    def test_fd_of_antideriv_matches_eval(self):
        rng = np.random.default_rng(13)
        for trial in range(20):
            c = random_monotone_poly(rng)
            for x in rng.uniform(-1.8, 1.8, 10):
                h = 1e-6 * (1.0 + abs(x))
                fd = (curve_antideriv(c, x + h)
                      - curve_antideriv(c, x - h)) / (2 * h)
                y = curve_eval(c, x)
                assert abs(y - fd) <= 1e-6 * (1.0 + abs(y))

    def test_base_point_outside_domain_rejected(self):
        c = ScalarCurve.poly((0.0, 1.0), domain=(1.0, 3.0))
        with pytest.raises(CurveDomainError):
            curve_antideriv(c, 2.0)


class TestCurveInverse:
    def test_odd_cubic_at_zero(self):
        assert curve_inverse(CUBIC, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_linear_solve(self):
        c = ScalarCurve.poly((0.0, 2.0))
        assert curve_inverse(c, 5.0) == pytest.approx(2.5, abs=1e-12)

    def test_forward_then_invert(self):
        y = curve_eval(CUBIC, 1.0)
        assert y == pytest.approx(1.0 + 1.0 / 3.0, abs=1e-15)
        assert curve_inverse(CUBIC, y) == pytest.approx(1.0, abs=1e-11)

    def test_round_trip_property(self):
        rng = np.random.default_rng(14)
        for trial in range(15):
            c = random_monotone_poly(rng) if trial % 2 else random_pwl(rng)
            for x in rng.uniform(-1.9, 1.9, 12):
                x_back = curve_inverse(c, curve_eval(c, x))
                assert abs(x_back - x) <= 1e-9 * (1.0 + abs(x))

    def test_contract_residual(self):
        rng = np.random.default_rng(15)
        for trial in range(10):
            c = random_monotone_poly(rng)
            for y in rng.uniform(curve_eval(c, -1.9), curve_eval(c, 1.9), 8):
                x = curve_inverse(c, y)
                assert abs(curve_eval(c, x) - y) <= 1e-12 * (1.0 + abs(y))

    def test_out_of_range_rejected(self):
        c = ScalarCurve.poly((0.0, 1.0), domain=(-1.0, 1.0))
        with pytest.raises(CurveRangeError):
            curve_inverse(c, 2.0)


class TestMonotonicityContract:
    def test_sampled_monotonicity_property(self):
        rng = np.random.default_rng(16)
        for trial in range(10):
            c = random_monotone_poly(rng) if trial % 2 else random_pwl(rng)
            xs = np.sort(rng.uniform(-1.9, 1.9, 30))
            ys = [curve_eval(c, x) for x in xs]
            assert all(a < b for a, b in zip(ys, ys[1:]))

    def test_decreasing_poly_rejected(self):
        with pytest.raises(CurveError):
            ScalarCurve.poly((0.0, -1.0))

    def test_flat_sample_rejected(self):
        # derivative of x^3 vanishes at the sampled endpoint-symmetric grid
        with pytest.raises(CurveError):
            ScalarCurve.poly((0.0, 0.0, 0.0, 1.0), domain=(-1.0, 1.0))

    def test_pwl_flat_segment_rejected(self):
        with pytest.raises(CurveError):
            ScalarCurve.pwl(((-1.0, -1.0), (0.0, 0.0), (1.0, 0.0)))

    def test_pwl_unsorted_rejected(self):
        with pytest.raises(CurveError):
            ScalarCurve.pwl(((0.0, 0.0), (2.0, 2.0), (1.0, 1.0)))

    def test_origin_violation_rejected(self):
        with pytest.raises(CurveError):
            ScalarCurve.poly((0.5, 1.0))
        with pytest.raises(CurveError):
            ScalarCurve.pwl(((-1.0, -0.5), (1.0, 1.5)))

    def test_origin_not_required_outside_domain(self):
        c = ScalarCurve.poly((0.5, 1.0), domain=(1.0, 2.0))
        assert curve_eval(c, 1.5) == 2.0

    def test_pwl_domain_beyond_hull_rejected(self):
        with pytest.raises(CurveError):
            ScalarCurve.pwl(((-1.0, -1.0), (1.0, 1.0)), domain=(-2.0, 2.0))


class TestIncrementalValue:
    def test_memristance(self):
        el = Element(name="M", kind=ElementKind.MEMRISTOR,
                     membership=((1, 1),), curve=CUBIC,
                     modulation=Modulation.CHARGE)
        assert incremental_value(el, 1.0) == pytest.approx(2.0, abs=1e-14)

    def test_linear_meminductor_is_plain_inductance(self):
        el = Element(name="ML", kind=ElementKind.MEMINDUCTOR,
                     membership=((1, 1),),
                     curve=ScalarCurve.poly((0.0, 0.75)),
                     modulation=Modulation.CHARGE)
        states = np.linspace(-2.0, 2.0, 100)
        vals = [incremental_value(el, s) for s in states]
        assert all(v == vals[0] == 0.75 for v in vals)

    def test_linear_memcapacitance(self):
        el = Element(name="MC", kind=ElementKind.MEMCAPACITOR,
                     membership=((1, 1),),
                     curve=ScalarCurve.poly((0.0, 1e-6)),
                     modulation=Modulation.FLUX)
        assert incremental_value(el, 0.3) == pytest.approx(1e-6, abs=1e-20)

    def test_conventional_returns_parameter(self):
        el = Element(name="R", kind=ElementKind.RESISTOR,
                     membership=((1, 1),), value=4.7)
        assert incremental_value(el, 123.0) == 4.7


class TestLegendreResidual:
    def test_symmetric_linear_case(self):
        c = ScalarCurve.poly((0.0, 1.0))
        assert legendre_residual(c, 3.0) == pytest.approx(0.0, abs=1e-12)

    def test_zero_at_origin(self):
        rng = np.random.default_rng(17)
        for trial in range(6):
            c = random_monotone_poly(rng) if trial % 2 else random_pwl(rng)
            assert legendre_residual(c, 0.0) == pytest.approx(0.0, abs=1e-15)

    def test_cubic_against_quadrature_oracle(self):
        # co-state function rebuilt by adaptive quadrature of the inverse
        x = 1.0
        y = curve_eval(CUBIC, x)
        co_ref, _ = quad(lambda s: curve_inverse(CUBIC, s), 0.0, y,
                         limit=200)
        direct = curve_antideriv(CUBIC, x) + co_ref - x * y
        assert abs(direct) <= 1e-9
        assert abs(legendre_residual(CUBIC, x)) <= 1e-9 * (1.0 + abs(x * y))
        assert legendre_residual(CUBIC, x) == pytest.approx(direct, abs=1e-9)

    def test_identity_property(self):
        rng = np.random.default_rng(18)
        for trial in range(20):
            c = random_monotone_poly(rng) if trial % 2 else random_pwl(rng)
            for x in rng.uniform(-1.9, 1.9, 15):
                y = curve_eval(c, x)
                assert abs(legendre_residual(c, x)) <= 1e-9 * (1 + abs(x * y))


class TestElementValidation:
    def test_nonpositive_parameter_rejected(self):
        with pytest.raises(CurveError):
            Element(name="R", kind=ElementKind.RESISTOR,
                    membership=((1, 1),), value=0.0)

    def test_modulation_compatibility(self):
        with pytest.raises(CurveError):
            Element(name="M", kind=ElementKind.MEMRISTOR,
                    membership=((1, 1),), curve=CUBIC,
                    modulation=Modulation.INTEGRATED_FLUX)

    def test_memory_requires_origin_in_domain(self):
        off = ScalarCurve.poly((0.5, 1.0), domain=(1.0, 2.0))
        with pytest.raises(CurveError):
            Element(name="M", kind=ElementKind.MEMRISTOR,
                    membership=((1, 1),), curve=off,
                    modulation=Modulation.CHARGE)

    def test_membership_signs_checked(self):
        with pytest.raises(CurveError):
            Element(name="R", kind=ElementKind.RESISTOR,
                    membership=((1, 2),), value=1.0)
        with pytest.raises(CurveError):
            Element(name="R", kind=ElementKind.RESISTOR,
                    membership=((1, 1), (1, -1)), value=1.0)
        with pytest.raises(CurveError):
            Element(name="R", kind=ElementKind.RESISTOR,
                    membership=((0, 1),), value=1.0)


class TestSourceWaveform:
    def test_dc(self):
        w = SourceWaveform(shape="dc", amplitude=2.0)
        assert w.value(3.0) == 2.0
        assert w.integral(3.0) == pytest.approx(6.0, abs=1e-15)
        assert w.derivative(3.0) == 0.0

    def test_sin_integral_matches_quadrature(self):
        w = SourceWaveform(shape="sin", amplitude=1.3, omega=2.1, phase=0.4)
        for t in (0.5, 1.0, 4.0):
            ref, _ = quad(w.value, 0.0, t, limit=200)
            assert w.integral(t) == pytest.approx(ref, abs=1e-10)

    def test_sin_derivative(self):
        w = SourceWaveform(shape="sin", amplitude=1.3, omega=2.1, phase=0.4)
        h = 1e-7
        fd = (w.value(1.0 + h) - w.value(1.0 - h)) / (2 * h)
        assert w.derivative(1.0) == pytest.approx(fd, abs=1e-6)

    def test_sin_requires_positive_omega(self):
        with pytest.raises(CurveError):
            SourceWaveform(shape="sin", amplitude=1.0, omega=0.0)

    def test_dc_rejects_omega(self):
        with pytest.raises(CurveError):
            SourceWaveform(shape="dc", amplitude=1.0, omega=1.0)


class TestCurveLiterals:
    def test_poly_round_trip(self):
        c = parse_curve_literal("poly(0,1,0,0.25)")
        assert curve_eval(c, 2.0) == pytest.approx(4.0, abs=1e-15)
        again = parse_curve_literal(format_curve_literal(c))
        assert again == c

    def test_pwl_round_trip(self):
        c = parse_curve_literal("pwl((-1,-2),(0,0),(1,2))")
        again = parse_curve_literal(format_curve_literal(c))
        assert again == c

    def test_domain_literal(self):
        assert parse_domain_literal("[-2,3]") == (-2.0, 3.0)
        c = parse_curve_literal("poly(0,1)", domain=(-2.0, 3.0))
        assert c.domain == (-2.0, 3.0)

    def test_malformed_literal_rejected(self):
        for bad in ("poly()", "poly(0,1", "pwl((0,0))", "spline(1,2)",
                    "pwl((0,0),(1))"):
            with pytest.raises(CurveError):
                parse_curve_literal(bad)

    def test_random_round_trip_property(self):
        rng = np.random.default_rng(19)
        for trial in range(20):
            c = random_monotone_poly(rng) if trial % 2 else random_pwl(rng)
            again = parse_curve_literal(format_curve_literal(c),
                                        domain=c.domain)
            xs = rng.uniform(-1.9, 1.9, 7)
            for x in xs:
                assert curve_eval(again, x) == curve_eval(c, x)
