"""Halphen system, self-dual metric families, and the Omega-variable routes."""

import numpy as np
import pytest

from thetakit.errors import ConsistencyError, DomainError, RealityError
from thetakit.halphen import (halphen, halphen_residual,
                              integral_of_motion_residual,
                              metric_flow_residual, mobius_covariance_residual,
                              modulus_flow_residual, modulus_of_x,
                              omega_constraint_residual, omega_flow_residual,
                              omega_vars, sd_metric_degenerate,
                              sd_metric_general)

# (p, q) with Re q = 1/2 chosen well away from the zero locus of
# theta[p,q](0, i mu): q_im = mu (1/2 - p) mod mu hits the divisor, so large
# imaginary parts are safe for mu near 1.
P0, Q0 = 0.3, 0.5 + 0.7j


class TestHalphen:
    @pytest.mark.parametrize("mu", [0.7, 1.0, 1.6])
    def test_system_residual(self, mu):
        assert halphen_residual(mu) < 1e-8

    def test_fixed_point_identity(self):
        # tau = i is fixed by the S-transform exchanging theta2 and theta4;
        # the sqrt(mu) modular factor shifts the log-derivative, giving
        # A1 + A3 = -1 at mu = 1 (the naive A1 = A3 does not hold).
        a1, _, a3 = halphen(1.0)
        assert abs(a1 + a3 + 1.0) < 1e-10

    def test_mobius_unit_shift_covariance(self):
        assert mobius_covariance_residual(0.9) < 1e-7


class TestGeneralFamily:
    @pytest.mark.parametrize("mu", [0.8, 1.05, 1.3])
    def test_flow_residual(self, mu):
        fn = lambda m: sd_metric_general(P0, Q0, m)
        assert metric_flow_residual(fn, mu) < 1e-7

    @pytest.mark.parametrize("mu", [0.8, 1.05, 1.3])
    def test_integral_of_motion(self, mu):
        assert integral_of_motion_residual(sd_metric_general(P0, Q0, mu)) < 1e-7

    def test_reality_rc2_gives_real_data(self):
        s = sd_metric_general(P0, Q0, 1.1, Lambda=-3.0, reality="rc2")
        assert abs(s.F.imag) < 1e-10
        for w in (s.W1, s.W2, s.W3):
            assert abs((w ** 2).imag) < 1e-10 * max(1.0, abs(w) ** 2)

    def test_reality_violation_rejected(self):
        with pytest.raises(RealityError):
            sd_metric_general(0.3 + 0.1j, Q0, 1.1, reality="rc2")
        with pytest.raises(RealityError):
            sd_metric_general(P0, Q0, 1.1, reality="rc4")

    def test_theta_divisor_rejected(self):
        # q + p tau = (1 + tau)/2 at (p, q, mu) = (0.3, 1/2 + 0.2i, 1):
        # theta[p,q](0) vanishes exactly and the sample must be refused
        with pytest.raises(DomainError):
            sd_metric_general(0.3, 0.5 + 0.2j, 1.0)


class TestDegenerateFamily:
    @pytest.mark.parametrize("mu", [0.8, 1.2])
    def test_flow_residual(self, mu):
        fn = lambda m: sd_metric_degenerate(0.3, 1.0, m)
        assert metric_flow_residual(fn, mu) < 1e-7

    def test_fixed_point_identity(self):
        # W1 + W3 = 2/(mu + q0) - 1 at mu = 1 (same mechanism as A1 + A3 = -1)
        s = sd_metric_degenerate(0.3, 1.0, 1.0)
        assert abs(s.W1 + s.W3 - (2.0 / 1.3 - 1.0)) < 1e-10

    def test_conformal_factor_real_positive(self):
        # F is real for real parameters; it is positive on the small-mu window
        # where the product W1 W2 W3 is positive (two coefficients negative)
        s = sd_metric_degenerate(0.3, 2.0, 0.3)
        assert abs(s.F.imag) < 1e-12
        assert s.F.real > 0
        assert s.Lambda == 0.0

    def test_integral_of_motion_reported(self):
        # the residual is reported, not bounded a priori; in fact the pole
        # terms cancel through the Jacobi quartic identity and
        # d/dmu (theta2^4 - theta3^4 + theta4^4) = 0, so the degenerate family
        # sits on the same level set and the residual is numerically zero
        r = integral_of_motion_residual(sd_metric_degenerate(0.3, 1.0, 1.1))
        assert np.isfinite(r)
        assert r < 1e-10

    def test_pole_rejected(self):
        with pytest.raises(DomainError):
            sd_metric_degenerate(-1.0, 1.0, 1.0)


class TestOmegaVars:
    @pytest.mark.parametrize("x", [0.3, 0.5, 0.7])
    def test_two_routes_agree(self, x):
        ov = omega_vars(x, P0, Q0)
        assert np.max(np.abs(ov.sq_metric - ov.sq_tau)) < 1e-5

    @pytest.mark.parametrize("x", [0.3, 0.5, 0.7])
    def test_quadric_constraint(self, x):
        assert omega_constraint_residual(omega_vars(x, P0, Q0)) < 1e-7

    def test_flow_residual(self):
        assert omega_flow_residual(0.5, P0, Q0) < 1e-5

    def test_inconsistent_routes_raise(self):
        with pytest.raises(ConsistencyError):
            omega_vars(0.5, P0, Q0, consistency_tol=1e-12)


class TestModulusFlow:
    def test_residual_at_half(self):
        assert modulus_flow_residual(0.5) < 1e-7

    def test_mirror_pair(self):
        r1 = modulus_flow_residual(0.25)
        r2 = modulus_flow_residual(0.75)
        assert abs(r1 - r2) < 1e-8

    def test_step_halving_second_order(self):
        # plain central difference converges at second order to the closed form
        from thetakit.hyperelliptic import elliptic_k
        x = 0.4
        K = elliptic_k(x)
        rhs = np.pi / (4 * K * K * x * (x - 1))

        def resid(h):
            d = (modulus_of_x(x + h) - modulus_of_x(x - h)) / (2 * h)
            return abs(d - rhs)

        r1, r2 = resid(2e-2), resid(1e-2)
        assert r2 < r1
        assert 3.0 < r1 / r2 < 5.0

    def test_monotone_decreasing(self):
        assert modulus_of_x(0.3) > modulus_of_x(0.5) > modulus_of_x(0.7)
