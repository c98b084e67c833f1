"""Genus-one kernel tests: prime form, bidifferential, Szego kernel, Fay identity."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetakit.errors import DomainError, SingularityError
from thetakit.kernels import (KernelValue, TorusPoint, VSpec, bergman_b,
                              bergman_reg, bergman_sb, fay_residual, flat_vspec,
                              prime_form, q_v, q_v_schwarzian, ssb_residual,
                              szego, szego_a0, szego_char_variation_residual,
                              szego_cycle_integral, theta1, theta1_prime)
from thetakit.numerics import adaptive_segment
from thetakit.theta import ThetaCharacteristics

TAU = 1j
CHARS = ThetaCharacteristics([0.3], [0.2])


def tp(z, tau=TAU):
    return TorusPoint(z, tau)


class TestPrimeForm:
    def test_coincident_points_flagged(self):
        e = prime_form(tp(0.3 + 0.1j), tp(0.3 + 0.1j))
        assert e.value == 0.0 and e.coincident
        e2 = prime_form(tp(0.3 + 0.1j), tp(1.3 + 0.1j))  # same point mod lattice
        assert e2.coincident

    def test_diagonal_asymptotics(self):
        # E(x,y)/(x-y) -> 1 at O((x-y)^2); the quadratic coefficient at tau=i
        # is theta1'''(0)/(6 theta1'(0)) = -pi/2, so the deviations are
        # ~1.6e-2 and ~1.6e-4 and their ratio exhibits the O(d^2) rate.
        devs = []
        for d in (0.1, 0.01):
            e = prime_form(tp(0.2), tp(0.2 - d)).value
            devs.append(abs(e / d - 1.0))
        assert devs[0] < 2e-2
        assert devs[1] < 2e-4
        assert 80 < devs[0] / devs[1] < 120

    def test_automorphy_along_b(self):
        x, y = 0.31 + 0.12j, 0.18 - 0.05j
        e_shift = theta1(x + TAU - y, TAU) / theta1_prime(TAU)
        e = theta1(x - y, TAU) / theta1_prime(TAU)
        pred = -np.exp(-1j * np.pi * TAU - 2j * np.pi * (x - y)) * e
        assert abs(e_shift - pred) < 1e-10

    @settings(max_examples=20, deadline=None)
    @given(seed=st.integers(0, 2 ** 16))
    def test_antisymmetry(self, seed):
        rng = np.random.default_rng(seed)
        x = tp(complex(rng.uniform(0, 1), rng.uniform(0, 0.9)))
        y = tp(complex(rng.uniform(0, 1), rng.uniform(0, 0.9)))
        if abs(x.z - y.z) < 1e-3:
            return
        assert abs(prime_form(x, y).value + prime_form(y, x).value) < 1e-12


class TestBergman:
    def test_a_period_vanishes(self):
        x = tp(0.31 + 0.62j)
        f = lambda ts: np.array([bergman_b(x, tp(t)).value for t in ts])
        val = adaptive_segment(f, 0.05 + 0.2j, 1.05 + 0.2j, tol=1e-11)
        assert abs(val) < 1e-9

    def test_symmetry(self):
        x, y = tp(0.31 + 0.12j), tp(0.68 + 0.43j)
        assert abs(bergman_b(x, y).value - bergman_b(y, x).value) < 1e-12

    def test_coincident_rejected(self):
        with pytest.raises(SingularityError):
            bergman_b(tp(0.2), tp(0.2))

    def test_diagonal_expansion_constant(self):
        # Richardson extraction of the constant term of B - (x-y)^{-2}
        # reproduces S_B/6 from the theta third derivative.
        x0 = 0.3
        f = lambda d: bergman_b(tp(x0), tp(x0 - d)).value - 1.0 / d ** 2
        extracted = (4 * f(0.005) - f(0.01)) / 3
        assert abs(extracted - bergman_sb(TAU) / 6) < 1e-4

    def test_breg_flat_constant(self):
        vals = [bergman_reg(tp(z), flat_vspec()).value
                for z in (0.1 + 0.2j, 0.45 + 0.67j, 0.8 + 0.1j)]
        sb6 = bergman_sb(TAU) / 6
        for v in vals:
            assert abs(v - sb6) < 1e-6
        assert max(abs(v - vals[0]) for v in vals) < 1e-8

    def test_breg_scale_invariant(self):
        v1 = VSpec(v=lambda z: np.exp(0.3 * z),
                   antiderivative=lambda z: np.exp(0.3 * z) / 0.3)
        v2 = VSpec(v=lambda z: 2.7 * np.exp(0.3 * z),
                   antiderivative=lambda z: 2.7 * np.exp(0.3 * z) / 0.3)
        b1 = bergman_reg(tp(0.22 + 0.3j), v1).value
        b2 = bergman_reg(tp(0.22 + 0.3j), v2).value
        assert abs(b1 - b2) < 1e-8

    def test_breg_rejects_zero_of_v(self):
        vspec = VSpec(v=lambda z: z - (0.2 + 0.2j))
        with pytest.raises(SingularityError):
            bergman_reg(tp(0.2 + 0.2j), vspec)

    def test_qv_two_routes_agree(self):
        vspec = VSpec(v=lambda z: np.exp(0.3 * z),
                      antiderivative=lambda z: np.exp(0.3 * z) / 0.3)
        rng = np.random.default_rng(0)
        for _ in range(4):
            z = complex(rng.uniform(0.05, 0.9), rng.uniform(0.05, 0.9))
            assert abs(q_v(tp(z), vspec) - q_v_schwarzian(tp(z), vspec)) < 1e-6


class TestSzego:
    def test_diagonal_constant_matches_a0(self):
        x0 = 0.3
        f = lambda d: szego(tp(x0), tp(x0 - d), CHARS).value - 1.0 / d
        extracted = 2 * f(0.005) - f(0.01)
        assert abs(extracted - szego_a0(tp(x0), CHARS)) < 1e-3

    def test_ssb_relation_sweep(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            x = tp(complex(rng.uniform(0, 1), rng.uniform(0, 0.9)))
            y = tp(complex(rng.uniform(0, 1), rng.uniform(0, 0.9)))
            if abs(x.z - y.z) < 5e-2:
                continue
            assert ssb_residual(x, y, CHARS) < 1e-9

    def test_product_even_for_zero_chars(self):
        ch0 = ThetaCharacteristics([0.0], [0.0])
        x, y = tp(0.31 + 0.12j), tp(0.67 + 0.39j)
        d = x.z - y.z
        p1 = szego(x, y, ch0).value * szego(y, x, ch0).value
        x2, y2 = tp(0.5 - d / 2), tp(0.5 + d / 2)  # same separation, opposite sign
        p2 = szego(x2, y2, ch0).value * szego(y2, x2, ch0).value
        assert abs(p1 - p2) < 1e-10

    def test_degenerate_characteristics_rejected(self):
        odd = ThetaCharacteristics([0.5], [0.5])  # theta[1/2,1/2](0) = 0
        with pytest.raises(DomainError):
            szego(tp(0.3), tp(0.1), odd)


class TestFay:
    def test_random_sweep(self):
        rng = np.random.default_rng(2)
        count = 0
        while count < 10:
            zs = [complex(rng.uniform(0.03, 0.97), rng.uniform(0.03, 0.9))
                  for _ in range(4)]
            if min(abs(a - b) for i, a in enumerate(zs)
                   for b in zs[i + 1:]) < 0.05:
                continue
            assert fay_residual(*[tp(z) for z in zs], CHARS) < 1e-9
            count += 1

    def test_near_degenerate_configuration(self):
        x1, x2 = tp(0.2 + 0.3j), tp(0.6 + 0.1j)
        y1, y2 = tp(x2.z + 0.003), tp(x1.z + 0.003)
        assert fay_residual(x1, x2, y1, y2, CHARS) < 1e-7

    def test_coincident_rejected(self):
        with pytest.raises(SingularityError):
            fay_residual(tp(0.2), tp(0.3), tp(0.2), tp(0.5), CHARS)

    def test_n1_is_definition(self):
        # at n=1 the identity is the Szego kernel definition itself
        x, y = tp(0.31 + 0.12j), tp(0.68 + 0.43j)
        s = szego(x, y, CHARS).value
        from thetakit.theta import theta_eval
        om = np.array([[TAU]])
        rhs = (theta_eval([x.z - y.z], om, CHARS).value
               / (theta_eval([0.0], om, CHARS).value * prime_form(x, y).value))
        assert abs(s - rhs) < 1e-15 * max(1.0, abs(s))


class TestCharVariation:
    def test_residuals_both_directions(self):
        x, y = tp(0.31 + 0.12j), tp(0.68 + 0.43j)
        assert szego_char_variation_residual(x, y, CHARS, "p") < 1e-6
        assert szego_char_variation_residual(x, y, CHARS, "q") < 1e-6

    def test_symmetric_configuration(self):
        x, y = tp(0.21 + 0.33j), tp(-0.21 - 0.33j)
        assert szego_char_variation_residual(x, y, CHARS, "q") < 1e-6

    def test_step_sweep_second_order(self):
        # residual of the one-sided FD (no Richardson) scales as O(h^2)
        x, y = tp(0.31 + 0.12j), tp(0.68 + 0.43j)
        quad = szego_cycle_integral(x, y, CHARS, cycle="a")

        def plain_fd(h):
            sp = szego(x, y, ThetaCharacteristics(CHARS.p, CHARS.q + h)).value
            sm = szego(x, y, ThetaCharacteristics(CHARS.p, CHARS.q - h)).value
            return (sp - sm) / (2 * h)

        r1 = abs(plain_fd(1e-2) + quad)
        r2 = abs(plain_fd(5e-3) + quad)
        assert r1 < 5e-3 and r2 < r1
        assert 3.0 < r1 / r2 < 5.0
