"""Tests for the theta series: frozen oracle values, heat equation, tail soundness."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetakit.errors import DomainError, TruncationError, UnsupportedOrderError
from thetakit.theta import (PeriodMatrix, ThetaCharacteristics, jacobi_constants,
                            theta_dmu, theta_deriv, theta_eval)

# Brute-force lattice-sum oracles (radius 60, tail < 1e-15):
#   theta3(0|i)   = sum exp(-pi n^2)
#   theta3(0|i)^2 = g=2 diagonal value
THETA3_AT_I = 1.0864348112133082
THETA3_AT_I_SQ = 1.1803405990160967


def brute_theta(z, Om, p, q, radius=40):
    """Plain-python lattice sum, independent of the package evaluation path."""
    g = len(z)
    rng = range(-radius, radius + 1)
    idx = np.stack(np.meshgrid(*[list(rng)] * g, indexing="ij"), axis=-1).reshape(-1, g)
    m = idx + np.asarray(p)
    quad = np.einsum("ij,nj,ni->n", np.asarray(Om), m, m)
    lin = m @ (np.asarray(z) + np.asarray(q))
    return np.exp(1j * np.pi * quad + 2j * np.pi * lin).sum()


def random_period_matrix(rng, g):
    M = rng.normal(size=(g, g))
    X = rng.normal(size=(g, g))
    return (0.3 * (X + X.T) / 2 + 1j * (M @ M.T + 0.4 * np.eye(g)))


class TestEval:
    def test_theta3_at_i(self):
        t = theta_eval([0.0], [[1j]], tol=1e-13)
        assert abs(t.value - THETA3_AT_I) < 1e-13
        assert t.tail_bound <= 1e-13

    def test_g2_diagonal_factorizes(self):
        t = theta_eval([0.0, 0.0], np.eye(2) * 1j)
        assert abs(t.value - THETA3_AT_I_SQ) < 1e-12

    def test_matches_brute_force_g2(self):
        rng = np.random.default_rng(7)
        Om = random_period_matrix(rng, 2)
        z = rng.normal(size=2) * 0.4 + 1j * rng.normal(size=2) * 0.2
        p = rng.normal(size=2) * 0.3
        q = rng.normal(size=2) * 0.3
        ours = theta_eval(z, Om, ThetaCharacteristics(p, q), tol=1e-13).value
        brute = brute_theta(z, Om, p, q, radius=25)
        assert abs(ours - brute) < 1e-12

    def test_shift_by_e1(self):
        rng = np.random.default_rng(3)
        Om = random_period_matrix(rng, 2)
        ch = ThetaCharacteristics([0.31, -0.2], [0.12, 0.4])
        z = np.array([0.1 + 0.05j, -0.2 + 0.1j])
        lhs = theta_eval(z + np.array([1.0, 0.0]), Om, ch).value
        rhs = np.exp(2j * np.pi * ch.p[0]) * theta_eval(z, Om, ch).value
        assert abs(lhs - rhs) < 1e-12

    def test_non_positive_definite_rejected(self):
        with pytest.raises(DomainError):
            theta_eval([0.0], [[-1j]])
        with pytest.raises(DomainError):
            PeriodMatrix(np.array([[1j, 0.5], [0.2, 1j]]))  # not symmetric

    def test_truncation_cap(self):
        with pytest.raises(TruncationError) as exc:
            theta_eval([0.0], [[1e-6j]], tol=1e-12, radius_cap=3.0)
        assert exc.value.achieved_bound > 0

    def test_tail_bound_soundness(self):
        rng = np.random.default_rng(11)
        for g in (1, 2):
            Om = random_period_matrix(rng, g)
            z = rng.normal(size=g) * 0.3 + 0.1j * rng.normal(size=g)
            ch = ThetaCharacteristics(rng.normal(size=g) * 0.3, rng.normal(size=g) * 0.3)
            t1 = theta_eval(z, Om, ch, tol=1e-10)
            t2 = theta_eval(z, Om, ch, tol=1e-10, _radius_boost=2.0)
            assert abs(t2.value - t1.value) <= t1.tail_bound


class TestDeriv:
    def test_heat_equation_sweep(self):
        rng = np.random.default_rng(5)
        for g in (1, 2, 3):
            for _ in range(6):
                Om = random_period_matrix(rng, g)
                z = rng.normal(size=g) * 0.4 + 0.2j * rng.normal(size=g)
                ch = ThetaCharacteristics(rng.normal(size=g) * 0.4,
                                          rng.normal(size=g) * 0.4)
                a, b = rng.integers(0, g, size=2)
                lhs = theta_deriv(z, Om, ch, z_index=(a, b))
                rhs = 4j * np.pi * theta_deriv(z, Om, ch, omega_index=(a, b))
                assert abs(lhs - rhs) < 1e-10

    def test_dz_theta3_even(self):
        d = theta_deriv([0.0], [[1j]], z_index=(0,))
        assert abs(d) < 1e-13

    def test_odd_deriv_matches_finite_difference(self):
        # d/dz theta[1/2,1/2](z|i) at z=0 against an FD oracle on theta_eval
        ch = ThetaCharacteristics([0.5], [0.5])
        Om = [[1j]]
        f = lambda x: theta_eval([x], Om, ch, tol=1e-14).value
        h = 1e-4
        d1 = (f(h) - f(-h)) / (2 * h)
        d2 = (f(h / 2) - f(-h / 2)) / h
        fd = (4 * d2 - d1) / 3
        tw = theta_deriv([0.0], Om, ch, z_index=(0,))
        assert abs(fd - tw) < 1e-9

    def test_omega_deriv_matches_finite_difference(self):
        rng = np.random.default_rng(9)
        Om = random_period_matrix(rng, 2)
        z = np.array([0.07 - 0.02j, 0.11 + 0.03j])
        ch = ThetaCharacteristics([0.21, 0.05], [-0.14, 0.3])
        d = 1e-6
        E = np.zeros((2, 2))
        E[0, 1] = E[1, 0] = d
        fd = (theta_eval(z, Om + E, ch, tol=1e-14).value
              - theta_eval(z, Om - E, ch, tol=1e-14).value) / (2 * d)
        # symmetric perturbation hits both entries, hence the factor 2
        tw = 2 * theta_deriv(z, Om, ch, omega_index=(0, 1))
        assert abs(fd - tw) < 1e-8

    def test_order_cap(self):
        with pytest.raises(UnsupportedOrderError):
            theta_deriv([0.0], [[1j]], z_index=(0, 0, 0))
        with pytest.raises(UnsupportedOrderError):
            theta_deriv([0.0], [[1j]], z_index=(0,), omega_index=(0, 0))


@settings(max_examples=25, deadline=None)
@given(m1=st.integers(-2, 2), m2=st.integers(-2, 2),
       seed=st.integers(0, 2 ** 16))
def test_quasi_periodicity_property(m1, m2, seed):
    rng = np.random.default_rng(seed)
    Om = random_period_matrix(rng, 2)
    z = rng.normal(size=2) * 0.3 + 0.1j * rng.normal(size=2)
    ch = ThetaCharacteristics(rng.normal(size=2) * 0.4, rng.normal(size=2) * 0.4)
    m = np.array([m1, m2], dtype=float)
    tol = 1e-12
    lhs = theta_eval(z + m, Om, ch, tol=tol).value
    rhs = np.exp(2j * np.pi * (ch.p @ m)) * theta_eval(z, Om, ch, tol=tol).value
    assert abs(lhs - rhs) <= 10 * tol * max(1.0, abs(rhs))


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 16))
def test_parity_property(seed):
    rng = np.random.default_rng(seed)
    g = int(rng.integers(1, 4))
    Om = random_period_matrix(rng, g)
    z = rng.normal(size=g) * 0.4 + 0.2j * rng.normal(size=g)
    tol = 1e-12
    a = theta_eval(z, Om, tol=tol).value
    b = theta_eval(-z, Om, tol=tol).value
    assert abs(a - b) <= 10 * tol * max(1.0, abs(a))


class TestJacobi:
    def test_mu_one_fixed_point(self):
        jc = jacobi_constants(1.0)
        assert abs(jc.theta2 - jc.theta4) < 1e-13
        assert abs(jc.theta3 - THETA3_AT_I) < 1e-12
        assert abs(jc.theta2 - jc.theta3 / 2 ** 0.25) < 1e-12

    def test_jacobi_identity_mu2(self):
        jc = jacobi_constants(2.0)
        assert jc.jacobi_residual < 1e-12

    def test_dlog_matches_finite_difference(self):
        ch = ThetaCharacteristics([0.5], [0.0])
        f = lambda m: theta_eval([0.0], [[1j * m]], ch, tol=1e-14).value
        h = 1e-5
        fd = (f(1.3 + h) - f(1.3 - h)) / (2 * h) / f(1.3)
        jc = jacobi_constants(1.3)
        assert abs(fd - jc.dlog_theta2) < 1e-9

    def test_dmu_second_order(self):
        ch = ThetaCharacteristics([0.0], [0.5])
        f = lambda m: theta_eval([0.0], [[1j * m]], ch, tol=1e-14).value
        h = 1e-3
        d2 = lambda s: (f(1.1 + s) - 2 * f(1.1) + f(1.1 - s)) / s ** 2
        fd2 = (4 * d2(h / 2) - d2(h)) / 3
        tw = theta_dmu(0.0, 1.1, ch, order=2)
        assert abs(fd2 - tw) < 1e-7

    def test_mu_positive_required(self):
        with pytest.raises(DomainError):
            jacobi_constants(-1.0)
