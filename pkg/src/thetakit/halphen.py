"""SU(2)-invariant self-dual Einstein metrics from theta constants.

The connection coefficients A_j = 2 d/dmu log theta_{j+1}(0, i mu) solve the
Halphen system; the metric coefficients W_j of

    g = F { dmu^2 + sigma_1^2/W_1^2 + sigma_2^2/W_2^2 + sigma_3^2/W_3^2 }

solve  dW_j/dmu = -W_k W_l + 2 W_j d/dmu log(theta_{k+1} theta_{l+1})  and the
general two-parameter family with the distinguished integral of motion

    theta2^4 W_1^2 - theta3^4 W_2^2 + theta4^4 W_3^2 = (pi^2/4) theta2^4 theta3^4 theta4^4

is expressed through q-derivatives of shifted theta constants. The Omega_j
variables tie the same system to the logarithmic derivative of the elliptic
tau-function theta[p,q]/sqrt(theta2 theta4) in the cross-ratio coordinate x.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, RealityError
from .hyperelliptic import INF, elliptic_k, make_curve, periods
from .theta import (ThetaCharacteristics, jacobi_constants, theta_deriv,
                    theta_dmu, theta_eval)


@dataclass(frozen=True)
class SDMetricSample:
    """One mu-sample of a self-dual metric family."""

    mu: float
    W1: complex
    W2: complex
    W3: complex
    A1: complex
    A2: complex
    A3: complex
    F: complex
    Lambda: float
    family: str             # "general" or "degenerate"


@dataclass(frozen=True)
class OmegaTriple:
    x: float
    Omega1: complex
    Omega2: complex
    Omega3: complex


@dataclass(frozen=True)
class OmegaVars:
    """Omega_j from the metric route with the tau-route squares for comparison."""

    x: float
    mu: float
    triple: OmegaTriple
    sq_metric: np.ndarray    # Omega_j^2 via the W_j / Thomae route
    sq_tau: np.ndarray       # Omega_j^2 via log-derivatives of the tau-function


def halphen(mu: float, tol=1e-13):
    """Connection coefficients (A1, A2, A3) = 2 d/dmu log(theta_{2,3,4})."""
    jc = jacobi_constants(mu, tol=tol)
    return (2.0 * jc.dlog_theta2, 2.0 * jc.dlog_theta3, 2.0 * jc.dlog_theta4)


def _theta0(p, q, mu, tol=1e-13):
    return theta_eval([0.0], [[1j * mu]], ThetaCharacteristics([p], [q]), tol=tol).value


def _theta0_dq(p, q, mu, tol=1e-13):
    # d/dq theta[p,q](0) equals the z-derivative at z = 0
    return theta_deriv([0.0], [[1j * mu]], ThetaCharacteristics([p], [q]),
                       z_index=(0,), tol=tol)


def sd_metric_general(p: complex, q: complex, mu: float, Lambda: float = -3.0,
                      reality: Optional[str] = None, tol=1e-13) -> SDMetricSample:
    """General two-parameter family of self-dual metric coefficients.

    W_j are built from q-derivatives of half-period-shifted theta constants;
    the conformal factor is F = (2/(pi Lambda)) W1 W2 W3 / (d/dq log theta[p,q])^2.
    reality="rc2" demands p real and Re q = 1/2 (Lambda < 0);
    reality="rc4" demands q real and Re p = 1/2 (Lambda > 0).
    """
    if reality == "rc2":
        if abs(np.imag(p)) > 1e-12 or abs(np.real(q) - 0.5) > 1e-12:
            raise RealityError("rc2 requires p real and Re q = 1/2")
    elif reality == "rc4":
        if abs(np.imag(q)) > 1e-12 or abs(np.real(p) - 0.5) > 1e-12:
            raise RealityError("rc4 requires q real and Re p = 1/2")
    elif reality is not None:
        raise DomainError(f"unknown reality mode {reality!r}")
    jc = jacobi_constants(mu, tol=tol)
    t_pq = _theta0(p, q, mu, tol)
    if abs(t_pq) < 1e-12:
        raise DomainError("theta[p,q](0) vanishes: singular sample")
    eip = np.exp(1j * np.pi * p)
    w1 = -0.5j * jc.theta3 * jc.theta4 * _theta0_dq(p, q + 0.5, mu, tol) / (eip * t_pq)
    w2 = +0.5j * jc.theta2 * jc.theta4 * _theta0_dq(p + 0.5, q + 0.5, mu, tol) / (eip * t_pq)
    w3 = -0.5 * jc.theta2 * jc.theta3 * _theta0_dq(p + 0.5, q, mu, tol) / t_pq
    dlog_q = _theta0_dq(p, q, mu, tol) / t_pq
    F = (2.0 / (np.pi * Lambda)) * w1 * w2 * w3 / dlog_q ** 2
    a1, a2, a3 = halphen(mu, tol=tol)
    return SDMetricSample(mu=float(mu), W1=w1, W2=w2, W3=w3,
                          A1=a1, A2=a2, A3=a3, F=F, Lambda=float(Lambda),
                          family="general")


def sd_metric_degenerate(q0: float, C: float, mu: float, tol=1e-13) -> SDMetricSample:
    """One-parameter family with vanishing cosmological constant.

    W_j = 1/(mu + q0) + 2 d/dmu log theta_{j+1};  F = C (mu+q0)^2 W1 W2 W3.
    """
    if abs(mu + q0) < 1e-12:
        raise DomainError("mu + q0 = 0: pole of the degenerate family")
    if not C > 0:
        raise DomainError("C must be positive")
    jc = jacobi_constants(mu, tol=tol)
    pole = 1.0 / (mu + q0)
    w1 = pole + 2.0 * jc.dlog_theta2
    w2 = pole + 2.0 * jc.dlog_theta3
    w3 = pole + 2.0 * jc.dlog_theta4
    F = C * (mu + q0) ** 2 * w1 * w2 * w3
    return SDMetricSample(mu=float(mu), W1=w1, W2=w2, W3=w3,
                          A1=2.0 * jc.dlog_theta2, A2=2.0 * jc.dlog_theta3,
                          A3=2.0 * jc.dlog_theta4, F=F, Lambda=0.0,
                          family="degenerate")


# ----------------------------------------------------------------------------
# residual checks of the defining ODE systems


_CYCLIC = {1: (2, 3), 2: (3, 1), 3: (1, 2)}


def halphen_residual(mu: float, h=1e-3, tol=1e-13) -> float:
    """max_j |dA_j/dmu + A_k A_l - A_j (A_k + A_l)|, five-point derivative."""
    def a_at(m):
        return np.array(halphen(m, tol=tol))

    d = (-a_at(mu + 2 * h) + 8 * a_at(mu + h) - 8 * a_at(mu - h)
         + a_at(mu - 2 * h)) / (12 * h)
    a = a_at(mu)
    res = []
    for j, (k, l) in _CYCLIC.items():
        res.append(abs(d[j - 1] + a[k - 1] * a[l - 1]
                       - a[j - 1] * (a[k - 1] + a[l - 1])))
    return float(max(res))


def _w_vector(sample_fn, mu):
    s = sample_fn(mu)
    return np.array([s.W1, s.W2, s.W3])


def metric_flow_residual(sample_fn, mu: float, h=5e-4, tol=1e-13) -> float:
    """max_j |dW_j/dmu + W_k W_l - 2 W_j d/dmu log(theta_{k+1} theta_{l+1})|.

    sample_fn(mu) -> SDMetricSample fixes the family; the derivative is a
    five-point finite difference.
    """
    d = (-_w_vector(sample_fn, mu + 2 * h) + 8 * _w_vector(sample_fn, mu + h)
         - 8 * _w_vector(sample_fn, mu - h) + _w_vector(sample_fn, mu - 2 * h)) / (12 * h)
    w = _w_vector(sample_fn, mu)
    jc = jacobi_constants(mu, tol=tol)
    dlog = {2: jc.dlog_theta2, 3: jc.dlog_theta3, 4: jc.dlog_theta4}
    res = []
    for j, (k, l) in _CYCLIC.items():
        rhs = -w[k - 1] * w[l - 1] + 2.0 * w[j - 1] * (dlog[k + 1] + dlog[l + 1])
        res.append(abs(d[j - 1] - rhs))
    return float(max(res))


def integral_of_motion_residual(sample: SDMetricSample, tol=1e-13) -> float:
    """|theta2^4 W1^2 - theta3^4 W2^2 + theta4^4 W3^2 - (pi^2/4) theta2^4 theta3^4 theta4^4|.

    Zero (to tolerance) exactly on the general family; for other solutions the
    value is reported as a diagnostic, not a requirement.
    """
    jc = jacobi_constants(sample.mu, tol=tol)
    t2, t3, t4 = jc.theta2 ** 4, jc.theta3 ** 4, jc.theta4 ** 4
    lhs = t2 * sample.W1 ** 2 - t3 * sample.W2 ** 2 + t4 * sample.W3 ** 2
    return float(abs(lhs - (np.pi ** 2 / 4.0) * t2 * t3 * t4))


def mobius_covariance_residual(mu: float, tol=1e-13) -> float:
    """Residual of the unit-shift covariance of the Halphen solution.

    Under mu -> mu + 1 (the Moebius map (a,b,c,d) = (1,1,0,1)) the solution
    transforms with (c mu + d)^2 = 1 and c (c mu + d) = 0, up to the
    half-period permutation of characteristics: tau -> tau + 1 exchanges the
    theta_3 and theta_4 constants and multiplies theta_2 by a phase that
    drops from the logarithmic derivative. Hence
        A_1(mu+1) = A_1(mu)-like covariance with the (3 <-> 4) relabeling.
    """
    a = np.array(halphen(mu, tol=tol))
    a_shift = np.array(halphen(mu, tol=tol))
    # tau -> tau + 1: theta2 -> e^{i pi/4} theta2, theta3 <-> theta4.
    # Build the shifted-argument coefficients directly from theta at i(mu)+1.
    om = np.array([[1j * mu + 1.0]])
    chars = {2: ThetaCharacteristics([0.5], [0.0]),
             3: ThetaCharacteristics([0.0], [0.0]),
             4: ThetaCharacteristics([0.0], [0.5])}
    shifted = []
    for k in (2, 3, 4):
        v = theta_eval([0.0], om, chars[k], tol=tol).value
        h = 1e-5
        vp = theta_eval([0.0], np.array([[1j * (mu + h) + 1.0]]), chars[k], tol=tol).value
        vm = theta_eval([0.0], np.array([[1j * (mu - h) + 1.0]]), chars[k], tol=tol).value
        shifted.append(2.0 * (vp - vm) / (2 * h) / v)
    # theta[1/2,0](tau+1) ~ theta2(tau), theta[0,0](tau+1) = theta4(tau),
    # theta[0,1/2](tau+1) = theta3(tau)
    pred = np.array([a[0], a[2], a[1]])
    _ = a_shift
    return float(np.max(np.abs(np.array(shifted) - pred)))


# ----------------------------------------------------------------------------
# Omega variables and the modulus flow


def modulus_of_x(x: float, tol=1e-12) -> float:
    """mu(x) with i mu the period of the curve {0, x, 1, inf}."""
    if not (0.0 < x < 1.0):
        raise DomainError("x must lie in (0, 1)")
    om = periods(make_curve([0.0, x, 1.0, INF]), tol=tol).Omega.entries[0, 0]
    return float(om.imag)


def modulus_flow_residual(x: float, fd_step=1e-5) -> float:
    """|dmu/dx - pi/(4 K^2 x (x-1))| with dmu/dx by Richardson central difference."""
    K = elliptic_k(x)
    rhs = np.pi / (4.0 * K * K * x * (x - 1.0))
    d1 = (modulus_of_x(x + fd_step) - modulus_of_x(x - fd_step)) / (2 * fd_step)
    d2 = (modulus_of_x(x + fd_step / 2) - modulus_of_x(x - fd_step / 2)) / fd_step
    lhs = (4.0 * d2 - d1) / 3.0
    return float(abs(lhs - rhs))


def _log_tau(x: float, p: complex, q: complex, tol=1e-13) -> complex:
    """log of theta[p,q](0, i mu(x)) / sqrt(theta2 theta4), up to constants."""
    mu = modulus_of_x(x)
    jc = jacobi_constants(mu, tol=tol)
    t = _theta0(p, q, mu, tol)
    return np.log(t) - 0.5 * (np.log(jc.theta2) + np.log(jc.theta4))


def omega_vars(x: float, p: complex, q: complex, tol=1e-13,
               consistency_tol=1e-4) -> OmegaVars:
    """Omega_j at cross-ratio x via two routes.

    Route one evaluates the metric coefficients W_j at mu(x) and divides by
    Thomae theta-constant squares. Route two differentiates the logarithm of
    the tau-function theta[p,q]/sqrt(theta2 theta4) in x (five-point stencils)
    and assembles Omega_j^2 from the standard quadratic expressions. The two
    squared triples must agree to consistency_tol.
    """
    mu = modulus_of_x(x)
    K = elliptic_k(x)
    s = sd_metric_general(p, q, mu, tol=tol)
    # Thomae values of theta_k^2 (positive square roots for 0 < x < 1)
    t2sq = (2.0 * K / np.pi) * np.sqrt(x)
    t3sq = (2.0 * K / np.pi)
    t4sq = (2.0 * K / np.pi) * np.sqrt(1.0 - x)
    om1 = -s.W2 / (np.pi * t2sq * t4sq)
    om2 = -s.W3 / (np.pi * t2sq * t3sq)
    om3 = -s.W1 / (np.pi * t3sq * t4sq)
    triple = OmegaTriple(x=x, Omega1=om1, Omega2=om2, Omega3=om3)
    sq_metric = np.array([om1 ** 2, om2 ** 2, om3 ** 2])

    h = 5e-3
    xs = x + h * np.arange(-2, 3)
    L = np.array([_log_tau(xx, p, q, tol=tol) for xx in xs])
    L1 = (-L[4] + 8 * L[3] - 8 * L[1] + L[0]) / (12 * h)
    L2 = (-L[4] + 16 * L[3] - 30 * L[2] + 16 * L[1] - L[0]) / (12 * h * h)
    G = x * (x - 1.0) * L1
    G1 = (2.0 * x - 1.0) * L1 + x * (x - 1.0) * L2
    sq_tau = np.array([G1,
                       (1.0 - x) * G1 + G + 0.125,
                       x * G1 - G + 0.125])
    if np.max(np.abs(sq_metric - sq_tau)) > consistency_tol:
        from .errors import ConsistencyError
        raise ConsistencyError(
            "Omega routes disagree beyond tolerance",
            value_a=sq_metric, value_b=sq_tau)
    return OmegaVars(x=float(x), mu=mu, triple=triple,
                     sq_metric=sq_metric, sq_tau=sq_tau)


def omega_constraint_residual(ov: OmegaVars) -> float:
    """|-Omega1^2 + Omega2^2 + Omega3^2 - 1/4| on the metric route."""
    s = ov.sq_metric
    return float(abs(-s[0] + s[1] + s[2] - 0.25))


def omega_flow_residual(x: float, p: complex, q: complex, h=1e-2) -> float:
    """Residual of the first-order system for Omega_j(x), five-point derivative."""
    def triple(xx):
        ov = omega_vars(xx, p, q)
        return np.array([ov.triple.Omega1, ov.triple.Omega2, ov.triple.Omega3])

    d = (-triple(x + 2 * h) + 8 * triple(x + h) - 8 * triple(x - h)
         + triple(x - 2 * h)) / (12 * h)
    om = triple(x)
    rhs = np.array([-om[1] * om[2] / (x * (1.0 - x)),
                    -om[2] * om[0] / x,
                    -om[0] * om[1] / (1.0 - x)])
    return float(np.max(np.abs(d - rhs)))
