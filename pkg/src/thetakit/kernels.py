"""Genus-one kernels on the torus C/(Z + tau Z) in the flat coordinate frame.

Every kernel is reported as the scalar coefficient in the flat frame dz:
half-differentials and bidifferentials carry implicit sqrt(dz)/dz factors
that the caller is responsible for converting. The building blocks are

    E(x, y)    prime form      theta[1/2,1/2](x-y) / theta'[1/2,1/2](0)
    B(x, y)    bidifferential  d_x d_y log E(x, y)
    S_pq(x,y)  Szego kernel    theta[p,q](x-y) / (theta[p,q](0) E(x, y))

together with the v-regularized diagonal of B and its ratio Q_v, the Fay
determinant identity at n = 2, and the variational formulas for S_pq in the
characteristics (checked against cycle quadrature).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, QuadratureError, SingularityError
from .numerics import adaptive_segment, gl_segment, polyline_clearance
from .theta import ThetaCharacteristics, theta_deriv, theta_eval

_ODD = ThetaCharacteristics([0.5], [0.5])
_TOL = 1e-13


@dataclass(frozen=True)
class TorusPoint:
    """A point on C/(Z + tau Z), reduced to the fundamental parallelogram."""

    z: complex
    tau: complex

    def __init__(self, z, tau):
        tau = complex(tau)
        if tau.imag <= 0:
            raise DomainError("tau must have positive imaginary part")
        z = complex(z)
        n2 = np.floor(z.imag / tau.imag)
        z = z - n2 * tau
        z = z - np.floor(z.real - (z.imag / tau.imag) * tau.real)
        object.__setattr__(self, "z", complex(z))
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class KernelValue:
    value: complex
    coincident: bool = False


def _same_tau(x: TorusPoint, y: TorusPoint) -> complex:
    if x.tau != y.tau:
        raise DomainError("points live on different tori")
    return x.tau


def lattice_reduce(z, tau):
    """Representative of z modulo Z + tau Z closest to the origin cell."""
    n2 = round(z.imag / tau.imag)
    z = z - n2 * tau
    z = z - round(z.real)
    return z


def is_lattice_point(z, tau, tol=1e-12):
    return abs(lattice_reduce(z, tau)) < tol


def _omega(tau):
    return np.array([[tau]], dtype=complex)


def theta1(z, tau, tol=_TOL):
    """theta[1/2,1/2](z | tau) (the odd theta, up to sign convention)."""
    return theta_eval([z], _omega(tau), _ODD, tol=tol).value


def theta1_prime(tau, tol=_TOL):
    return theta_deriv([0.0], _omega(tau), _ODD, z_index=(0,), tol=tol)


def prime_form(x: TorusPoint, y: TorusPoint) -> KernelValue:
    """Prime form E(x, y) in the flat frame; zero with a flag at coincident points."""
    tau = _same_tau(x, y)
    d = x.z - y.z
    if is_lattice_point(d, tau):
        return KernelValue(0.0, coincident=True)
    return KernelValue(theta1(d, tau) / theta1_prime(tau))


def _log_theta1_dd(z, tau, tol=_TOL):
    """(log theta1)''(z)."""
    om = _omega(tau)
    t0 = theta_eval([z], om, _ODD, tol=tol).value
    t1 = theta_deriv([z], om, _ODD, z_index=(0,), tol=tol)
    t2 = theta_deriv([z], om, _ODD, z_index=(0, 0), tol=tol)
    return t2 / t0 - (t1 / t0) ** 2


def bergman_b(x: TorusPoint, y: TorusPoint) -> KernelValue:
    """Canonical bidifferential B(x, y) = d_x d_y log E, flat-frame coefficient."""
    tau = _same_tau(x, y)
    d = x.z - y.z
    if is_lattice_point(d, tau):
        raise SingularityError("B(x, y) has a double pole at coincident points")
    return KernelValue(-_log_theta1_dd(d, tau))


def bergman_sb(tau) -> complex:
    """Constant S_B of the flat frame: B(d) = 1/d^2 + S_B/6 + O(d^2).

    From the odd theta expansion, S_B/6 = -theta1'''(0)/(3 theta1'(0)).
    """
    om = _omega(tau)
    t1 = theta_deriv([0.0], om, _ODD, z_index=(0,))
    # third derivative termwise: not exposed by theta_deriv (order cap 2);
    # use the heat equation: theta1''' (0) = 4*pi*i d/dOmega theta1'(0),
    # evaluated by a central difference in Omega of theta'.
    h = 1e-5
    def tp(t):
        return theta_deriv([0.0], _omega(t), _ODD, z_index=(0,), tol=1e-14)
    t3 = 4j * np.pi * (tp(tau + h) - tp(tau - h)) / (2 * h)
    return -2.0 * t3 / t1


@dataclass(frozen=True)
class VSpec:
    """Regularizing abelian differential, as a scalar coefficient v(z) in dz.

    `antiderivative` is optional; when absent, int_x^y v is computed by
    Gauss-Legendre quadrature on the (short) straight segment.
    """

    v: Callable[[np.ndarray], np.ndarray]
    antiderivative: Optional[Callable[[complex], complex]] = None
    name: str = "v"

    def integral(self, a, b):
        if self.antiderivative is not None:
            return self.antiderivative(b) - self.antiderivative(a)
        return gl_segment(self.v, a, b, n=16)


def flat_vspec():
    return VSpec(v=lambda z: np.ones_like(z), antiderivative=lambda z: z, name="dz")


def bergman_reg(x: TorusPoint, v_spec: VSpec, step=8e-3) -> KernelValue:
    """Diagonal regularization B_reg(x,x) = [B(x,y) - v(x)v(y)/(int_y^x v)^2]_{y=x}.

    Fourth-order symmetric differencing in (x - y) with one Richardson step.
    The step cannot be taken much smaller: the bracket subtracts two 1/step^2
    quantities, so theta rounding noise is amplified by step^{-2}.
    """
    tau = x.tau
    vx = complex(v_spec.v(np.array([x.z]))[0])
    if abs(vx) < 1e-10:
        raise SingularityError("regularizer vanishes at x; use residue extraction")

    def bracket(delta):
        y = x.z + delta
        b = -_log_theta1_dd(delta, tau, tol=1e-16)
        vy = complex(v_spec.v(np.array([y]))[0])
        integral = v_spec.integral(x.z, y)
        return b - vx * vy / integral ** 2

    def sym(h):
        return 0.5 * (bracket(h) + bracket(-h))

    f1 = sym(step)
    f2 = sym(step / 2)
    return KernelValue((4.0 * f2 - f1) / 3.0)


def q_v(x: TorusPoint, v_spec: VSpec, step=8e-3) -> complex:
    """Q_v = B_reg(x,x) / v(x)."""
    vx = complex(v_spec.v(np.array([x.z]))[0])
    return bergman_reg(x, v_spec, step=step).value / vx


def q_v_schwarzian(x: TorusPoint, v_spec: VSpec, step=1e-4) -> complex:
    """Q_v via (S_B - S_v) / (6 v) with the Schwarzian S_v from finite differences.

    S_v = v''/v - (3/2)(v'/v)^2 in the flat coordinate; derivatives of v are
    central finite differences, independent of the diagonal-limit route.
    """
    z = x.z
    v = lambda t: complex(v_spec.v(np.array([t]))[0])
    v0 = v(z)
    if abs(v0) < 1e-10:
        raise SingularityError("regularizer vanishes at x")
    vp = (v(z + step) - v(z - step)) / (2 * step)
    vpp = (v(z + step) - 2 * v0 + v(z - step)) / step ** 2
    s_v = vpp / v0 - 1.5 * (vp / v0) ** 2
    return (bergman_sb(x.tau) - s_v) / (6.0 * v0)


def szego(x: TorusPoint, y: TorusPoint, chars: ThetaCharacteristics) -> KernelValue:
    """Szego kernel S_pq(x, y), flat frame. Requires theta[p,q](0) != 0."""
    tau = _same_tau(x, y)
    om = _omega(tau)
    t0 = theta_eval([0.0], om, chars).value
    if abs(t0) <= 1e-12:
        raise DomainError("theta[p,q](0) vanishes: degenerate characteristics")
    d = x.z - y.z
    E = prime_form(x, y)
    if E.coincident:
        raise SingularityError("Szego kernel has a pole at coincident points")
    num = theta_eval([d], om, chars).value
    return KernelValue(num / (t0 * E.value))


def szego_a0(x: TorusPoint, chars: ThetaCharacteristics) -> complex:
    """Constant term a_0 of the Szego kernel on the diagonal: d log theta[p,q](0)."""
    om = _omega(x.tau)
    t0 = theta_eval([0.0], om, chars).value
    t1 = theta_deriv([0.0], om, chars, z_index=(0,))
    return t1 / t0


def ssb_residual(x: TorusPoint, y: TorusPoint, chars: ThetaCharacteristics) -> float:
    """|S(x,y)S(y,x) + B(x,y) + (log theta[p,q])''(0)| (flat frame)."""
    om = _omega(x.tau)
    t0 = theta_eval([0.0], om, chars).value
    t1 = theta_deriv([0.0], om, chars, z_index=(0,))
    t2 = theta_deriv([0.0], om, chars, z_index=(0, 0))
    ddlog = t2 / t0 - (t1 / t0) ** 2
    s1 = szego(x, y, chars).value
    s2 = szego(y, x, chars).value
    b = bergman_b(x, y).value
    return abs(s1 * s2 + b + ddlog)


def fay_residual(x1, x2, y1, y2, chars: ThetaCharacteristics) -> float:
    """Residual of the n=2 determinant identity for the Szego kernel."""
    pts = [x1, x2, y1, y2]
    tau = pts[0].tau
    for a in range(4):
        for b in range(a + 1, 4):
            _same_tau(pts[a], pts[b])
            if is_lattice_point(pts[a].z - pts[b].z, tau):
                raise SingularityError("points must be pairwise distinct mod lattice")
    om = _omega(tau)
    S = lambda a, b: szego(a, b, chars).value
    det = S(x1, y1) * S(x2, y2) - S(x1, y2) * S(x2, y1)
    t0 = theta_eval([0.0], om, chars).value
    tsum = theta_eval([x1.z + x2.z - y1.z - y2.z], om, chars).value
    E = lambda a, b: prime_form(a, b).value
    rhs = (tsum / t0) * E(x1, x2) * E(y2, y1) / (
        E(x1, y1) * E(x1, y2) * E(x2, y1) * E(x2, y2))
    return abs(det - rhs)


def _cycle_path(tau, direction, base_shift, n_try=12, clearance=1e-3, avoid=()):
    """A straight cycle representative t0 + s*direction, s in [0,1], avoiding poles.

    Candidates shift the base point across the transverse direction; the first
    with clearance above the threshold (to all lattice translates of the
    avoided points) wins.
    """
    transverse = 1.0 if direction == tau else tau
    shifts = np.linspace(0.07, 0.93, n_try)
    best = None
    best_clear = -1.0
    for s in shifts:
        t0 = base_shift + s * transverse
        ends = [t0, t0 + direction]
        translates = []
        for p in avoid:
            for m in range(-2, 3):
                for n in range(-2, 3):
                    translates.append(p + m + n * tau)
        c = polyline_clearance(ends, translates) if translates else np.inf
        if c > best_clear:
            best_clear = c
            best = t0
        if c > 10 * clearance:
            return t0, c
    if best_clear < clearance:
        raise QuadratureError(
            f"no cycle representative clears the poles (best {best_clear:.2e})")
    return best, best_clear


def szego_cycle_integral(x: TorusPoint, y: TorusPoint, chars, cycle="a",
                         tol=1e-11) -> complex:
    """∮ S(x,t) S(t,y) dt along the a-cycle [0,1) or the b-cycle [0,tau)."""
    tau = _same_tau(x, y)
    direction = 1.0 if cycle == "a" else tau
    t0, _ = _cycle_path(tau, direction, 0.0, avoid=(x.z, y.z))

    def integrand(ts):
        out = np.empty(ts.shape, dtype=complex)
        for i, t in enumerate(ts):
            tp = TorusPoint(t, tau)
            out[i] = szego(x, tp, chars).value * szego(tp, y, chars).value
        return out

    return adaptive_segment(integrand, t0, t0 + direction, tol=tol)


def szego_char_variation_residual(x: TorusPoint, y: TorusPoint,
                                  chars: ThetaCharacteristics, direction="p",
                                  fd_step=1e-5) -> float:
    """|dS/dp + ∮_b S S| (direction "p") or |dS/dq + ∮_a S S| (direction "q").

    The left side is a central finite difference in the characteristic with
    one Richardson step; the right side is adaptive quadrature along the
    corresponding cycle.
    """
    if direction not in ("p", "q"):
        raise DomainError("direction must be 'p' or 'q'")

    def s_at(eps):
        if direction == "p":
            ch = ThetaCharacteristics(chars.p + eps, chars.q)
        else:
            ch = ThetaCharacteristics(chars.p, chars.q + eps)
        return szego(x, y, ch).value

    d1 = (s_at(fd_step) - s_at(-fd_step)) / (2 * fd_step)
    d2 = (s_at(fd_step / 2) - s_at(-fd_step / 2)) / fd_step
    lhs = (4 * d2 - d1) / 3
    cyc = "b" if direction == "p" else "a"
    rhs = szego_cycle_integral(x, y, chars, cycle=cyc)
    return abs(lhs + rhs)
