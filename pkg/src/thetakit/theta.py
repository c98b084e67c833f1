"""Multidimensional theta functions with characteristics.

The series convention is

    theta[p, q](z | Omega) = sum over n in Z^g of
        exp{ pi*i <Omega (n+p), (n+p)> + 2*pi*i <z + q, n + p> }

for complex characteristic vectors p, q and a symmetric period matrix Omega
with positive-definite imaginary part. Sums are truncated to an ellipsoid
chosen from the Cholesky factor of Im(Omega) so that a certified Gaussian
tail bound falls below the requested tolerance.

Derivatives are evaluated termwise. The Omega-entry derivative treats
Omega_ab as an independent entry (no symmetrization), which makes the heat
equation

    d^2 theta / dz_a dz_b = 4*pi*i * d theta / d Omega_ab

hold termwise for every (a, b).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma, gammainccinv, gammaincc

from .errors import DomainError, TruncationError, UnsupportedOrderError

DEFAULT_TOL = 1e-12
RADIUS_CAP = 200.0


@dataclass(frozen=True)
class PeriodMatrix:
    """Symmetric g x g complex matrix with positive-definite imaginary part.

    The constructor symmetrizes its input (averaging with the transpose) and
    validates positivity of the imaginary part.
    """

    entries: np.ndarray

    def __init__(self, entries):
        m = np.atleast_2d(np.asarray(entries, dtype=complex))
        if m.shape[0] != m.shape[1]:
            raise DomainError(f"period matrix must be square, got {m.shape}")
        if np.max(np.abs(m - m.T)) > 1e-8 * max(1.0, np.max(np.abs(m))):
            raise DomainError("period matrix is not symmetric")
        m = 0.5 * (m + m.T)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)
        if self.imag_min_eig <= 0.0:
            raise DomainError("Im(Omega) is not positive definite")

    @property
    def g(self) -> int:
        return self.entries.shape[0]

    @property
    def imag_min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.entries.imag)[0])


@dataclass(frozen=True)
class ThetaCharacteristics:
    """Characteristic vectors p, q (arbitrary finite complex entries)."""

    p: np.ndarray
    q: np.ndarray

    def __init__(self, p, q):
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        if p.shape != q.shape or p.ndim != 1:
            raise DomainError("p and q must be vectors of equal length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise DomainError("characteristics must be finite")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def g(self) -> int:
        return self.p.shape[0]


@dataclass(frozen=True)
class ThetaValue:
    value: complex
    tail_bound: float


@dataclass(frozen=True)
class JacobiConstants:
    """Genus-one null theta constants at tau = i*mu and their log-mu-derivatives."""

    mu: float
    theta2: complex
    theta3: complex
    theta4: complex
    dlog_theta2: complex
    dlog_theta3: complex
    dlog_theta4: complex
    jacobi_residual: float = field(default=0.0)


def zero_chars(g: int) -> ThetaCharacteristics:
    return ThetaCharacteristics(np.zeros(g), np.zeros(g))


def _prepare(z, Omega, chars):
    if not isinstance(Omega, PeriodMatrix):
        Omega = PeriodMatrix(Omega)
    g = Omega.g
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (g,):
        raise DomainError(f"z must have length {g}, got shape {z.shape}")
    if chars is None:
        chars = zero_chars(g)
    elif not isinstance(chars, ThetaCharacteristics):
        chars = ThetaCharacteristics(*chars)
    if chars.g != g:
        raise DomainError("characteristic length does not match genus")
    return z, Omega, chars


def _tail_factor(g, rho, R, j):
    """Bound on sum over lattice points with |L n| > R of |L n|^j exp(-pi |L n|^2).

    Lattice-counting bound: the number of points in a shell of radius r grows
    at most like the volume of a shell fattened by the packing radius rho/2,
    which gives  (g/2) (2/rho)^g  pi^{-j/2} Gamma((g+j)/2, pi (R - rho/2)^2).
    """
    s = 0.5 * (g + j)
    x = np.pi * max(R - 0.5 * rho, 0.0) ** 2
    return (0.5 * g) * (2.0 / rho) ** g * np.pi ** (-0.5 * j) \
        * gammaincc(s, x) * gamma(s)


def _radius_for(g, rho, target, j):
    """Smallest shell radius with _tail_factor(g, rho, R, j) <= target."""
    s = 0.5 * (g + j)
    pref = (0.5 * g) * (2.0 / rho) ** g * np.pi ** (-0.5 * j) * gamma(s)
    qreg = min(1.0, target / pref)
    if qreg >= 1.0:
        return 0.5 * rho
    x = gammainccinv(s, qreg)
    return 0.5 * rho + np.sqrt(x / np.pi)


class _ThetaSum:
    """Truncated lattice sum for one (z, Omega, p, q) evaluation."""

    def __init__(self, z, Omega, chars, tol=DEFAULT_TOL, radius_cap=RADIUS_CAP,
                 deriv_order=0, radius_boost=1.0):
        if tol <= 0:
            raise DomainError("tol must be positive")
        z, Omega, chars = _prepare(z, Omega, chars)
        self.z, self.Omega, self.chars = z, Omega, chars
        g = Omega.g
        X, Y = Omega.entries.real, Omega.entries.imag
        L = np.linalg.cholesky(Y).T          # Y = L^T L
        self.Linv = np.linalg.inv(L)
        eigs = np.linalg.eigvalsh(Y)
        rho = float(np.sqrt(eigs[0]))        # lower bound on shortest lattice vector of L
        w = z + chars.q
        b = chars.p.imag
        c = X @ b + w.imag
        Yinv_c = np.linalg.solve(Y, c)
        # |term| = C' exp(-pi |L(n - n0)|^2)
        log_pref = np.pi * (c @ Yinv_c + b @ (Y @ b) - 2.0 * (w.real @ b))
        self.pref = float(np.exp(log_pref))
        self.center = -chars.p.real - Yinv_c
        self.shift_norm = float(np.linalg.norm(self.center + chars.p))

        # factor multiplying the scalar tail for derivative order j at radius R
        def deriv_envelope(R, j):
            if j == 0:
                return 1.0
            reach = np.linalg.norm(self.Linv, 2) * R + self.shift_norm
            return (2.0 * np.pi * 2.0 * max(reach, 1.0)) ** j

        target = tol / self.pref
        R = _radius_for(g, rho, target, deriv_order)
        for _ in range(60):
            env = deriv_envelope(R, deriv_order)
            R_new = _radius_for(g, rho, target / env, deriv_order)
            if R_new <= R + 1e-9:
                break
            R = R_new
        R = max(R, rho)
        if R > radius_cap:
            bound = self.pref * deriv_envelope(radius_cap, deriv_order) \
                * _tail_factor(g, rho, radius_cap, deriv_order)
            raise TruncationError(
                f"tolerance {tol:g} needs lattice radius {R:.1f} > cap {radius_cap:g}",
                achieved_bound=bound)
        R *= radius_boost
        self.radius = R
        self.tail_bound = float(
            self.pref * deriv_envelope(R, deriv_order) * _tail_factor(g, rho, R, deriv_order))

        # enumerate integer points in the ellipsoid |L(n - center)| <= R
        Yinv = np.linalg.inv(Y)
        widths = R * np.sqrt(np.diag(Yinv))
        axes = [np.arange(int(np.ceil(self.center[i] - widths[i] - 1e-9)),
                          int(np.floor(self.center[i] + widths[i] + 1e-9)) + 1)
                for i in range(g)]
        grids = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([a.ravel() for a in grids], axis=-1).astype(float)
        d = (pts - self.center) @ L.T
        keep = np.einsum("ij,ij->i", d, d) <= R * R + 1e-12
        self.n = pts[keep]
        if self.n.shape[0] == 0:
            self.n = np.round(self.center)[None, :]
        self.m = self.n + chars.p                       # summation index n + p
        quad = np.einsum("ij,nj,ni->n", Omega.entries, self.m, self.m)
        lin = self.m @ w
        self.terms = np.exp(1j * np.pi * quad + 2j * np.pi * lin)

    def sum(self, weights=None):
        if weights is None:
            return complex(self.terms.sum())
        return complex((weights * self.terms).sum())


def theta_eval(z, Omega, chars=None, tol=DEFAULT_TOL, radius_cap=RADIUS_CAP,
               _radius_boost=1.0) -> ThetaValue:
    """Evaluate theta[p,q](z | Omega) with a certified truncation bound.

    Raises DomainError if Im(Omega) is not positive definite and
    TruncationError (carrying the achieved bound) if `tol` would need a
    lattice radius beyond `radius_cap`.
    """
    s = _ThetaSum(z, Omega, chars, tol=tol, radius_cap=radius_cap,
                  radius_boost=_radius_boost)
    return ThetaValue(value=s.sum(), tail_bound=s.tail_bound)


def theta_deriv(z, Omega, chars=None, z_index=(), omega_index=None,
                tol=DEFAULT_TOL, radius_cap=RADIUS_CAP) -> complex:
    """Termwise derivative of the theta series.

    z_index: tuple of zero, one or two component indices for d/dz_a (d/dz_b).
    omega_index: optional pair (a, b) for the entry derivative d/dOmega_ab.
    Total order (|z_index| + 2 per Omega pair) must not exceed 2.
    """
    z_index = tuple(z_index)
    order = len(z_index) + (2 if omega_index is not None else 0)
    if order > 2:
        raise UnsupportedOrderError("theta derivatives supported up to total order 2")
    s = _ThetaSum(z, Omega, chars, tol=tol, radius_cap=radius_cap, deriv_order=order)
    w = np.ones(s.m.shape[0], dtype=complex)
    for a in z_index:
        w = w * (2j * np.pi * s.m[:, a])
    if omega_index is not None:
        a, b = omega_index
        w = w * (1j * np.pi * s.m[:, a] * s.m[:, b])
    return s.sum(w)


def theta_dmu(z, mu, chars=None, order=1, tol=DEFAULT_TOL) -> complex:
    """d^order/dmu^order of theta[p,q](z | i*mu) for genus one, termwise."""
    if order not in (1, 2):
        raise UnsupportedOrderError("mu-derivatives supported up to order 2")
    s = _ThetaSum(np.atleast_1d(z), np.array([[1j * mu]]), chars, tol=tol,
                  deriv_order=2 * order)
    msq = s.m[:, 0] ** 2
    w = (-np.pi * msq) ** order
    return s.sum(w)


def jacobi_constants(mu: float, tol=DEFAULT_TOL) -> JacobiConstants:
    """Null theta constants theta_2,3,4 at tau = i*mu with log-derivatives in mu.

    theta2 = theta[1/2, 0](0), theta3 = theta[0, 0](0), theta4 = theta[0, 1/2](0).
    Validates the quartic identity theta3^4 = theta2^4 + theta4^4.
    """
    if not (mu > 0):
        raise DomainError("mu must be positive")
    Om = np.array([[1j * mu]])
    z0 = np.zeros(1)
    chars = {
        2: ThetaCharacteristics([0.5], [0.0]),
        3: ThetaCharacteristics([0.0], [0.0]),
        4: ThetaCharacteristics([0.0], [0.5]),
    }
    vals = {}
    dlogs = {}
    for k, ch in chars.items():
        v = theta_eval(z0, Om, ch, tol=tol).value
        vals[k] = v
        dlogs[k] = theta_dmu(z0, mu, ch, order=1, tol=tol) / v
    resid = abs(vals[3] ** 4 - vals[2] ** 4 - vals[4] ** 4)
    if resid > 1e4 * tol * max(1.0, abs(vals[3]) ** 4):
        raise DomainError(f"Jacobi identity residual {resid:.2e} too large")
    return JacobiConstants(mu=float(mu),
                           theta2=vals[2], theta3=vals[3], theta4=vals[4],
                           dlog_theta2=dlogs[2], dlog_theta3=dlogs[3],
                           dlog_theta4=dlogs[4], jacobi_residual=float(resid))
