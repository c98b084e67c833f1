"""Theta-functional solutions of the Ernst equation.

A field sample at (rho, z) lives on the moving hyperelliptic curve

    y^2 = (w - xi)(w - conj(xi)) prod_j (w - w_j),        xi = z + i rho,

with fixed (real or conjugate-paired) branch points w_j. The potential is

    E = Theta[p,q](A(inf^1) - A(xi)) / Theta[p,q](A(inf^2) - A(xi))

and the conformal factor is the theta-constant ratio
Theta[p,q](0) Theta[p,q](e/2) / (Theta(0) Theta(e/2)), e = (1, .., 1).
The metric functions f, k, F are recovered pointwise and by path-ordered
quadrature of the first-order system in xi.

Path conventions are pinned once per grid: branch points are ordered by real
part with the moving pair (conj(xi), xi) inserted in the middle, cuts join
consecutive points, and all Abel-map paths start at the leftmost fixed branch
point. Every convention varies smoothly with xi, which is what makes grid
finite differences of E meaningful.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .hyperelliptic import INF_SHEET_1, INF_SHEET_2, abel_map, make_curve, periods
from .theta import ThetaCharacteristics, theta_eval


@dataclass(frozen=True)
class GridSpec:
    rho_min: float
    rho_max: float
    z_min: float
    z_max: float
    h: float

    def __post_init__(self):
        if not (0.0 < self.rho_min < self.rho_max):
            raise DomainError("need 0 < rho_min < rho_max")
        if not (self.z_min < self.z_max):
            raise DomainError("need z_min < z_max")
        if not (0.0 < self.h <= 0.25):
            raise DomainError("grid spacing out of range")

    @property
    def rho(self):
        n = int(round((self.rho_max - self.rho_min) / self.h))
        return self.rho_min + self.h * np.arange(n + 1)

    @property
    def z(self):
        n = int(round((self.z_max - self.z_min) / self.h))
        return self.z_min + self.h * np.arange(n + 1)


@dataclass(frozen=True)
class ErnstConfig:
    """Fixed branch points, characteristics, and the evaluation grid."""

    w: tuple
    p: np.ndarray
    q: np.ndarray
    grid: GridSpec

    def __init__(self, w, p, q, grid):
        w = tuple(complex(x) for x in w)
        if len(w) % 2 != 0 or not w:
            raise DomainError("need 2g fixed branch points")
        g = len(w) // 2
        p = np.atleast_1d(np.asarray(p, dtype=complex))
        q = np.atleast_1d(np.asarray(q, dtype=complex))
        if p.shape != (g,) or q.shape != (g,):
            raise DomainError(f"p, q must be vectors of length g = {g}")
        for wj in w:
            dz = abs(grid_clip(wj.real, grid.z_min, grid.z_max) - wj.real)
            drho = abs(grid_clip(wj.imag, grid.rho_min, grid.rho_max) - wj.imag)
            if max(dz, drho) < 3 * grid.h:
                raise DomainError(
                    f"grid approaches the projection of branch point {wj}")
        p.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "grid", grid)

    @property
    def genus(self) -> int:
        return len(self.w) // 2


def grid_clip(v, lo, hi):
    return min(max(v, lo), hi)


@dataclass
class ErnstField:
    """Potential samples on the grid, indexed [i_z, i_rho]."""

    config: Optional[ErnstConfig]
    rho: np.ndarray
    z: np.ndarray
    values: np.ndarray
    residuals: Optional[np.ndarray] = None


@dataclass(frozen=True)
class MetricSlice:
    f: np.ndarray
    k: np.ndarray
    F_rot: np.ndarray


def _moving_curve(config: ErnstConfig, xi: complex):
    """Branch points ordered by real part with (conj xi, xi) in the middle."""
    if xi.imag <= 0:
        raise DomainError("xi must lie in the upper half plane")
    fixed = sorted(config.w, key=lambda t: (t.real, t.imag))
    pts = [t for t in fixed if t.real < xi.real]
    pts += [np.conj(xi), xi]
    pts += [t for t in fixed if t.real >= xi.real]
    return make_curve(pts), pts.index(xi)


def ernst_potential(config: ErnstConfig, xi: complex, tol=1e-13) -> complex:
    """Theta-quotient Ernst potential at xi = z + i rho.

    The arguments are the images of the two points over infinity minus the
    image of the moving branch point, in the representative

        u_j = A(inf^j) - 2 A(xi)    (j = 1, 2).

    A(xi) is an exact half period, so u_j is A(inf^j) - A(xi) translated by
    the half period -A(xi); this is the lattice representative for which the
    theta quotient satisfies the field equation under the pinned path family
    (any other translate multiplies the quotient by a nonconstant automorphy
    factor in (rho, z) and breaks it).
    """
    curve, xi_idx = _moving_curve(config, complex(xi))
    pd = periods(curve, tol=tol)
    om = pd.Omega.entries
    a_inf1 = abel_map(curve, INF_SHEET_1, pd=pd)
    a_inf2 = abel_map(curve, INF_SHEET_2, pd=pd)
    a_xi = abel_map(curve, curve.finite_points[xi_idx], pd=pd)
    chars = ThetaCharacteristics(config.p, config.q)
    num = theta_eval(a_inf1 - 2.0 * a_xi, om, chars, tol=tol).value
    den = theta_eval(a_inf2 - 2.0 * a_xi, om, chars, tol=tol).value
    if abs(den) < 1e-12:
        raise DomainError("denominator theta vanishes (theta divisor)")
    return num / den


def conformal_factor(config: ErnstConfig, xi: complex, tol=1e-13) -> complex:
    """exp(2k) = Theta[p,q](0) Theta[p,q](e/2) / (Theta(0) Theta(e/2))."""
    curve, _ = _moving_curve(config, complex(xi))
    pd = periods(curve, tol=tol)
    om = pd.Omega.entries
    g = curve.genus
    chars = ThetaCharacteristics(config.p, config.q)
    zero = ThetaCharacteristics(np.zeros(g), np.zeros(g))
    e_half = 0.5 * np.ones(g)
    vals = [theta_eval(np.zeros(g), om, chars, tol=tol).value,
            theta_eval(e_half, om, chars, tol=tol).value,
            theta_eval(np.zeros(g), om, zero, tol=tol).value,
            theta_eval(e_half, om, zero, tol=tol).value]
    if min(abs(vals[2]), abs(vals[3])) < 1e-12:
        raise DomainError("denominator theta constant vanishes")
    return vals[0] * vals[1] / (vals[2] * vals[3])


def ernst_field(config: ErnstConfig, tol=1e-13,
                progress: Optional[Callable[[int, int], None]] = None) -> ErnstField:
    """Evaluate the potential over the whole grid (rows indexed by z)."""
    rho = config.grid.rho
    zz = config.grid.z
    vals = np.empty((len(zz), len(rho)), dtype=complex)
    total = len(zz) * len(rho)
    done = 0
    for i, z in enumerate(zz):
        for j, r in enumerate(rho):
            vals[i, j] = ernst_potential(config, complex(z, r), tol=tol)
            done += 1
            if progress is not None and done % 512 == 0:
                progress(done, total)
    return ErnstField(config=config, rho=rho, z=zz, values=vals)


def field_from_function(fn, grid: GridSpec) -> ErnstField:
    """Sample an arbitrary potential fn(rho, z) on the grid (for oracles)."""
    rho = grid.rho
    zz = grid.z
    vals = np.empty((len(zz), len(rho)), dtype=complex)
    for i, z in enumerate(zz):
        vals[i, :] = np.array([fn(r, z) for r in rho], dtype=complex)
    return ErnstField(config=None, rho=rho, z=zz, values=vals)


def _derivatives(field: ErnstField):
    """Second-order central stencils; returns interior-view arrays."""
    E = field.values
    if E.shape[0] < 3 or E.shape[1] < 3:
        raise DomainError("grid too small for interior stencils")
    h = field.rho[1] - field.rho[0]
    Ez = (E[2:, 1:-1] - E[:-2, 1:-1]) / (2 * h)
    Er = (E[1:-1, 2:] - E[1:-1, :-2]) / (2 * h)
    Ezz = (E[2:, 1:-1] - 2 * E[1:-1, 1:-1] + E[:-2, 1:-1]) / h ** 2
    Err = (E[1:-1, 2:] - 2 * E[1:-1, 1:-1] + E[1:-1, :-2]) / h ** 2
    return Ez, Er, Ezz, Err


def ernst_residual(field: ErnstField) -> float:
    """Max interior residual of (E+Ebar)(E_zz + E_rho/rho + E_rho rho) = 2(E_z^2+E_rho^2)."""
    E = field.values
    Ez, Er, Ezz, Err = _derivatives(field)
    Ei = E[1:-1, 1:-1]
    rho = field.rho[None, 1:-1]
    res = np.abs((Ei + np.conj(Ei)) * (Ezz + Er / rho + Err)
                 - 2.0 * (Ez ** 2 + Er ** 2))
    full = np.full(E.shape, np.nan)
    full[1:-1, 1:-1] = res
    field.residuals = full
    return float(res.max())


def metric_from_potential(field: ErnstField) -> MetricSlice:
    """Recover f = Re E pointwise and k, F by path-ordered trapezoid quadrature.

    The integration anchor is the lower-left interior grid point; paths run
    along the first interior z-row, then up each rho-column. k and F are set
    to zero at the anchor (they are defined up to additive constants).
    """
    E = field.values
    Ez, Er, _, _ = _derivatives(field)
    Ei = E[1:-1, 1:-1]
    if np.any(Ei.real + np.conj(Ei).real <= 0):
        raise DomainError("Re E <= 0 inside the grid: signature breaks down")
    h = field.rho[1] - field.rho[0]
    rho = field.rho[None, 1:-1]
    E_xi = 0.5 * (Ez - 1j * Er)
    Ebar_xi = np.conj(0.5 * (Ez + 1j * Er))
    denom = (Ei + np.conj(Ei)) ** 2
    k_xi = 2j * rho * E_xi * Ebar_xi / denom
    F_xi = 2.0 * rho * (E_xi - Ebar_xi) / denom

    def integrate(grad_xi):
        # real potential u with du = 2 Re(grad_xi dxi), dxi = dz + i drho
        uz = 2.0 * grad_xi.real
        ur = -2.0 * grad_xi.imag
        nz, nr = grad_xi.shape
        u = np.zeros((nz, nr))
        for j in range(1, nr):            # along the first interior row (rho)
            u[0, j] = u[0, j - 1] + 0.5 * h * (ur[0, j - 1] + ur[0, j])
        for i in range(1, nz):            # up each column (z)
            u[i, :] = u[i - 1, :] + 0.5 * h * (uz[i - 1, :] + uz[i, :])
        return u

    k_int = integrate(k_xi)
    F_int = integrate(F_xi)
    full_shape = E.shape
    k = np.full(full_shape, np.nan)
    F = np.full(full_shape, np.nan)
    k[1:-1, 1:-1] = k_int
    F[1:-1, 1:-1] = F_int
    return MetricSlice(f=E.real.copy(), k=k, F_rot=F)


def metric_path_consistency(field: ErnstField) -> float:
    """Difference of k integrated along two homotopic grid paths (corner routes)."""
    E = field.values
    Ez, Er, _, _ = _derivatives(field)
    Ei = E[1:-1, 1:-1]
    h = field.rho[1] - field.rho[0]
    rho = field.rho[None, 1:-1]
    E_xi = 0.5 * (Ez - 1j * Er)
    Ebar_xi = np.conj(0.5 * (Ez + 1j * Er))
    k_xi = 2j * rho * E_xi * Ebar_xi / (Ei + np.conj(Ei)) ** 2
    uz = 2.0 * k_xi.real
    ur = -2.0 * k_xi.imag
    nz, nr = k_xi.shape
    # route 1: along rho first, then z; route 2: along z first, then rho
    r1 = 0.0
    for j in range(1, nr):
        r1 += 0.5 * h * (ur[0, j - 1] + ur[0, j])
    for i in range(1, nz):
        r1 += 0.5 * h * (uz[i - 1, nr - 1] + uz[i, nr - 1])
    r2 = 0.0
    for i in range(1, nz):
        r2 += 0.5 * h * (uz[i - 1, 0] + uz[i, 0])
    for j in range(1, nr):
        r2 += 0.5 * h * (ur[nz - 1, j - 1] + ur[nz - 1, j])
    return float(abs(r1 - r2))


def conformal_consistency_residual(config: ErnstConfig, field: ErnstField,
                                   n_steps=12, tol=1e-13) -> float:
    """Compare Delta k from quadrature of the xi-system against the theta formula.

    Integrates dk along a straight rho-row path of n_steps grid cells starting
    at the interior anchor and compares with the difference of
    (1/2) log of the conformal-factor theta ratio at the endpoints.
    """
    E = field.values
    Ez, Er, _, _ = _derivatives(field)
    Ei = E[1:-1, 1:-1]
    h = field.rho[1] - field.rho[0]
    rho = field.rho[None, 1:-1]
    E_xi = 0.5 * (Ez - 1j * Er)
    Ebar_xi = np.conj(0.5 * (Ez + 1j * Er))
    k_xi = 2j * rho * E_xi * Ebar_xi / (Ei + np.conj(Ei)) ** 2
    ur = -2.0 * k_xi.imag
    i0 = Ei.shape[0] // 2
    n_steps = min(n_steps, Ei.shape[1] - 1)
    dk_quad = 0.0
    for j in range(1, n_steps + 1):
        dk_quad += 0.5 * h * (ur[i0, j - 1] + ur[i0, j])
    z0 = field.z[i0 + 1]
    r0 = field.rho[1]
    r1 = field.rho[1 + n_steps]
    c0 = conformal_factor(config, complex(z0, r0), tol=tol)
    c1 = conformal_factor(config, complex(z0, r1), tol=tol)
    dk_theta = 0.5 * (np.log(c1) - np.log(c0)).real
    return float(abs(dk_quad - dk_theta))


def export_csv(field: ErnstField, path, metric: Optional[MetricSlice] = None):
    """Write rho,z,Re_E,Im_E,f,k,F_rot,residual rows (z outer, rho inner)."""
    if field.residuals is None:
        ernst_residual(field)
    if metric is None:
        metric = metric_from_potential(field)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rho", "z", "Re_E", "Im_E", "f", "k", "F_rot",
                         "residual"])
        for i, z in enumerate(field.z):
            for j, r in enumerate(field.rho):
                e = field.values[i, j]
                writer.writerow([f"{r:.12g}", f"{z:.12g}",
                                 f"{e.real:.15g}", f"{e.imag:.15g}",
                                 f"{metric.f[i, j]:.15g}",
                                 f"{metric.k[i, j]:.15g}",
                                 f"{metric.F_rot[i, j]:.15g}",
                                 f"{field.residuals[i, j]:.6g}"])
