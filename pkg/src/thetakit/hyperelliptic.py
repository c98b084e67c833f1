"""Hyperelliptic curves y^2 = prod(w - z_i): periods, Abel maps, tau-functions.

Homology convention
-------------------
Branch points are taken *in the order given*; consecutive points are paired
into branch cuts (z_1,z_2), (z_3,z_4), ...  For 2g+1 finite points the last
cut runs to infinity. The a-cycle a_k encircles cut k (k = 1..g); the b-cycle
b_k encircles the chain of branch points from the end of cut k to the start
of the last cut. Periods are computed as twice the straight-segment integrals
between branch points (Gauss-Chebyshev absorbs the inverse-square-root
endpoint singularities), with the sheet of y tracked by analytic continuation
from a fixed base determination at a reference point to the right of all
branch points. Cycle orientations are canonicalized so the normalized period
matrix is symmetric with positive-definite imaginary part; configurations for
which no orientation achieves this are rejected.

With this convention the curve {0, x, 1, inf} yields the classical values:
the a-period of dw/y equals 4K and Omega = i K'/K.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (DegenerateCurveError, DomainError, HomologyError,
                     PathError)
from .numerics import central_diff, contour_residue, deflected_waypoints
from .theta import PeriodMatrix, ThetaCharacteristics, theta_deriv, theta_eval

INF = complex(np.inf)

MIN_SEPARATION = 1e-10


def _is_inf(z) -> bool:
    try:
        return np.isinf(complex(z))
    except (TypeError, ValueError):
        return str(z).lower() in ("inf", "infinity", "oo")


@dataclass(frozen=True)
class HyperellipticCurve:
    """Branch data of y^2 = prod over finite branch points of (w - z_i)."""

    finite_points: tuple
    ramified_at_infinity: bool
    pairing: tuple

    @property
    def genus(self) -> int:
        n = len(self.finite_points) + (1 if self.ramified_at_infinity else 0)
        return n // 2 - 1

    @property
    def n_cuts(self) -> int:
        return self.genus + 1

    def cut(self, k):
        """Endpoints (start, end) of cut k; end may be INF for the last cut."""
        i, j = self.pairing[k]
        a = self.finite_points[i] if i is not None else INF
        b = self.finite_points[j] if j is not None else INF
        return a, b


def make_curve(branch_points, pairing=None) -> HyperellipticCurve:
    """Validate branch points (INF sentinel allowed once) and build the curve.

    Default pairing joins consecutive points in the order given, with
    infinity (when present or implied by an odd count) paired last.
    """
    finite = []
    has_inf = False
    for z in branch_points:
        if _is_inf(z):
            if has_inf:
                raise DegenerateCurveError("infinity listed twice")
            has_inf = True
        else:
            finite.append(complex(z))
    if len(finite) % 2 == 1:
        has_inf = True
    n_total = len(finite) + (1 if has_inf else 0)
    if n_total < 4 or n_total % 2 != 0:
        raise DegenerateCurveError(
            f"need 2g+2 branch points (g >= 1), got {n_total}")
    arr = np.asarray(finite)
    for i in range(len(finite)):
        d = np.abs(arr - arr[i])
        d[i] = np.inf
        if d.min() <= MIN_SEPARATION:
            raise DegenerateCurveError(
                f"branch points too close: separation {d.min():.2e}")
    g = n_total // 2 - 1
    if pairing is None:
        pairs = [(2 * k, 2 * k + 1) for k in range(g + 1)]
        if has_inf:
            pairs[g] = (2 * g, None)
    else:
        pairs = [tuple(p) for p in pairing]
    seen = [i for p in pairs for i in p if i is not None]
    expect = list(range(len(finite)))
    if sorted(seen) != expect or len(pairs) != g + 1:
        raise DomainError(f"pairing {pairs} does not cover every branch point once")
    if has_inf and pairs[-1][1] is not None:
        raise DomainError("infinity must be paired last")
    return HyperellipticCurve(tuple(finite), has_inf, tuple(pairs))


@dataclass(frozen=True)
class PeriodData:
    """Non-normalized a- and b-periods of w^{j-1} dw/y and the normalized matrix."""

    A: np.ndarray
    B: np.ndarray
    Omega: PeriodMatrix
    A_inv: np.ndarray = field(repr=False, default=None)
    _work: object = field(repr=False, compare=False, default=None)


@dataclass(frozen=True)
class TauB:
    value: complex
    curve: HyperellipticCurve


# ----------------------------------------------------------------------------
# sheet tracking


class _Frame:
    """Evaluation frame for one curve: polynomial, reference sheet, continuation."""

    def __init__(self, curve: HyperellipticCurve, tol=1e-12):
        self.curve = curve
        self.tol = tol
        self.pts = np.asarray(curve.finite_points)
        self.g = curve.genus
        spread = max(np.abs(self.pts[:, None] - self.pts[None, :]).max(), 1.0)
        self.min_sep = np.abs(
            self.pts[:, None] - self.pts[None, :]
            + np.diag([np.inf] * len(self.pts))).min()
        self.w_ref = complex(self.pts.real.max() + 0.5 + 1.1 * spread)
        # the sign normalizes the a-period of dw/y on {0, x, 1, inf} to +4K
        self.y_ref = -complex(np.prod(np.sqrt(self.w_ref - self.pts)))
        self.defl_radius = 0.25 * self.min_sep

    def poly(self, w):
        w = np.asarray(w)
        return np.prod(w[..., None] - self.pts, axis=-1)

    def poly_d1(self, w):
        total = 0.0
        for i in range(len(self.pts)):
            others = np.delete(self.pts, i)
            total = total + np.prod(w - others)
        return total

    def _march(self, ws, y0, depth=0):
        """Continue y along the sampled path ws, starting from y(ws[0]) = y0."""
        s = np.sqrt(self.poly(ws))
        y = y0
        for i in range(1, len(ws)):
            si = s[i]
            keep = abs(si - y) <= abs(si + y)
            cand = si if keep else -si
            gap = abs(cand - y)
            if gap > 0.7 * abs(y) and depth < 12:
                mid = 0.5 * (ws[i - 1] + ws[i])
                y = self._march(np.array([ws[i - 1], mid, ws[i]]), y, depth + 1)
            else:
                y = cand
        return y

    def _sample(self, waypoints):
        """Sample a polyline finely enough for safe sheet marching."""
        out = [waypoints[0]]
        for a, b in zip(waypoints[:-1], waypoints[1:]):
            d_branch = min(min(abs(a - p), abs(b - p)) for p in self.pts)
            step = max(0.35 * max(d_branch, self.defl_radius * 0.5), 1e-3 * self.min_sep)
            k = max(1, int(np.ceil(abs(b - a) / step)))
            for j in range(1, k + 1):
                out.append(a + (b - a) * j / k)
        return np.asarray(out)

    def y_at(self, w, start=None):
        """y(w) by continuation from the base determination (or a given start)."""
        w0, y0 = (self.w_ref, self.y_ref) if start is None else start
        if w == w0:
            return y0
        way = deflected_waypoints(w0, w, self.pts, self.defl_radius)
        return self._march(self._sample(way), y0)

    # ------------------------------------------------------------------
    # branch-to-branch segment integrals

    def cut_integral(self, u, v, y_mid, n):
        """int_u^v  w^k dw / y  for k = 0..g-1, both endpoints branch points.

        Nodes are Gauss-Chebyshev (absorbing the sqrt endpoint singularities);
        the sheet at the midpoint is prescribed and marched outward.
        """
        i = np.arange(1, n + 1)
        t = np.cos((2 * i - 1) * np.pi / (2 * n))
        mid = 0.5 * (u + v)
        half = 0.5 * (v - u)
        w = mid + half * t
        order = np.argsort(np.abs(t))      # march outward from the midpoint
        s = np.sqrt(self.poly(w))
        y = np.empty(n, dtype=complex)
        prev_plus, prev_minus = y_mid, y_mid
        for idx in order:
            ref = prev_plus if t[idx] >= 0 else prev_minus
            yi = s[idx] if abs(s[idx] - ref) <= abs(s[idx] + ref) else -s[idx]
            y[idx] = yi
            if t[idx] >= 0:
                prev_plus = yi
            else:
                prev_minus = yi
        root = np.sqrt(1.0 - t * t)
        base = root * half / y
        return np.array([(np.pi / n) * np.sum(w ** k * base)
                         for k in range(self.g)])

    def cut_integral_adaptive(self, u, v, y_mid, n0=64, max_doublings=6):
        prev = self.cut_integral(u, v, y_mid, n0)
        n = n0
        for _ in range(max_doublings):
            n *= 2
            cur = self.cut_integral(u, v, y_mid, n)
            scale = max(1.0, float(np.max(np.abs(cur))))
            if np.max(np.abs(cur - prev)) <= self.tol * scale:
                return cur
            prev = cur
        return prev

    def branch_segment_integral(self, u, v, state):
        """int_u^v w^k dw/y between branch points, deflecting around others.

        state = (w_anchor, y_anchor) seeds the sheet; the determination is
        marched from the anchor to the middle of the (deflected) path and
        carried along it. Returns (integrals, new_state) with the new state
        anchored at the path middle.
        """
        others = [p for p in self.pts
                  if abs(p - u) > 1e-14 and abs(p - v) > 1e-14]
        way = deflected_waypoints(u, v, others, self.defl_radius)
        if len(way) == 2:
            mid = 0.5 * (u + v)
            w0, y0 = state
            y_mid = self._march(self._sample(
                deflected_waypoints(w0, mid, self.pts, self.defl_radius)), y0)
            return self.cut_integral_adaptive(u, v, y_mid), (mid, y_mid)
        # pick the waypoint closest to the middle of the polyline by arclength
        lengths = np.cumsum([0.0] + [abs(b - a) for a, b in zip(way[:-1], way[1:])])
        m = int(np.argmin(np.abs(lengths - lengths[-1] / 2)))
        m = min(max(m, 1), len(way) - 2)
        probe = way[m]
        w0, y0 = state
        y_probe = self._march(self._sample(
            deflected_waypoints(w0, probe, self.pts, self.defl_radius)), y0)
        # march backward to way[1] and forward to way[-2]
        y_after_first = self._march(self._sample(list(reversed(way[1:m + 1]))),
                                    y_probe)
        total = _abel_raw_leg_from_branch(self, u, way[1], y_after_first, n=96)
        y_cur = y_after_first
        for a1, b1 in zip(way[1:-2], way[2:-1]):
            vals, y_cur = _abel_leg_regular(self, a1, b1, y_cur, n=96)
            total = total + vals
        total = total - _abel_raw_leg_from_branch(self, v, way[-2], y_cur, n=96)
        return total, (probe, y_probe)


def _finite_cut_points(curve):
    """Start/end points of the finite part of each cut, plus gap endpoints."""
    cuts = [curve.cut(k) for k in range(curve.n_cuts)]
    return cuts


def _build_periods(curve: HyperellipticCurve, tol=1e-12):
    fr = _Frame(curve, tol=tol)
    g = curve.genus
    cuts = _finite_cut_points(curve)

    # a-periods over cuts 1..g (all finite by the pairing convention)
    A = np.empty((g, g), dtype=complex)
    base_state = (fr.w_ref, fr.y_ref)
    for k in range(g):
        u, v = cuts[k]
        vals, _ = fr.branch_segment_integral(u, v, base_state)
        A[k, :] = 2.0 * vals

    # gap integrals along the chain joining consecutive cuts, one continuation pass
    gaps = []
    state = base_state
    for k in range(g):
        u = cuts[k][1]                      # end of cut k
        v = cuts[k + 1][0]                  # start of cut k+1 (finite)
        vals, state = fr.branch_segment_integral(u, v, state)
        gaps.append(2.0 * vals)
    Bmat = np.empty((g, g), dtype=complex)
    for k in range(g):
        Bmat[k, :] = np.sum(gaps[k:], axis=0)

    # orientation canonicalization: unique sign pattern making Omega symmetric
    # with positive-definite imaginary part
    A_inv = np.linalg.inv(A)
    best = None
    for signs in itertools.product((1.0, -1.0), repeat=g):
        Om = (np.diag(signs) @ Bmat) @ A_inv
        asym = np.max(np.abs(Om - Om.T))
        if asym < 1e-6 * max(1.0, np.max(np.abs(Om))):
            if np.linalg.eigvalsh(0.5 * (Om + Om.T).imag)[0] > 0:
                if best is not None:
                    raise HomologyError("orientation ambiguity: two sign "
                                        "patterns produce a valid period matrix")
                best = (signs, Om, asym)
    if best is None:
        Om0 = Bmat @ A_inv
        raise HomologyError(
            "no cycle orientation yields a symmetric period matrix with "
            "positive-definite imaginary part; rejecting the pairing",
            omega=Om0, asym=float(np.max(np.abs(Om0 - Om0.T))))
    signs, Om, asym = best
    Bmat = np.diag(signs) @ Bmat
    return fr, A, Bmat, PeriodMatrix(Om)


def periods(curve: HyperellipticCurve, tol=1e-12) -> PeriodData:
    """Numerical a/b-periods of w^{j-1} dw/y and the normalized period matrix."""
    fr, A, B, Om = _build_periods(curve, tol=tol)
    return PeriodData(A=A, B=B, Omega=Om, A_inv=np.linalg.inv(A), _work=fr)


# ----------------------------------------------------------------------------
# Abel map

INF_SHEET_1 = "inf1"
INF_SHEET_2 = "inf2"


def _abel_raw_leg_from_branch(fr, b, target, y_at_outer, n=48):
    """int_b^target w^k dw/y with a branch point at b, via w = b + (target-b) t^2.

    y_at_outer: determination of y at the outer end (w = target). Returns the
    integral vector; nodes are marched inward from the outer end.
    """
    from .numerics import _leggauss
    x, wts = _leggauss(n)
    t = 0.5 * (x + 1.0)
    wts = 0.5 * wts
    w = b + (target - b) * t ** 2
    dwdt = 2.0 * (target - b) * t
    s = np.sqrt(fr.poly(w))
    y = np.empty(n, dtype=complex)
    order = np.argsort(-t)
    prev = y_at_outer
    for idx in order:
        yi = s[idx] if abs(s[idx] - prev) <= abs(s[idx] + prev) else -s[idx]
        y[idx] = yi
        prev = yi
    vals = np.array([np.sum(wts * (w ** k) * dwdt / y) for k in range(fr.g)])
    return vals


def _abel_leg_regular(fr, a, b, y_start, n=48):
    """int_a^b w^k dw/y along a straight segment of regular points."""
    from .numerics import _leggauss
    x, wts = _leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    w = mid + half * x
    s = np.sqrt(fr.poly(w))
    y = np.empty(n, dtype=complex)
    prev = y_start
    for idx in range(n):
        yi = s[idx] if abs(s[idx] - prev) <= abs(s[idx] + prev) else -s[idx]
        y[idx] = yi
        prev = yi
    vals = np.array([np.sum(wts * (w ** k) * half / y) for k in range(fr.g)])
    return vals, y[-1]


def _abel_leg_to_infinity(fr, W0, yW0, n=64):
    """int_{W0}^{inf} w^k dw/y in the chart u = 1/w (even model only)."""
    npts = len(fr.pts)
    from .numerics import _leggauss
    x, wts = _leggauss(n)
    u0 = 1.0 / W0
    mid, half = 0.5 * u0, -0.5 * u0
    u = mid + half * x
    # ytil = u^{g+1} y = sqrt(prod(1 - z_i u)), continued from u0
    ytil0 = yW0 * u0 ** (fr.g + 1)
    s = np.sqrt(np.prod(1.0 - u[..., None] * fr.pts, axis=-1))
    y = np.empty(n, dtype=complex)
    order = np.argsort(np.abs(u - u0))
    prev = ytil0
    for idx in order:
        yi = s[idx] if abs(s[idx] - prev) <= abs(s[idx] + prev) else -s[idx]
        y[idx] = yi
        prev = yi
    sheet_sign = 1.0 if abs(prev - 1.0) < abs(prev + 1.0) else -1.0
    _ = npts
    vals = np.array([np.sum(wts * (-(u ** (fr.g - 1 - k))) * half / y)
                     for k in range(fr.g)])
    return vals, sheet_sign


def abel_map(curve: HyperellipticCurve, point, basepoint_index=0,
             pd: Optional[PeriodData] = None, sheet=1, tol=1e-12):
    """Abel map int of normalized differentials from a branch point to `point`.

    point: a complex number (a regular value or another branch point), or
    INF_SHEET_1 / INF_SHEET_2 for the two points over w = infinity (even
    model only). `sheet` selects the lift of a regular target; since the
    basepoint is ramified, the sheet-2 image is minus the sheet-1 image.

    The result depends on the integration path modulo the period lattice;
    the path convention is a straight segment from the basepoint, deflected
    around intervening branch points.
    """
    if pd is None:
        pd = periods(curve, tol=tol)
    fr = pd._work
    b = curve.finite_points[basepoint_index]

    if isinstance(point, str):
        if curve.ramified_at_infinity:
            raise DomainError("infinity is a branch point of the odd model")
        want = 1.0 if point == INF_SHEET_1 else -1.0
        raw, sgn = _abel_to_infinity_raw(fr, b)
        raw = raw if sgn == want else -raw
        return raw @ pd.A_inv

    target = complex(point)
    target_is_branch = bool(np.min(np.abs(fr.pts - target)) < MIN_SEPARATION)
    raw = _abel_raw_to_point(fr, b, target, endpoint_branch=target_is_branch)
    if sheet == 2:
        raw = -raw
    return raw @ pd.A_inv


def _abel_raw_to_point(fr, b, target, endpoint_branch=False):
    """Raw integrals from branch point b to target along one continuation chain.

    The sheet is seeded once from the base determination near the start of
    the path and carried continuously through every leg, so square-root
    substitutions at singular endpoints stay on the same determination.
    """
    if abs(target - b) < MIN_SEPARATION:
        return np.zeros(fr.g, dtype=complex)
    obstacles = [p for p in fr.pts if abs(p - b) > 1e-14 and abs(p - target) > 1e-14]
    way = deflected_waypoints(b, target, obstacles, fr.defl_radius)
    if len(way) == 2 and endpoint_branch:
        mid = 0.5 * (b + target)
        return fr.cut_integral_adaptive(b, target, fr.y_at(mid))
    first_end = way[1]
    anchor1 = b + (first_end - b) * 0.9
    y_seed = fr.y_at(anchor1)                      # seed: sheet-1 determination
    y_cur = fr._march(fr._sample([anchor1, first_end]), y_seed)
    raw = _abel_raw_leg_from_branch(fr, b, first_end, y_cur)
    legs = list(zip(way[1:-1], way[2:]))
    last = len(legs) - 1
    for i, (a1, b1) in enumerate(legs):
        if endpoint_branch and i == last:
            # reversed sqrt-substituted leg; its outer end is a1 where y_cur lives
            raw = raw - _abel_raw_leg_from_branch(fr, target, a1, y_cur)
        else:
            vals, y_cur = _abel_leg_regular(fr, a1, b1, y_cur)
            raw = raw + vals
    return raw


def _abel_to_infinity_raw(fr, b):
    """Raw integrals from branch point b to the point over infinity reached by
    continuing the base determination; returns (integrals, sheet sign)."""
    W0 = fr.w_ref
    raw = _abel_raw_to_point(fr, b, W0)
    leg, sgn = _abel_leg_to_infinity(fr, W0, fr.y_ref)
    return raw + leg, sgn


# ----------------------------------------------------------------------------
# tau-function and residual checks


def bergman_tau_hyp(curve: HyperellipticCurve, pd: Optional[PeriodData] = None,
                    tol=1e-12) -> TauB:
    """det A * prod_{m<n} (z_m - z_n)^{1/4} over the finite branch points.

    Quartic roots use the principal logarithm per factor, factors in index
    order. With infinity among the branch points the value is defined only up
    to the Moebius-covariant factor, so only ratios are meaningful.
    """
    if pd is None:
        pd = periods(curve, tol=tol)
    pts = curve.finite_points
    log_v = 0.0
    for m in range(len(pts)):
        for n in range(m + 1, len(pts)):
            log_v = log_v + np.log(pts[m] - pts[n])
    det_a = np.linalg.det(pd.A)
    return TauB(value=det_a * np.exp(0.25 * log_v), curve=curve)


def _perturbed_curve(curve, j, dz):
    pts = list(curve.finite_points)
    pts[j] = pts[j] + dz
    return HyperellipticCurve(tuple(pts), curve.ramified_at_infinity, curve.pairing)


def _theta1_c0(omega: PeriodMatrix) -> complex:
    """Constant term of the flat-torus bidifferential: B(d) = 1/d^2 + c0 + ...

    c0 = -theta1'''(0) / (3 theta1'(0)), with the third derivative from the
    heat equation applied to theta1'.
    """
    odd = ThetaCharacteristics([0.5], [0.5])
    tau = complex(omega.entries[0, 0])
    t1 = theta_deriv([0.0], omega.entries, odd, z_index=(0,))
    h = 1e-5

    def tp(t):
        return theta_deriv([0.0], np.array([[t]]), odd, z_index=(0,), tol=1e-14)

    t3 = 4j * np.pi * (tp(tau + h) - tp(tau - h)) / (2 * h)
    return -t3 / (3.0 * t1)


def hurwitz_tau_residual(curve: HyperellipticCurve, j: int, fd_step=1e-5,
                         tol=1e-12) -> float:
    """Residual of d(log tau_B)/dz_j = -res at the ramification point over z_j of
    B_reg(x,x)/dw, for a genus-1 curve with four finite branch points.

    The residue is a trapezoid contour integral of the closed-form pullback
    c0/(a^2 P) - P''/(12 P) + P'^2/(16 P^2)  (a = a-period of dw/y), doubled
    for the distinguished parameter (w - z_j)^{1/2}; the left side is a
    Richardson central difference of log tau_B.
    """
    if curve.genus != 1 or curve.ramified_at_infinity:
        raise DomainError("implemented for genus-1 curves with finite branch points")
    pd = periods(curve, tol=tol)
    fr = pd._work
    a_per = complex(pd.A[0, 0])
    c0 = _theta1_c0(pd.Omega)
    z_j = curve.finite_points[j]

    def integrand(ws):
        P = fr.poly(ws)
        others = np.delete(fr.pts, j)
        P1 = np.zeros_like(ws)
        P2 = np.zeros_like(ws)
        npts = len(fr.pts)
        for i in range(npts):
            rest = np.delete(fr.pts, i)
            P1 = P1 + np.prod(ws[..., None] - rest, axis=-1)
            for l in range(npts):
                if l == i:
                    continue
                rest2 = np.array([p for t, p in enumerate(fr.pts)
                                  if t != i and t != l])
                P2 = P2 + np.prod(ws[..., None] - rest2, axis=-1)
        _ = others
        return c0 / (a_per ** 2 * P) - P2 / (12.0 * P) + P1 ** 2 / (16.0 * P ** 2)

    eps = 0.25 * min(abs(z_j - p) for i, p in enumerate(fr.pts) if i != j)
    res_base = contour_residue(integrand, z_j, eps, n=128)
    rhs = -2.0 * res_base

    def logtau(dz):
        c2 = _perturbed_curve(curve, j, dz)
        return np.log(bergman_tau_hyp(c2, tol=tol).value)

    lhs = central_diff(logtau, 0.0, fd_step)
    return float(abs(lhs - rhs))


def period_variation_residual(curve: HyperellipticCurve, j: int, fd_step=1e-5,
                              tol=1e-12) -> float:
    """Residual of dOmega_ab/dz_j = 2 pi i * res over the ramification point of
    v_a v_b / dw (max norm over entries), for a simple branch point z_j.

    The residue is evaluated by contour quadrature in the base and doubled
    for the distinguished parameter; the left side is a Richardson central
    difference of the period map.
    """
    pd = periods(curve, tol=tol)
    fr = pd._work
    g = curve.genus
    z_j = curve.finite_points[j]
    A_inv = pd.A_inv

    def mat_integrand(ws):
        P = fr.poly(ws)
        mono = np.stack([ws ** k for k in range(g)], axis=-1)   # (n, g)
        phi = mono @ A_inv                                      # normalized coeffs
        return phi[:, :, None] * phi[:, None, :] / P[:, None, None]

    eps = 0.25 * min(abs(z_j - p) for i, p in enumerate(fr.pts) if i != j)
    res = contour_residue(mat_integrand, z_j, eps, n=128)
    rhs = 2j * np.pi * 2.0 * res

    def omega_at(dz):
        return periods(_perturbed_curve(curve, j, dz), tol=tol).Omega.entries

    lhs = central_diff(omega_at, 0.0, fd_step)
    return float(np.max(np.abs(lhs - rhs)))


def elliptic_k(x: float, tol=1e-12) -> float:
    """Complete elliptic integral K(k = sqrt(x)) by independent adaptive quadrature."""
    from scipy.integrate import quad
    val, _ = quad(lambda t: 1.0 / np.sqrt(1.0 - x * np.sin(t) ** 2),
                  0.0, np.pi / 2, epsabs=tol, epsrel=tol)
    return val


def thomae_residual(x: float, tol=1e-12) -> float:
    """max_k |theta_k^4(0, i mu) - (4/pi^2) K^2 {x, 1, 1-x}_k| on {0, x, 1, inf}."""
    from .theta import jacobi_constants
    if not (0.0 < x < 1.0):
        raise DomainError("x must lie in (0, 1)")
    curve = make_curve([0.0, x, 1.0, INF])
    pd = periods(curve, tol=tol)
    om = complex(pd.Omega.entries[0, 0])
    mu = om.imag
    if abs(om.real) > 1e-9:
        raise HomologyError(f"expected purely imaginary modulus, got {om}")
    jc = jacobi_constants(mu, tol=tol)
    K = elliptic_k(x, tol=tol)
    pref = 4.0 * K ** 2 / np.pi ** 2
    res = [abs(jc.theta2 ** 4 - pref * x),
           abs(jc.theta3 ** 4 - pref),
           abs(jc.theta4 ** 4 - pref * (1.0 - x))]
    return float(max(res))


def tau_b_symplectic_ratio(curve: HyperellipticCurve, blocks, tol=1e-12):
    """Ratio tau_B(transformed basis) / tau_B and det(C Omega + D).

    blocks = (A, B, C, D) integer g x g matrices acting by
    (b', a') = ((A, B), (C, D)) (b, a). Returns (ratio, det_factor).
    """
    pd = periods(curve, tol=tol)
    g = curve.genus
    Ab, Bb, Cb, Db = [np.asarray(m, dtype=float).reshape(g, g) for m in blocks]
    new_a = Cb @ pd.B + Db @ pd.A
    det_a = np.linalg.det(pd.A)
    det_new = np.linalg.det(new_a)
    ratio = det_new / det_a
    factor = np.linalg.det(Cb @ pd.Omega.entries + Db)
    return complex(ratio), complex(factor)
