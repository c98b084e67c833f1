"""Shared numerical machinery: quadrature on segments and circles, finite differences, paths.

All integrands are complex-valued functions of a complex variable and must be
vectorized over numpy arrays of points.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureError


@lru_cache(maxsize=32)
def _leggauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def gl_segment(f, a, b, n=32):
    """Fixed-order Gauss-Legendre integral of f along the straight segment [a, b]."""
    x, w = _leggauss(n)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    pts = mid + half * x
    vals = f(pts)
    return half * np.tensordot(w, vals, axes=(0, 0))


def integrate_segment(f, a, b, tol=1e-12, n0=16, max_doublings=9):
    """Integrate an analytic integrand along [a, b] by order-doubling Gauss-Legendre.

    Stops when two successive orders agree to tol (absolute, relative to the
    running magnitude). Exponentially convergent for integrands analytic in a
    neighbourhood of the segment.
    """
    prev = gl_segment(f, a, b, n0)
    n = n0
    for _ in range(max_doublings):
        n *= 2
        cur = gl_segment(f, a, b, n)
        err = np.max(np.abs(cur - prev))
        scale = max(1.0, float(np.max(np.abs(cur))))
        if err <= tol * scale:
            return cur
        prev = cur
    return prev


def integrate_path(f, waypoints, tol=1e-12):
    """Integrate along a polyline given by a sequence of complex waypoints."""
    total = None
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        piece = integrate_segment(f, a, b, tol=tol)
        total = piece if total is None else total + piece
    return total


def adaptive_segment(f, a, b, tol=1e-10, max_depth=24):
    """Adaptive Gauss quadrature along [a, b] with interval bisection.

    Error estimate per interval from the difference of 16- and 32-node rules;
    refines where the estimate exceeds the locally allotted tolerance.
    """
    def recurse(a, b, budget, depth):
        coarse = gl_segment(f, a, b, 16)
        fine = gl_segment(f, a, b, 32)
        err = np.max(np.abs(fine - coarse))
        if err <= budget or depth >= max_depth:
            if depth >= max_depth and err > 100 * budget:
                raise QuadratureError(
                    f"adaptive quadrature stalled on [{a}, {b}] (err {err:.2e})")
            return fine
        m = 0.5 * (a + b)
        return recurse(a, m, budget / 2, depth + 1) + recurse(m, b, budget / 2, depth + 1)

    return recurse(a, b, tol, 0)


def circle_nodes(center, radius, n):
    theta = 2.0 * np.pi * np.arange(n) / n
    return center + radius * np.exp(1j * theta)


def contour_residue(f, center, radius, n=128):
    """(1/2πi) ∮ f dz over the circle |z - center| = radius, by the trapezoid rule.

    Exponentially accurate when f is meromorphic with no singularity other
    than at the center inside (or near) the contour.
    """
    pts = circle_nodes(center, radius, n)
    vals = np.asarray(f(pts))
    return np.tensordot(vals, (pts - center), axes=(0, 0)) / n


def central_diff(f, x, h, richardson=True):
    """Central difference df/dx for complex-analytic f of one real/complex variable.

    With richardson=True combines steps h and h/2 for an O(h^4) estimate.
    """
    d1 = (f(x + h) - f(x - h)) / (2 * h)
    if not richardson:
        return d1
    d2 = (f(x + h / 2) - f(x - h / 2)) / h
    return (4.0 * d2 - d1) / 3.0


def stencil5_d1(f, x, h):
    """Five-point first derivative, O(h^4)."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


def stencil5_d2(f, x, h):
    """Five-point second derivative, O(h^4)."""
    return (-f(x + 2 * h) + 16 * f(x + h) - 30 * f(x) + 16 * f(x - h)
            - f(x - 2 * h)) / (12 * h * h)


def segment_point_distance(a, b, p):
    """Distance from point p to the segment [a, b] in the complex plane."""
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(p - a)
    t = ((p - a) * np.conj(ab)).real / denom
    t = min(1.0, max(0.0, t))
    return abs(p - (a + t * ab))


def polyline_clearance(waypoints, points):
    """Minimum distance from a polyline to a set of points."""
    best = np.inf
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        for p in points:
            best = min(best, segment_point_distance(a, b, p))
    return best


def deflected_waypoints(a, b, obstacles, radius, n_arc=8):
    """Waypoints from a to b along the segment, detouring around obstacles.

    Obstacles strictly inside the segment (not at its endpoints) and closer
    than `radius` to it are bypassed by a semicircular arc of that radius.
    The arc bulges away from the side the obstacle sits on (so the detour
    stays homotopic to the straight segment as obstacles drift in and out of
    the trigger distance); obstacles exactly on the segment are passed on the
    left of the travel direction. Returns a list of complex waypoints to be
    joined by straight segments.
    """
    ab = b - a
    length = abs(ab)
    if length == 0.0:
        return [a, b]
    direction = ab / length
    hits = []
    for p in obstacles:
        t = ((p - a) * np.conj(direction)).real
        if 1e-12 * length < t < length * (1 - 1e-12):
            cross = ((p - a) * np.conj(direction)).imag
            if abs(cross) < radius:
                hits.append((t, p, cross))
    hits.sort(key=lambda tp: tp[0])
    pts = [a]
    left = 1j * direction
    for t, p, cross in hits:
        side = 1.0 if cross <= 0.0 else -1.0   # bulge opposite the obstacle
        for k in range(n_arc + 1):
            ang = np.pi * k / n_arc
            pts.append(p - radius * direction * np.cos(ang)
                       + side * radius * left * np.sin(ang))
    pts.append(b)
    return pts


def refine_path(waypoints, max_step):
    """Subdivide a polyline so that no step exceeds max_step."""
    out = [waypoints[0]]
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        dist = abs(b - a)
        k = max(1, int(np.ceil(dist / max_step)))
        for j in range(1, k + 1):
            out.append(a + (b - a) * j / k)
    return np.asarray(out)
