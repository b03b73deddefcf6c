"""Planar domains with C^{1,1} boundary curves.

A :class:`Domain` wraps one of three closed-curve families (disk, ellipse,
smooth star) together with its curvature bound and the tube width ``d0``
inside which the nearest-boundary projection is unique.  The main numerical
primitive is :func:`project_points`, a multistart Newton projection onto the
parametrized curve; it backs the per-vertex distance values of every mesh,
the near-boundary metric modification, and the normal-flow coordinate map.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ProjectionError

_FAMILIES = ("disk", "ellipse", "smooth_star")

# Multistart Newton projection parameters.
_N_SEEDS = 64
_NEWTON_TOL = 1e-13
_NEWTON_MAXIT = 50

# Dense sampling used for curvature maxima and arc-length tables.
_N_CURV_SAMPLES = 4096
_N_ARC_SAMPLES = 32768


@dataclass(frozen=True)
class Domain:
    """A closed counterclockwise boundary curve with curvature bound.

    ``d0`` is the tube width: every point at distance < d0 from the curve
    has a unique nearest boundary point.
    """

    family: str
    params: tuple
    kappa_max: float
    d0: float

    # -- curve evaluation -------------------------------------------------

    def curve(self, theta):
        """Boundary point c(theta); theta may be scalar or array."""
        theta = np.asarray(theta, dtype=float)
        if self.family == "disk":
            (r,) = self.params
            return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)
        if self.family == "ellipse":
            a, b = self.params
            return np.stack([a * np.cos(theta), b * np.sin(theta)], axis=-1)
        r = self._star_radius(theta)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def curve_d1(self, theta):
        """First derivative c'(theta)."""
        theta = np.asarray(theta, dtype=float)
        if self.family == "disk":
            (r,) = self.params
            return np.stack([-r * np.sin(theta), r * np.cos(theta)], axis=-1)
        if self.family == "ellipse":
            a, b = self.params
            return np.stack([-a * np.sin(theta), b * np.cos(theta)], axis=-1)
        r = self._star_radius(theta)
        r1 = self._star_radius_d1(theta)
        ct, st = np.cos(theta), np.sin(theta)
        return np.stack([r1 * ct - r * st, r1 * st + r * ct], axis=-1)

    def curve_d2(self, theta):
        """Second derivative c''(theta)."""
        theta = np.asarray(theta, dtype=float)
        if self.family == "disk":
            return -self.curve(theta)
        if self.family == "ellipse":
            return -self.curve(theta)
        r = self._star_radius(theta)
        r1 = self._star_radius_d1(theta)
        r2 = self._star_radius_d2(theta)
        ct, st = np.cos(theta), np.sin(theta)
        cx = (r2 - r) * ct - 2.0 * r1 * st
        cy = (r2 - r) * st + 2.0 * r1 * ct
        return np.stack([cx, cy], axis=-1)

    def outward_normal(self, theta):
        """Unit outward normal; the curve is traversed counterclockwise."""
        t = self.curve_d1(theta)
        n = np.stack([t[..., 1], -t[..., 0]], axis=-1)
        return n / np.linalg.norm(n, axis=-1, keepdims=True)

    def curvature(self, theta):
        """Closed-form curvature of the parametrization."""
        theta = np.asarray(theta, dtype=float)
        if self.family == "disk":
            (r,) = self.params
            return np.full(theta.shape, 1.0 / r)
        if self.family == "ellipse":
            a, b = self.params
            return a * b / (a * a * np.sin(theta) ** 2 + b * b * np.cos(theta) ** 2) ** 1.5
        r = self._star_radius(theta)
        r1 = self._star_radius_d1(theta)
        r2 = self._star_radius_d2(theta)
        return (r * r + 2.0 * r1 * r1 - r * r2) / (r * r + r1 * r1) ** 1.5

    def perimeter(self):
        theta = np.linspace(0.0, 2.0 * np.pi, _N_ARC_SAMPLES + 1)
        speed = np.linalg.norm(self.curve_d1(theta), axis=-1)
        return float(np.trapezoid(speed, theta))

    def arclength_params(self, k):
        """k parameter values giving equal arc-length spacing, starting at theta=0."""
        theta = np.linspace(0.0, 2.0 * np.pi, _N_ARC_SAMPLES + 1)
        speed = np.linalg.norm(self.curve_d1(theta), axis=-1)
        s = np.concatenate([[0.0], np.cumsum((speed[1:] + speed[:-1]) * 0.5 * np.diff(theta))])
        targets = s[-1] * np.arange(k) / k
        return np.interp(targets, s, theta)

    # -- star-family helpers ----------------------------------------------

    def _star_coeffs(self):
        return self.params[0], np.asarray(self.params[1:], dtype=float)

    def _star_radius(self, theta):
        r0, eps = self._star_coeffs()
        k = np.arange(1, eps.size + 1)
        return r0 * (1.0 + np.cos(np.multiply.outer(theta, k)) @ eps)

    def _star_radius_d1(self, theta):
        r0, eps = self._star_coeffs()
        k = np.arange(1, eps.size + 1)
        return -r0 * (np.sin(np.multiply.outer(theta, k)) @ (k * eps))

    def _star_radius_d2(self, theta):
        r0, eps = self._star_coeffs()
        k = np.arange(1, eps.size + 1)
        return -r0 * (np.cos(np.multiply.outer(theta, k)) @ (k * k * eps))


def build_domain(family, params):
    """Validate parameters and construct a :class:`Domain`.

    The curvature bound is the maximum of the closed-form curvature over
    4096 parameter samples, and the unique-projection tube width is
    d0 = 0.9 / kappa_max.
    """
    params = tuple(float(p) for p in np.atleast_1d(params))
    if family not in _FAMILIES:
        raise DomainError(f"unknown domain family {family!r}")
    if family == "disk":
        if len(params) != 1 or params[0] <= 0.0:
            raise DomainError("disk requires a single positive radius")
    elif family == "ellipse":
        if len(params) != 2 or min(params) <= 0.0:
            raise DomainError("ellipse requires two positive semi-axes")
    else:
        if len(params) < 2 or params[0] <= 0.0:
            raise DomainError("smooth_star requires a positive base radius and "
                              "at least one perturbation coefficient")
        eps = np.asarray(params[1:])
        k = np.arange(1, eps.size + 1)
        smallness = float(np.sum(k * k * np.abs(eps)))
        if smallness >= 0.5:
            raise DomainError(
                f"smooth_star coefficients violate sum k^2|eps_k| < 0.5 (got {smallness:g})")

    dom = Domain(family=family, params=params, kappa_max=0.0, d0=0.0)
    theta = np.linspace(0.0, 2.0 * np.pi, _N_CURV_SAMPLES, endpoint=False)
    speed = np.linalg.norm(dom.curve_d1(theta), axis=-1)
    if np.min(speed) <= 0.0:
        raise DomainError("degenerate parametrization: ||c'(theta)|| vanishes")
    kappa_max = float(np.max(np.abs(dom.curvature(theta))))
    d0 = 0.9 / kappa_max
    return Domain(family=family, params=params, kappa_max=kappa_max, d0=d0)


@dataclass(frozen=True)
class SignedDistance:
    """Distance to the boundary with its certified gradient and foot point.

    ``grad_phi`` and ``foot`` are certified unique only when ``unique`` is
    set (phi < d0); phi itself is valid everywhere inside the domain.
    """

    phi: float
    grad_phi: np.ndarray
    foot: np.ndarray
    unique: bool


def project_points(domain, points):
    """Project points onto the boundary curve (vectorized multistart Newton).

    Newton iteration on g(theta) = <p - c(theta), c'(theta)> with 64 seeds
    uniform in theta, tolerance 1e-13, at most 50 iterations per seed; the
    returned foot is the converged candidate of minimum distance.

    Returns ``(phi, grad_phi, foot, unique)`` arrays; ``grad_phi`` is
    (p - foot)/phi for phi > 0 and the inward normal -nu(foot) at phi = 0.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    seeds = 2.0 * np.pi * (np.arange(_N_SEEDS) + 0.5) / _N_SEEDS

    theta = np.broadcast_to(seeds, (n, _N_SEEDS)).copy()
    converged = np.zeros((n, _N_SEEDS), dtype=bool)
    failed = np.zeros((n, _N_SEEDS), dtype=bool)

    p = pts[:, None, :]
    for _ in range(_NEWTON_MAXIT):
        active = ~(converged | failed)
        if not active.any():
            break
        th = theta[active]
        c = domain.curve(th)
        c1 = domain.curve_d1(th)
        c2 = domain.curve_d2(th)
        diff = np.broadcast_to(p, (n, _N_SEEDS, 2))[active] - c
        g = np.einsum("ij,ij->i", diff, c1)
        speed2 = np.einsum("ij,ij->i", c1, c1)
        gp = np.einsum("ij,ij->i", diff, c2) - speed2
        # Stationary to within tolerance: accept regardless of curvature sign
        # (distance maxima lose the argmin below; equidistant points such as
        # the disk center have g identically zero).
        flat = np.abs(g) <= _NEWTON_TOL * (1.0 + speed2)
        bad = ~(gp < 0.0) & ~flat
        step = np.where(bad | flat, 0.0, g / np.where(gp < 0.0, gp, -1.0))
        theta[active] = th - step
        done = (np.abs(step) <= _NEWTON_TOL) & ~bad
        conv_now = np.zeros_like(converged)
        conv_now[active] = done | flat
        fail_now = np.zeros_like(failed)
        fail_now[active] = bad
        converged |= conv_now
        failed |= fail_now

    feet_all = domain.curve(theta)
    dist = np.linalg.norm(pts[:, None, :] - feet_all, axis=-1)
    dist = np.where(converged, dist, np.inf)
    if not converged.any(axis=1).all():
        nbad = int((~converged.any(axis=1)).sum())
        raise ProjectionError(f"boundary projection failed for {nbad} point(s) "
                              f"after {_N_SEEDS}-seed multistart")
    best = np.argmin(dist, axis=1)
    idx = np.arange(n)
    phi = dist[idx, best]
    foot = feet_all[idx, best]
    theta_best = theta[idx, best]

    grad = np.empty_like(foot)
    near = phi > 1e-12
    grad[near] = (pts[near] - foot[near]) / phi[near, None]
    if (~near).any():
        grad[~near] = -domain.outward_normal(theta_best[~near])
    unique = phi < domain.d0
    return phi, grad, foot, unique


def signed_distance(domain, point):
    """Distance, certified gradient and nearest boundary point for one point."""
    phi, grad, foot, unique = project_points(domain, np.asarray(point, dtype=float)[None, :])
    return SignedDistance(phi=float(phi[0]), grad_phi=grad[0], foot=foot[0],
                          unique=bool(unique[0]))


def normal_flow_points(domain, metric_field, ys, d, rk_steps=256):
    """Flow boundary points a distance d inward along the metric gradient of phi.

    Integrates gamma' = G^{-1}(gamma) grad_phi(gamma) with classical RK4 at
    step d/rk_steps, batched over starting points.  Under a metric modified
    to have unit metric gradient in the tube this is the boundary-normal
    coordinate map: the result lies on the level set {phi = d}.
    """
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    if d == 0.0:
        return ys.copy()
    if not 0.0 <= d <= 0.9 * domain.d0:
        raise DomainError(f"flow distance d={d:g} outside [0, 0.9*d0]")

    def velocity(x):
        phi, grad, _, _ = project_points(domain, x)
        if np.any(phi >= domain.d0):
            raise ProjectionError("normal flow trajectory left the tube {phi < d0}")
        ginv = metric_field.inverse_at(x)
        return np.einsum("nij,nj->ni", ginv, grad)

    h = d / rk_steps
    x = ys.copy()
    for _ in range(rk_steps):
        k1 = velocity(x)
        k2 = velocity(x + 0.5 * h * k1)
        k3 = velocity(x + 0.5 * h * k2)
        k4 = velocity(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x


def normal_flow(domain, metric_field, y, d):
    """Single-point wrapper around :func:`normal_flow_points`."""
    return normal_flow_points(domain, metric_field, np.asarray(y, dtype=float)[None, :], d)[0]
