"""Conductivity and metric coefficient fields.

Fields come from a small deterministic catalog (constants, a radial bump, a
clamped linear ramp, a rotated anisotropic tensor, and convex blends) plus
three derived constructions: the tensor-to-scalar reduction, conformal
rescaling of the metric, and the near-boundary modification that makes the
Euclidean distance function a unit-speed metric distance inside the tube.

Every field is immutable after construction and evaluates on batched point
arrays; ellipticity and Lipschitz bounds are estimated on sample grids at
construction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FieldError
from .geometry import project_points

_DEFAULT_BBOX = (-2.5, 2.5)
_N_GRID = 64


@dataclass(eq=False)
class CoefficientField:
    """Scalar conductivity or 2x2 SPD tensor field on the plane.

    ``lam`` is the ellipticity constant: sampled eigenvalues lie in
    [lam, 1/lam].  ``lipschitz_bound`` dominates the finite-difference
    Lipschitz estimate of the entries over the sampling grid.
    """

    kind: str            # "scalar" | "tensor"
    catalog: str
    params: tuple
    lam: float
    lipschitz_bound: float
    _fn: object

    def scalar_at(self, points):
        if self.kind != "scalar":
            raise FieldError("tensor field evaluated as scalar")
        return self._fn(np.atleast_2d(np.asarray(points, dtype=float)))

    def tensor_at(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.kind == "scalar":
            v = self._fn(pts)
            out = np.zeros((len(pts), 2, 2))
            out[:, 0, 0] = v
            out[:, 1, 1] = v
            return out
        return self._fn(pts)

    def inverse_at(self, points):
        m = self.tensor_at(points)
        det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        inv = np.empty_like(m)
        inv[:, 0, 0] = m[:, 1, 1] / det
        inv[:, 1, 1] = m[:, 0, 0] / det
        inv[:, 0, 1] = -m[:, 0, 1] / det
        inv[:, 1, 0] = -m[:, 1, 0] / det
        return inv

    def sqrt_det_at(self, points):
        m = self.tensor_at(points)
        det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
        if np.any(det <= 0.0):
            raise FieldError("non-positive metric determinant")
        return np.sqrt(det)

    def alpha_at(self, points, normals):
        """1/sqrt(<G^{-1} nu, nu>) for Euclidean unit normals nu."""
        inv = self.inverse_at(points)
        q = np.einsum("nij,ni,nj->n", inv, normals, normals)
        return 1.0 / np.sqrt(q)


@dataclass(frozen=True)
class MetricQuantities:
    """Pointwise metric data for one SPD matrix and one unit normal."""

    sqrt_g: float
    G_inv: np.ndarray
    alpha: float
    nu_M: np.ndarray


def metric_quantities(g_value, nu):
    """Volume factor, inverse, boundary factor alpha and metric normal nu_M."""
    g = np.asarray(g_value, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if g.shape != (2, 2) or abs(g[0, 1] - g[1, 0]) > 1e-12 * (1 + abs(g[0, 1])):
        raise FieldError("metric value must be a symmetric 2x2 matrix")
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    tr = g[0, 0] + g[1, 1]
    if det <= 0.0 or tr <= 0.0:
        raise FieldError("metric value is not positive definite")
    inv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]]) / det
    alpha = 1.0 / np.sqrt(nu @ inv @ nu)
    nu_m = alpha * (inv @ nu)
    return MetricQuantities(sqrt_g=float(np.sqrt(det)), G_inv=inv,
                            alpha=float(alpha), nu_M=nu_m)


# -- catalog ----------------------------------------------------------------

def _grid_points(bbox, n=_N_GRID):
    lo, hi = bbox
    xs = np.linspace(lo, hi, n)
    gx, gy = np.meshgrid(xs, xs, indexing="ij")
    return np.stack([gx.ravel(), gy.ravel()], axis=1), (hi - lo) / (n - 1)


def _finalize(kind, catalog, params, fn, sample_points, step_pairs,
              value_range=None):
    """Estimate ellipticity and Lipschitz bounds, then freeze the field.

    ``value_range`` supplies the exact (inf, sup) of the values/eigenvalues
    when the catalog entry knows them in closed form; sampled ranges are
    used otherwise (derived fields).
    """
    vals = fn(sample_points)
    if kind == "scalar":
        lo, hi = float(vals.min()), float(vals.max())
        if lo <= 0.0:
            raise FieldError(f"{catalog}: non-positive scalar value {lo:g}")
    else:
        sym_err = np.abs(vals[:, 0, 1] - vals[:, 1, 0]).max()
        if sym_err > 1e-12 * (1.0 + np.abs(vals).max()):
            raise FieldError(f"{catalog}: tensor values not symmetric")
        tr = vals[:, 0, 0] + vals[:, 1, 1]
        det = vals[:, 0, 0] * vals[:, 1, 1] - vals[:, 0, 1] * vals[:, 1, 0]
        disc = np.sqrt(np.maximum((tr / 2) ** 2 - det, 0.0))
        eig_lo, eig_hi = tr / 2 - disc, tr / 2 + disc
        lo, hi = float(eig_lo.min()), float(eig_hi.max())
        if lo <= 0.0:
            raise FieldError(f"{catalog}: tensor not positive definite")
    if value_range is not None:
        lo, hi = float(value_range[0]), float(value_range[1])
        if lo <= 0.0:
            raise FieldError(f"{catalog}: value range not positive")
    lam = min(lo, 1.0 / hi, 1.0)

    lip = 0.0
    for (ia, ib, dist) in step_pairs:
        va, vb = vals[ia], vals[ib]
        diff = np.abs(va - vb).reshape(len(ia), -1).max(axis=1)
        lip = max(lip, float((diff / dist).max()))
    return CoefficientField(kind=kind, catalog=catalog, params=tuple(params),
                            lam=lam, lipschitz_bound=max(lip, 1e-300), _fn=fn)


def _grid_field(kind, catalog, params, fn, bbox, value_range=None):
    pts, step = _grid_points(bbox)
    n = _N_GRID
    idx = np.arange(n * n).reshape(n, n)
    pairs = [
        (idx[:-1, :].ravel(), idx[1:, :].ravel(), step),
        (idx[:, :-1].ravel(), idx[:, 1:].ravel(), step),
    ]
    return _finalize(kind, catalog, params, fn, pts, pairs, value_range=value_range)


def constant_scalar(value, bbox=_DEFAULT_BBOX):
    value = float(value)

    def fn(pts):
        return np.full(len(pts), value)

    return _grid_field("scalar", "constant", (value,), fn, bbox,
                       value_range=(value, value))


def constant_tensor(g11, g12, g22, bbox=_DEFAULT_BBOX):
    m = np.array([[g11, g12], [g12, g22]], dtype=float)

    def fn(pts):
        return np.broadcast_to(m, (len(pts), 2, 2)).copy()

    tr, det = m[0, 0] + m[1, 1], m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    disc = np.sqrt(max((tr / 2) ** 2 - det, 0.0))
    return _grid_field("tensor", "constant_tensor", (g11, g12, g22), fn, bbox,
                       value_range=(tr / 2 - disc, tr / 2 + disc))


def radial_bump(beta, x0, y0, width, bbox=_DEFAULT_BBOX):
    if width <= 0.0:
        raise FieldError("radial_bump width must be positive")

    if beta <= -1.0:
        raise FieldError("radial_bump requires beta > -1")

    def fn(pts):
        r2 = (pts[:, 0] - x0) ** 2 + (pts[:, 1] - y0) ** 2
        return 1.0 + beta * np.exp(-r2 / width ** 2)

    return _grid_field("scalar", "radial_bump", (beta, x0, y0, width), fn, bbox,
                       value_range=(min(1.0, 1.0 + beta), max(1.0, 1.0 + beta)))


def linear_ramp(beta, clamp_lam=0.2, bbox=_DEFAULT_BBOX):
    """1 + beta*x_1 clamped into [clamp_lam, 1/clamp_lam] (Lipschitz, kinked)."""
    if not 0.0 < clamp_lam < 1.0:
        raise FieldError("linear_ramp clamp must lie in (0,1)")

    def fn(pts):
        return np.clip(1.0 + beta * pts[:, 0], clamp_lam, 1.0 / clamp_lam)

    return _grid_field("scalar", "linear_ramp", (beta, clamp_lam), fn, bbox,
                       value_range=(clamp_lam, 1.0 / clamp_lam))


def rotated_anisotropic(a, b, theta_deg, bbox=_DEFAULT_BBOX):
    """R(theta) diag(a, b) R(theta)^T, constant in space."""
    t = np.deg2rad(theta_deg)
    r = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    m = r @ np.diag([float(a), float(b)]) @ r.T

    def fn(pts):
        return np.broadcast_to(m, (len(pts), 2, 2)).copy()

    return _grid_field("tensor", "rotated_anisotropic", (a, b, theta_deg), fn, bbox,
                       value_range=(min(a, b), max(a, b)))


def blended(weight, first, second, bbox=_DEFAULT_BBOX):
    """Convex combination (1-w)*first + w*second of same-kind fields."""
    if not 0.0 <= weight <= 1.0:
        raise FieldError("blend weight must lie in [0,1]")
    if first.kind != second.kind:
        raise FieldError("blended fields must share a kind")

    if first.kind == "scalar":
        def fn(pts):
            return (1.0 - weight) * first.scalar_at(pts) + weight * second.scalar_at(pts)
    else:
        def fn(pts):
            return (1.0 - weight) * first.tensor_at(pts) + weight * second.tensor_at(pts)

    lo = min(first.lam, second.lam)
    return _grid_field(first.kind, "blended", (weight, first.catalog, second.catalog),
                       fn, bbox, value_range=(lo, 1.0 / lo))


# -- derived fields ----------------------------------------------------------

def _domain_sample_pairs(domain, n=_N_GRID):
    """Polar sample points inside the domain plus neighbor pairs for bounds."""
    theta = domain.arclength_params(n)
    scales = np.linspace(0.02, 0.995, n)
    ring = domain.curve(theta)
    pts = (scales[:, None, None] * ring[None, :, :]).reshape(-1, 2)
    idx = np.arange(n * n).reshape(n, n)
    pairs = []
    rad = np.linalg.norm(ring, axis=1)
    dr = float(np.min(rad)) * (scales[1] - scales[0])
    pairs.append((idx[:-1, :].ravel(), idx[1:, :].ravel(), dr))
    return pts, pairs


def _derived_field(kind, catalog, params, fn, domain):
    pts, pairs = _domain_sample_pairs(domain)
    return _finalize(kind, catalog, params, fn, pts, pairs)


def reduce_to_scalar(conductivity, metric, domain=None):
    """Rewrite a tensor conductivity as a scalar one in a modified metric.

    Pointwise A1 = sqrt(g) A G^{-1}, gamma1 = det(A1)^{1/2}, and the new
    metric is the inverse of A1/gamma1 (unit determinant), so the assembled
    bilinear form gamma1 sqrt(det Gt) Gt^{-1} equals sqrt(g) A G^{-1}
    identically.
    """
    def a1_at(pts):
        a = conductivity.tensor_at(pts)
        ginv = metric.inverse_at(pts)
        sg = metric.sqrt_det_at(pts)
        a1 = sg[:, None, None] * np.einsum("nij,njk->nik", a, ginv)
        asym = np.abs(a1[:, 0, 1] - a1[:, 1, 0]).max()
        if asym > 1e-10 * (1.0 + np.abs(a1).max()):
            raise FieldError("conductivity and metric must commute "
                             "(one of them has to be scalar-valued)")
        return a1

    def gamma1_fn(pts):
        a1 = a1_at(pts)
        det = a1[:, 0, 0] * a1[:, 1, 1] - a1[:, 0, 1] * a1[:, 1, 0]
        if np.any(det < 1e-16):
            raise FieldError("degenerate reduced conductivity (gamma1 < 1e-8)")
        g1 = np.sqrt(det)
        if np.any(g1 < 1e-8):
            raise FieldError("degenerate reduced conductivity (gamma1 < 1e-8)")
        return g1

    def gtilde_fn(pts):
        a1 = a1_at(pts)
        g1 = gamma1_fn(pts)
        ahat = a1 / g1[:, None, None]
        # inverse of a unit-determinant symmetric matrix: swap/negate
        out = np.empty_like(ahat)
        out[:, 0, 0] = ahat[:, 1, 1]
        out[:, 1, 1] = ahat[:, 0, 0]
        out[:, 0, 1] = -ahat[:, 0, 1]
        out[:, 1, 0] = -ahat[:, 1, 0]
        return out

    params = (conductivity.catalog, metric.catalog)
    if domain is not None:
        gamma1 = _derived_field("scalar", "reduced_scalar", params, gamma1_fn, domain)
        gtilde = _derived_field("tensor", "reduced_metric", params, gtilde_fn, domain)
    else:
        gamma1 = _grid_field("scalar", "reduced_scalar", params, gamma1_fn, _DEFAULT_BBOX)
        gtilde = _grid_field("tensor", "reduced_metric", params, gtilde_fn, _DEFAULT_BBOX)
    return gamma1, gtilde


def conformal_rescale(conductivity, metric, eta1, domain=None):
    """Rescale the metric by a scalar factor; in 2D the conductivity is kept."""
    if eta1.kind != "scalar":
        raise FieldError("conformal factor must be a scalar field")
    lam1 = eta1.lam
    pts = _grid_points(_DEFAULT_BBOX)[0] if domain is None \
        else _domain_sample_pairs(domain)[0]
    v = eta1.scalar_at(pts)
    # lam is itself a grid estimate; allow for sampling mismatch
    if np.any(v < lam1 * (1 - 1e-6)) or np.any(v > (1 + 1e-6) / lam1):
        raise FieldError("conformal factor violates its ellipticity bounds")

    def fn(p):
        return eta1.scalar_at(p)[:, None, None] * metric.tensor_at(p)

    params = (eta1.catalog, metric.catalog)
    if domain is not None:
        gtilde = _derived_field("tensor", "conformal_metric", params, fn, domain)
    else:
        gtilde = _grid_field("tensor", "conformal_metric", params, fn, _DEFAULT_BBOX)
    return conductivity, gtilde


def smoothstep_down(t, lo, hi):
    """C^2 cutoff: 1 for t <= lo, 0 for t >= hi, quintic in between."""
    s = np.clip((np.asarray(t, dtype=float) - lo) / (hi - lo), 0.0, 1.0)
    return 1.0 - (6.0 * s ** 5 - 15.0 * s ** 4 + 10.0 * s ** 3)


def aks_modify(domain, metric):
    """Conformally adjust the metric so distance to the boundary is metric
    distance in the inner half of the tube.

    Returns eta*G with eta = chi(phi)*|grad phi|^2_{G^{-1}} + (1 - chi(phi)),
    chi a quintic cutoff equal to 1 below d0/2 and 0 above 3 d0/4.  Inside
    {phi <= d0/2} the modified metric gradient of phi has unit norm.
    """
    d0 = domain.d0

    def fn(pts):
        phi, grad, _, _ = project_points(domain, pts)
        ginv = metric.inverse_at(pts)
        eta_hat = np.einsum("nij,ni,nj->n", ginv, grad, grad)
        chi = smoothstep_down(phi, 0.5 * d0, 0.75 * d0)
        eta = chi * eta_hat + (1.0 - chi)
        return eta[:, None, None] * metric.tensor_at(pts)

    field = _derived_field("tensor", "aks_metric", (metric.catalog,), fn, domain)
    # ellipticity composes quadratically under the conformal factor
    field.lam = min(field.lam, metric.lam ** 2)
    return field
