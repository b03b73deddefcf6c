"""Frequency-function apparatus: interior decay profiles and their checks.

For a solved field u and a coefficient pair (gamma, G) this module samples
the d-profiles

    D(d) = int_{phi>d} gamma sqrt(g) |grad u|^2_{G^{-1}},
    H(d) = int_{phi=d} gamma u^2 sqrt(g)/alpha,
    E(d) = int_{phi>d} gamma sqrt(g) u^2,
    T(d) = int_{phi=d} gamma u_{nu_M}^2 sqrt(g)/alpha,

their derived quotients N = D/H, F = T/D, K = H/E, K1 = H/sqrt(E) (the
latter normalized so E(0) = 1), central-difference residuals of the
derivative identities D' = -2T + O(D), H' = -2D + O(H), E' = -H, the decay
bounds against h(c d Phi), and the penetration function of trigonometric
data spaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import ProfileError, SpectralError
from .fem import dense_sym_eig, fourier_datum, solve_dirichlet
from .slicing import clip_moments, level_cut

_FIT_C_MAX = 5.0
_FIT_C_MIN = 1e-2
_FIT_SMALL_C = 0.05
_FIT_LARGE_C = 2.0
_FIT_GRID = 50
_PASS_TOL = 0.05


def h_fun(s):
    """Positive strictly decreasing C^1 weight: e^{-s} on [0,1], 1/(e s) after."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0.0):
        raise ProfileError("h_fun requires s >= 0")
    out = np.where(s_arr <= 1.0, np.exp(-np.minimum(s_arr, 1.0)),
                   1.0 / (np.e * np.maximum(s_arr, 1.0)))
    return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out


@dataclass(eq=False)
class DecayProfile:
    """Sampled decay quantities of one solution on an ascending d-grid."""

    d_grid: np.ndarray
    D: np.ndarray
    H: np.ndarray
    E: np.ndarray
    T: np.ndarray
    N: np.ndarray
    F: np.ndarray
    K: np.ndarray
    K1: np.ndarray
    h: float
    d0: float
    descriptor: tuple = None

    @property
    def E0(self):
        return float(self.E[0]) if self.d_grid[0] == 0.0 else None


def _profile_weights(mesh, conductivity, metric, u):
    cent = mesh.tri_centroids
    gam = conductivity.scalar_at(cent)
    sg = metric.sqrt_det_at(cent)
    ginv = metric.inverse_at(cent)
    grad_u = mesh.interpolate_gradient(u)
    quad = np.einsum("tij,ti,tj->t", ginv, grad_u, grad_u)
    w_d = gam * sg * quad
    w_e = gam * sg
    return w_d, w_e, grad_u


def _levelset_quantities(mesh, conductivity, metric, u, grad_u, d):
    """(H, T, D_flux) at one depth via the chord rule on the cut polyline.

    D_flux is the divergence-theorem form of the interior energy,
    int gamma u u_{nu_M} dsigma_M; sharing its quadrature with H and T makes
    the Cauchy-Schwarz relation T H >= D_flux^2 exact up to rounding.
    """
    cut = level_cut(mesh, d)
    if cut.tri.size == 0:
        return 0.0, 0.0, 0.0
    nu = cut.normals
    gu = grad_u[cut.tri]
    x0, x1 = cut.gauss_points
    u0, u1 = cut.values_at_gauss(u)
    acc_h, acc_t, acc_b = [], [], []
    for x, uval in ((x0, u0), (x1, u1)):
        gam = conductivity.scalar_at(x)
        sg = metric.sqrt_det_at(x)
        ginv = metric.inverse_at(x)
        alpha = 1.0 / np.sqrt(np.einsum("nij,ni,nj->n", ginv, nu, nu))
        acc_h.append(gam * uval * uval * sg / alpha)
        conormal = np.einsum("nij,nj->ni", ginv, nu)
        u_nu_m = alpha * np.einsum("ni,ni->n", gu, conormal)
        acc_t.append(gam * u_nu_m * u_nu_m * sg / alpha)
        acc_b.append(gam * uval * u_nu_m * sg / alpha)
    return (cut.integrate(acc_h[0], acc_h[1]),
            cut.integrate(acc_t[0], acc_t[1]),
            cut.integrate(acc_b[0], acc_b[1]))


def decay_profile(mesh, conductivity, metric, u, d_grid, enforce_spacing=True):
    """Sample D, H, E, T and their quotients on an ascending d-grid.

    The grid must stay within [0, 0.9 d0] and, so that level curves are
    resolved by the element layers, step at least 2h.  K and K1 are reported
    with the total mass normalized to E(0) = 1 (raw columns D, H, E, T are
    unnormalized).
    """
    d_grid = np.asarray(d_grid, dtype=float)
    if d_grid.ndim != 1 or d_grid.size < 1 or np.any(np.diff(d_grid) <= 0.0):
        raise ProfileError("d-grid must be ascending")
    d0 = mesh.domain.d0 if mesh.domain is not None else float(mesh.phi.max())
    if d_grid[0] < 0.0 or d_grid[-1] > 0.9 * d0 + 1e-12:
        raise ProfileError(f"d-grid outside [0, 0.9*d0 = {0.9*d0:g}]")
    if enforce_spacing and d_grid.size > 1:
        step = np.min(np.diff(d_grid))
        if step < 2.0 * mesh.h * (1.0 - 1e-12):
            raise ProfileError(f"d-grid step {step:g} below 2h = {2*mesh.h:g}")

    u = np.asarray(u, dtype=float)
    w_d, w_e, grad_u = _profile_weights(mesh, conductivity, metric, u)

    n = d_grid.size
    cols = {k: np.empty(n) for k in "DHETB"}
    for i, d in enumerate(d_grid):
        mom = clip_moments(mesh, u, d)
        cols["D"][i] = float(np.dot(w_d, mom[:, 0]))
        cols["E"][i] = float(np.dot(w_e, mom[:, 2]))
        h_val, t_val, b_val = _levelset_quantities(mesh, conductivity, metric,
                                                   u, grad_u, d)
        cols["H"][i] = h_val
        cols["T"][i] = t_val
        cols["B"][i] = b_val

    for key in "DHETB":
        if np.any(cols[key] <= 0.0):
            bad = d_grid[cols[key] <= 0.0][0]
            raise ProfileError(f"{key}({bad:g}) is non-positive: datum trivial "
                               f"or mesh too coarse")

    d_c, h_c, e_c, t_c, b_c = (cols[k] for k in "DHETB")
    e_sol = float(np.dot(w_e, clip_moments(mesh, u, 0.0)[:, 2])) \
        if d_grid[0] != 0.0 else float(e_c[0])
    # N and F quotient through the flux form of D so that F >= N is the
    # Cauchy-Schwarz inequality of one discrete inner product.
    return DecayProfile(
        d_grid=d_grid, D=d_c, H=h_c, E=e_c, T=t_c,
        N=b_c / h_c, F=t_c / b_c, K=h_c / e_c,
        K1=h_c / np.sqrt(e_c * e_sol),
        h=mesh.h, d0=d0)


@dataclass(eq=False)
class ResidualTable:
    """Central-difference residuals of the derivative identities.

    a0 = |D' + 2T|/D and a1 = |H' + 2D|/H estimate the bounded remainders
    of the two differentiation identities; e = |E' + H|/H measures the
    coarea identity, which is exact in the continuum.
    """

    d: np.ndarray
    a0: np.ndarray
    a1: np.ndarray
    e: np.ndarray


def derivative_residuals(profile):
    """Residual table on the interior points of a fine uniform profile grid."""
    d = profile.d_grid
    if d.size < 3:
        raise ProfileError("need at least three grid points for central differences")
    steps = np.diff(d)
    step = steps[0]
    if not np.allclose(steps, step, rtol=1e-8, atol=1e-14):
        raise ProfileError("derivative residuals require a uniform grid")
    if step > profile.d0 / 100.0 + 1e-14:
        raise ProfileError(f"grid step {step:g} above d0/100 = {profile.d0/100:g}")

    def central(col):
        return (col[2:] - col[:-2]) / (2.0 * step)

    mid = slice(1, -1)
    dp, hp, ep = central(profile.D), central(profile.H), central(profile.E)
    return ResidualTable(
        d=d[mid],
        a0=np.abs(dp + 2.0 * profile.T[mid]) / profile.D[mid],
        a1=np.abs(hp + 2.0 * profile.D[mid]) / profile.H[mid],
        e=np.abs(ep + profile.H[mid]) / profile.H[mid])


def n_monotone_rate(profile):
    """Smallest C with exp(-C d) N(d) non-increasing on the grid."""
    ln_n = np.log(profile.N)
    rates = np.diff(ln_n) / np.diff(profile.d_grid)
    return float(max(0.0, rates.max()))


@dataclass(frozen=True)
class VerificationReport:
    """Bound quotients and fitted constants for the decay estimates."""

    fitted_C2: float
    fitted_c2: float
    fitted_C3: float
    fitted_c3: float
    fitted_C4: float
    max_ratio_D: float
    max_ratio_H: float
    max_ratio_cor: float
    pass_D: bool
    pass_H: bool
    pass_cor: bool


def _fit_constants(curves):
    """Smallest (C, c) in the search box making quantity <= e^{Cd} base h(c d freq).

    ``curves`` is a list of (d, quantity_over_base, freq) arrays; the grid is
    50x50 log-spaced candidates, preceded by the conservative (0, 1).
    """
    c_grid = np.concatenate([[0.0], np.geomspace(_FIT_C_MIN, _FIT_C_MAX, _FIT_GRID)])
    s_grid = np.geomspace(_FIT_SMALL_C, _FIT_LARGE_C, _FIT_GRID)[::-1]
    for big_c in c_grid:
        for small_c in ([1.0] if big_c == 0.0 else s_grid):
            ok = True
            for d, q, freq in curves:
                bound = np.exp(big_c * d) * h_fun(small_c * d * freq)
                if np.any(q > bound * (1.0 + 1e-12)):
                    ok = False
                    break
            if ok:
                return float(big_c), float(small_c), True
    return float("nan"), float("nan"), False


def verify_decay(entries):
    """Check the decay bounds across a sweep of profiles.

    ``entries`` is a list of (profile, Phi, Phi1).  Quotients use the
    conservative constants (C, c) = (0, 1); fitted constants come from a
    bounded grid search.  The H-bound is restricted to d <= 0.45 d0.
    """
    d_curves, h_curves = [], []
    max_d = max_h = max_cor = 0.0
    for prof, phi, phi1 in entries:
        pos = prof.d_grid > 0.0
        d = prof.d_grid[pos]
        q_d = prof.D[pos] / prof.D[0]
        d_curves.append((d, q_d, phi))
        max_d = max(max_d, float(np.max(q_d / h_fun(d * phi))))

        hcut = pos & (prof.d_grid <= 0.45 * prof.d0 + 1e-12)
        dh = prof.d_grid[hcut]
        q_h = prof.H[hcut] / prof.H[0]
        h_curves.append((dh, q_h, phi1))
        if dh.size:
            max_h = max(max_h, float(np.max(q_h / h_fun(dh * phi1))))

        cor = d * prof.D[pos] * phi * phi1 / (prof.D[0] * h_fun(d * phi1 / 2.0))
        max_cor = max(max_cor, float(np.max(cor)))

    c2_big, c2_small, ok_d = _fit_constants(d_curves)
    c3_big, c3_small, ok_h = _fit_constants(h_curves)
    return VerificationReport(
        fitted_C2=c2_big, fitted_c2=c2_small,
        fitted_C3=c3_big, fitted_c3=c3_small,
        fitted_C4=max_cor,
        max_ratio_D=max_d, max_ratio_H=max_h, max_ratio_cor=max_cor,
        pass_D=(max_d <= 1.0 + _PASS_TOL) or ok_d,
        pass_H=(max_h <= 1.0 + _PASS_TOL) or ok_h,
        pass_cor=max_cor <= _FIT_C_MAX * (1.0 + 1e-9))


def penetration(mesh, conductivity, metric, n, d, n_max=None, matrices=None,
                solutions=None):
    """Largest interior-energy fraction over data orthogonal to n trig modes.

    Builds Fourier boundary data of degrees n+1 .. n_max (cosine and sine),
    solves the Dirichlet problem for each, and maximizes the Rayleigh
    quotient of interior energy over {phi > d} against total energy via the
    generalized eigenproblem of the two Gram matrices.
    """
    if n_max is None:
        n_max = n + 16
    if not n < n_max:
        raise ProfileError("penetration requires n < n_max")
    if len(mesh.boundary_cycle) < 8 * n_max:
        raise ProfileError(f"boundary resolution too low: need >= {8*n_max} vertices")
    d0 = mesh.domain.d0 if mesh.domain is not None else float(mesh.phi.max())
    if not 0.0 < d <= 0.9 * d0 + 1e-12:
        raise ProfileError(f"penetration depth d={d:g} outside (0, 0.9*d0]")

    if solutions is None:
        solutions = penetration_solutions(mesh, conductivity, metric, n, n_max,
                                          matrices=matrices)
    grads, w_t = solutions
    areas_d = backend.clip_table(mesh.vertices, mesh.triangles, mesh.phi, None, d)[:, 0]
    areas_0 = backend.clip_table(mesh.vertices, mesh.triangles, mesh.phi, None, 0.0)[:, 0]
    p = _energy_gram(grads, w_t, areas_d)
    q = _energy_gram(grads, w_t, areas_0)
    try:
        w, _ = dense_sym_eig(p, q)
    except SpectralError as exc:
        raise ProfileError(f"penetration data linearly dependent: {exc}") from exc
    return float(w[-1])


def penetration_solutions(mesh, conductivity, metric, n, n_max, matrices=None):
    """Dirichlet solves for the orthogonal-mode family, reduced to gradients."""
    from .fem import assemble

    if matrices is None:
        matrices = assemble(mesh, conductivity, metric)
    grads = []
    for k in range(n + 1, n_max + 1):
        for kind in ("cos", "sin"):
            u = solve_dirichlet(matrices, mesh, fourier_datum(mesh, k, kind))
            grads.append(mesh.interpolate_gradient(u))
    grads = np.stack(grads, axis=2)  # (T, 2, K)

    cent = mesh.tri_centroids
    a_val = conductivity.tensor_at(cent)
    ginv = metric.inverse_at(cent)
    sg = metric.sqrt_det_at(cent)
    w_t = sg[:, None, None] * np.einsum("tij,tjk->tik", a_val, ginv)
    return grads, w_t


def _energy_gram(grads, w_t, areas):
    """Gram matrix P_kl = sum_t areas_t (grad_k . C_t grad_l)."""
    v = np.einsum("tij,tjk->tik", w_t, grads)
    p = np.einsum("t,tik,til->kl", areas, grads, v)
    return 0.5 * (p + p.T)
