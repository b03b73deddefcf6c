"""P1 finite elements for the weighted Riemannian Dirichlet form.

Assembles a(u, psi) = int gamma sqrt(g) (grad u)^T G^{-1} grad psi dx with
centroid-sampled coefficients, Euclidean and metric boundary mass matrices,
and provides the Dirichlet / mean-zero Neumann solvers plus the dense
symmetric generalized eigensolver used by the spectral module.

The interior Dirichlet solve is conjugate gradients with diagonal
preconditioning (tolerance 1e-12, iteration cap 20 sqrt(n)); very large
meshes switch to a seeded algebraic-multigrid preconditioner with the same
tolerance and cap so the residual contract is unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh as dense_eigh

from . import backend
from .errors import FieldError, SolveError, SpectralError

_CG_TOL = 1e-12
_AMG_MIN_UNKNOWNS = 200_000
_AMG_SEED = 20260810


@dataclass(eq=False)
class BoundaryDatum:
    """Boundary values in boundary_cycle order.

    ``descriptor`` records an analytic origin such as ("cos", 3) or
    ("steklov", 4) when there is one; ``mean_zero`` asserts a vanishing
    Euclidean boundary integral (checked by :func:`check_mean_zero`).
    """

    values: np.ndarray
    mean_zero: bool = False
    descriptor: tuple = None


def boundary_arclengths(mesh):
    """Cumulative arc length of the boundary polyline at each cycle vertex."""
    lengths = mesh.boundary_edge_lengths
    return np.concatenate([[0.0], np.cumsum(lengths[:-1])])


def boundary_trapezoid(mesh, values):
    """Euclidean trapezoid rule for int_{boundary} f dsigma."""
    lengths = mesh.boundary_edge_lengths
    nxt = np.roll(values, -1)
    return float(np.dot(lengths, 0.5 * (values + nxt)))


def check_mean_zero(mesh, values):
    total = boundary_trapezoid(mesh, values)
    l2 = np.sqrt(max(boundary_trapezoid(mesh, values * values), 0.0))
    per = float(mesh.boundary_edge_lengths.sum())
    return abs(total) <= 1e-10 * max(l2 * np.sqrt(per), 1e-300)


def fourier_datum(mesh, n, kind="cos", phase=0.0):
    """Fourier mode of the boundary arc-length angle, cos or sin."""
    if n < 0:
        raise FieldError("fourier mode must be nonnegative")
    per = float(mesh.boundary_edge_lengths.sum())
    ang = 2.0 * np.pi * boundary_arclengths(mesh) / per + phase
    vals = np.cos(n * ang) if kind == "cos" else np.sin(n * ang)
    return BoundaryDatum(values=vals, mean_zero=(n >= 1), descriptor=(kind, n))


@dataclass(eq=False)
class SystemMatrices:
    """Stiffness and boundary mass matrices for one (gamma, G) pair."""

    K: sp.csr_matrix
    B_e: sp.csr_matrix
    B_M: sp.csr_matrix
    boundary: np.ndarray
    interior: np.ndarray

    @cached_property
    def K_II(self):
        return self.K[self.interior][:, self.interior].tocsr()

    @cached_property
    def K_IB(self):
        return self.K[self.interior][:, self.boundary].tocsr()

    @cached_property
    def K_BB(self):
        return self.K[self.boundary][:, self.boundary].tocsr()

    @cached_property
    def B_e_bb(self):
        return self.B_e[self.boundary][:, self.boundary].tocsr()

    @cached_property
    def B_M_bb(self):
        return self.B_M[self.boundary][:, self.boundary].tocsr()

    @cached_property
    def interior_factor(self):
        """Sparse LU of the interior block, shared by multi-column solves."""
        return spla.splu(self.K_II.tocsc())


def assemble(mesh, conductivity, metric):
    """Assemble stiffness and boundary mass matrices on a mesh.

    Coefficients are sampled per triangle at the centroid; boundary edges
    carry exact quadratic edge-mass integrals with the metric boundary
    weight evaluated at edge midpoints using the Euclidean edge normal.
    """
    cent = mesh.tri_centroids
    a_val = conductivity.tensor_at(cent)
    g_inv = metric.inverse_at(cent)
    sqrt_g = metric.sqrt_det_at(cent)
    coef = sqrt_g[:, None, None] * np.einsum("tij,tjk->tik", a_val, g_inv)
    asym = np.abs(coef[:, 0, 1] - coef[:, 1, 0]).max()
    if asym > 1e-10 * (1.0 + np.abs(coef).max()):
        raise FieldError("conductivity and metric do not commute; "
                         "reduce the tensor pair to a scalar one first")
    coef = np.ascontiguousarray(coef)

    ke = backend.element_stiffness(mesh.vertices, mesh.triangles, coef)
    tri = mesh.triangles.astype(np.int64)
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    nv = mesh.n_vertices
    K = sp.coo_matrix((ke.ravel(), (rows, cols)), shape=(nv, nv)).tocsr()

    cyc = mesh.boundary_cycle
    nxt = np.roll(cyc, -1)
    p, q = mesh.vertices[cyc], mesh.vertices[nxt]
    lengths = np.linalg.norm(q - p, axis=1)
    mid = 0.5 * (p + q)
    tang = (q - p) / lengths[:, None]
    normal = np.stack([tang[:, 1], -tang[:, 0]], axis=1)

    sg_mid = metric.sqrt_det_at(mid)
    alpha_mid = metric.alpha_at(mid, normal)
    if conductivity.kind == "scalar":
        c_mid = conductivity.scalar_at(mid)
    else:
        c_mid = np.ones(len(mid))
    w_m = c_mid * sg_mid / alpha_mid

    def edge_mass(weights):
        data = np.concatenate([
            weights * lengths / 3.0, weights * lengths / 6.0,
            weights * lengths / 6.0, weights * lengths / 3.0])
        r = np.concatenate([cyc, cyc, nxt, nxt])
        c = np.concatenate([cyc, nxt, cyc, nxt])
        return sp.coo_matrix((data, (r, c)), shape=(nv, nv)).tocsr()

    b_e = edge_mass(np.ones(len(mid)))
    b_m = edge_mass(w_m)

    is_b = np.zeros(nv, dtype=bool)
    is_b[cyc] = True
    return SystemMatrices(K=K, B_e=b_e, B_M=b_m,
                          boundary=np.asarray(cyc),
                          interior=np.nonzero(~is_b)[0])


def energy(matrices, u):
    """Dirichlet energy u^T K u of a nodal field."""
    return float(u @ (matrices.K @ u))


def _amg_preconditioner(a_csr):
    import pyamg

    # pyamg's setup estimates spectral radii with random probes; fixing the
    # legacy RNG keeps repeated runs bit-identical.
    state = np.random.get_state()
    np.random.seed(_AMG_SEED)
    try:
        ml = pyamg.smoothed_aggregation_solver(a_csr, max_coarse=500)
    finally:
        np.random.set_state(state)
    return ml.aspreconditioner()


def pcg(a, b, tol=_CG_TOL, maxiter=None, precondition=None):
    """Preconditioned conjugate gradients with a fixed traversal order.

    Stops when ||r|| <= tol * ||b||; raises SolveError with the final
    residual when the iteration cap is exceeded.
    """
    n = b.shape[0]
    if maxiter is None:
        maxiter = int(20.0 * np.sqrt(n)) + 1
    if precondition is None:
        diag = a.diagonal()
        precondition = lambda r: r / diag
    bnorm = float(np.linalg.norm(b))
    x = np.zeros(n)
    if bnorm == 0.0:
        return x, 0
    r = b.copy()
    z = precondition(r)
    p = z.copy()
    rz = float(r @ z)
    for it in range(1, maxiter + 1):
        ap = a @ p
        alpha = rz / float(p @ ap)
        x += alpha * p
        r -= alpha * ap
        if float(np.linalg.norm(r)) <= tol * bnorm:
            return x, it
        z = precondition(r)
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolveError(f"conjugate gradients: no convergence in {maxiter} iterations "
                     f"(residual {np.linalg.norm(r)/bnorm:.3e} of rhs)")


def solve_dirichlet(matrices, mesh, f):
    """A-harmonic extension of boundary values; exact on the boundary."""
    fvals = f.values if isinstance(f, BoundaryDatum) else np.asarray(f, dtype=float)
    nv = matrices.K.shape[0]
    u = np.zeros(nv)
    u[matrices.boundary] = fvals
    b = -(matrices.K @ u)[matrices.interior]
    n_i = matrices.interior.size
    if n_i > 0:
        if n_i > _AMG_MIN_UNKNOWNS:
            precond = _amg_preconditioner(matrices.K_II)
            x, _ = pcg(matrices.K_II, b, precondition=lambda r: precond @ r)
        else:
            x, _ = pcg(matrices.K_II, b)
        u[matrices.interior] = x
        res = np.linalg.norm(matrices.K_II @ x - b)
        if res > 1e-10 * max(np.linalg.norm(b), 1e-300):
            raise SolveError(f"interior residual {res:.3e} above contract")
    return u


def neumann_trace(matrices, u):
    """Discrete conormal data eta with B_e eta = (K u) on the boundary."""
    load = (matrices.K @ u)[matrices.boundary]
    eta = spla.spsolve(matrices.B_e_bb.tocsc(), load)
    return BoundaryDatum(values=eta, mean_zero=True, descriptor=("trace",))


def solve_neumann(matrices, mesh, eta):
    """Neumann solve with the zero-boundary-mean constraint as a bordered row."""
    evals = eta.values if isinstance(eta, BoundaryDatum) else np.asarray(eta, dtype=float)
    if not check_mean_zero(mesh, evals):
        raise SolveError("Neumann datum is not mean-zero on the boundary")
    nv = matrices.K.shape[0]
    eta_ext = np.zeros(nv)
    eta_ext[matrices.boundary] = evals
    load = matrices.B_e @ eta_ext
    c = matrices.B_e @ np.ones(nv)
    a = sp.bmat([[matrices.K, c[:, None]], [c[None, :], None]], format="csc")
    sol = spla.splu(a).solve(np.concatenate([load, [0.0]]))
    v = sol[:nv]
    res = np.linalg.norm(matrices.K @ v - load)
    ref = np.linalg.norm(load)
    if ref > 0 and res > 1e-9 * ref:
        raise SolveError(f"Neumann residual {res/ref:.3e} above contract")
    return v


def dense_sym_eig(kd, bd):
    """Ascending eigenpairs of Kd x = mu Bd x, eigenvectors Bd-orthonormal."""
    kd = np.asarray(kd, dtype=float)
    bd = np.asarray(bd, dtype=float)
    n = kd.shape[0]
    if kd.shape != (n, n) or bd.shape != (n, n):
        raise SpectralError("matrices must be square and of equal size")
    if n > 4000:
        raise SpectralError("dense eigensolver capped at 4000 unknowns")
    if np.abs(kd - kd.T).max() > 1e-8 * max(np.abs(kd).max(), 1e-300):
        raise SpectralError("Kd is not symmetric")
    try:
        np.linalg.cholesky(bd)
    except np.linalg.LinAlgError as exc:
        raise SpectralError("Bd is not symmetric positive definite") from exc
    try:
        w, v = dense_eigh(kd, bd)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise SpectralError(f"eigensolver failed: {exc}") from exc
    return w, v
