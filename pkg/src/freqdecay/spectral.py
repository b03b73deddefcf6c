"""Discrete Dirichlet-to-Neumann operator, Steklov eigenpairs, frequencies.

The boundary Schur complement of the stiffness matrix is the discrete
Dirichlet-to-Neumann map; its eigenpairs against the Euclidean boundary
mass matrix are the Steklov spectrum.  The frequency of a boundary datum is
its Dirichlet-extension energy over its boundary L2 mass (computed with the
Euclidean coefficient pair), and the lower frequency comes from spectral
sums over the Euclidean Steklov basis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SpectralError
from .fem import BoundaryDatum, dense_sym_eig, solve_dirichlet

DEFAULT_BASIS_SIZE = 120
_TAIL_FRACTION = 1e-4


@dataclass(eq=False)
class SteklovBasis:
    """Ascending Steklov eigenvalues with B_e-orthonormal boundary modes."""

    mu: np.ndarray       # (m,)
    modes: np.ndarray    # (n_boundary, m)
    count: int
    tag: str = ""


@dataclass(frozen=True)
class FrequencyReport:
    """Frequency functionals of one boundary datum."""

    Phi: float
    Phi1: float
    l2: float
    semi_h12: float
    dual: float


def _datum_values(f):
    return f.values if isinstance(f, BoundaryDatum) else np.asarray(f, dtype=float)


def dtn_matrix(matrices, mesh=None):
    """Boundary Schur complement K_BB - K_BI K_II^{-1} K_IB (dense).

    Columns are computed through the shared sparse factorization of the
    interior block; the result is symmetric up to solver roundoff and
    annihilates constants.
    """
    k_ib = matrices.K_IB.toarray()
    if matrices.interior.size:
        x = matrices.interior_factor.solve(k_ib)
    else:
        x = np.zeros_like(k_ib)
    return matrices.K_BB.toarray() - k_ib.T @ x


def steklov_basis(s, b_e_bb, m, tag=""):
    """m smallest Steklov eigenpairs of S x = mu B_e x.

    Eigenvectors are normalized to unit boundary L2 mass and their sign is
    fixed by making the largest-magnitude entry positive.
    """
    n = s.shape[0]
    if m > n:
        raise SpectralError(f"requested {m} modes from {n} boundary vertices")
    s_sym = 0.5 * (s + s.T)
    b = b_e_bb.toarray() if hasattr(b_e_bb, "toarray") else np.asarray(b_e_bb)
    w, v = dense_sym_eig(s_sym, b)
    scale = max(abs(w[0]), abs(w[-1]))
    n_kernel = int(np.sum(np.abs(w) <= 1e-9 * scale))
    if n_kernel > 1:
        raise SpectralError(f"Steklov kernel dimension {n_kernel} > 1")
    w, v = w[:m], v[:, :m]
    for j in range(m):
        i = int(np.argmax(np.abs(v[:, j])))
        if v[i, j] < 0:
            v[:, j] = -v[:, j]
    return SteklovBasis(mu=w, modes=v, count=m, tag=tag)


def frequency(matrices, mesh, f, dtn=None):
    """Dirichlet-extension energy over boundary L2 mass.

    ``matrices`` must be assembled with the Euclidean pair (gamma = 1,
    G = I); when the DtN matrix is already available it is used directly,
    otherwise one interior solve supplies the extension energy.
    """
    fv = _datum_values(f)
    denom = float(fv @ (matrices.B_e_bb @ fv))
    if denom <= 1e-14 * max(np.abs(fv).max() ** 2, 1e-300):
        raise SpectralError("datum has vanishing boundary L2 mass")
    if dtn is not None:
        num = float(fv @ (dtn @ fv))
    else:
        u = solve_dirichlet(matrices, mesh, fv)
        num = float(u @ (matrices.K @ u))
    return num / denom


def spectral_coefficients(basis, b_e_bb, f):
    """Expansion coefficients a_n = phi_n^T B_e f against the Steklov basis."""
    fv = _datum_values(f)
    return basis.modes.T @ (b_e_bb @ fv)


def low_frequency(basis, b_e_bb, f):
    """Boundary L2 mass over the dual-norm square, via spectral sums.

    Requires the datum to be mean-zero and spectrally resolved: the L2 tail
    outside the expansion must stay below 1e-4 of the mass.
    """
    fv = _datum_values(f)
    norm2 = float(fv @ (b_e_bb @ fv))
    if norm2 <= 0.0:
        raise SpectralError("datum has vanishing boundary L2 mass")
    a = spectral_coefficients(basis, b_e_bb, fv)[1:]
    mu = basis.mu[1:]
    captured = float(a @ a)
    tail = norm2 - captured
    if tail > _TAIL_FRACTION * norm2:
        raise SpectralError(
            f"spectral tail {tail/norm2:.2e} of the L2 mass exceeds {_TAIL_FRACTION:g}; "
            f"increase the basis size")
    dual = float(np.sum(a * a / mu))
    return captured / dual


def frequency_report(matrices, mesh, f, dtn, basis):
    """Both frequencies plus the three norms they quotient."""
    fv = _datum_values(f)
    l2 = float(fv @ (matrices.B_e_bb @ fv))
    semi = float(fv @ (dtn @ fv))
    phi = frequency(matrices, mesh, fv, dtn=dtn)
    phi1 = low_frequency(basis, matrices.B_e_bb, fv)
    a = spectral_coefficients(basis, matrices.B_e_bb, fv)[1:]
    dual = float(np.sum(a * a / basis.mu[1:]))
    return FrequencyReport(Phi=phi, Phi1=phi1, l2=l2, semi_h12=semi, dual=dual)
