"""Closed-form unit-disk references for pure cosine modes.

For u = r^n cos(n theta) on the unit disk with gamma = 1 and the Euclidean
metric, every profiled quantity has an elementary closed form; these are
the ground truth for tests and acceptance criteria.  Sine modes are
rotations of cosine modes and add no test power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ProfileError


@dataclass(frozen=True)
class DiskModeRecord:
    """Closed-form decay quantities of the disk mode r^n cos(n theta) at depth d."""

    n: int
    d: float
    D: float
    H: float
    E: float
    T: float
    N: float
    F: float
    K: float
    K1: float
    Phi: float
    Phi1: float
    mu: float


def disk_oracle(n, d):
    """Evaluate the closed forms; requires n >= 1 and 0 <= d < 1.

    E is the mass over the concentric disk of radius 1-d; K and K1 follow
    the E(0) = 1 normalization used by the decay profiles.
    """
    if int(n) != n or n < 1:
        raise ProfileError("disk oracle requires an integer mode n >= 1 "
                           "(the constant mode has zero frequency)")
    if not 0.0 <= d < 1.0:
        raise ProfileError("disk oracle requires 0 <= d < 1")
    n = int(n)
    r = 1.0 - d
    d_val = np.pi * n * r ** (2 * n)
    h_val = np.pi * r ** (2 * n + 1)
    e_val = np.pi * r ** (2 * n + 2) / (2 * n + 2)
    t_val = np.pi * n * n * r ** (2 * n - 1)
    e0 = np.pi / (2 * n + 2)
    return DiskModeRecord(
        n=n, d=d, D=d_val, H=h_val, E=e_val, T=t_val,
        N=n / r, F=n / r,
        K=(2 * n + 2) / r,
        K1=h_val / np.sqrt(e_val * e0),
        Phi=float(n), Phi1=float(n), mu=float(n))


def disk_mode_values(points, n):
    """Nodal values of r^n cos(n theta) at the given points."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    r = np.hypot(pts[:, 0], pts[:, 1])
    theta = np.arctan2(pts[:, 1], pts[:, 0])
    return r ** n * np.cos(n * theta)


def brute_force_disk(n, d):
    """Radial quadrature for D, H, E, T: the independent cross-check.

    Uses adaptive Gauss-Kronrod quadrature of the radial integrands; the
    angular factor integrates to pi for cos^2 and the gradient-square of a
    disk mode is angle-free.
    """
    from scipy.integrate import quad

    if n < 1 or not 0.0 <= d < 1.0:
        raise ProfileError("brute-force oracle requires n >= 1, 0 <= d < 1")
    r = 1.0 - d
    d_val, _ = quad(lambda s: 2.0 * np.pi * n * n * s ** (2 * n - 1), 0.0, r,
                    epsabs=1e-13, epsrel=1e-13)
    e_val, _ = quad(lambda s: np.pi * s ** (2 * n + 1), 0.0, r,
                    epsabs=1e-13, epsrel=1e-13)
    h_val = np.pi * r ** (2 * n) * r
    t_val = np.pi * (n * r ** (n - 1)) ** 2 * r
    return {"D": d_val, "E": e_val, "H": h_val, "T": t_val}
