"""Level-set region and curve quadrature on distance-aligned meshes.

The per-vertex distance field is interpolated linearly inside each triangle,
so the sliced regions {phi > d} are exact polygons and the level curves
{phi = d} are per-triangle chords; all quadrature below is closed form (the
chord rule is 2-point Gauss, exact for quadratics along the segment).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import backend
from .errors import MeshError
from .meshing import p1_gradients

# 2-point Gauss positions on [0, 1].
_G0 = 0.5 - 0.5 / np.sqrt(3.0)
_G1 = 0.5 + 0.5 / np.sqrt(3.0)


def _check_d(mesh, d, lower):
    if mesh.domain is not None:
        dmax = 0.9 * mesh.domain.d0
        if not lower <= d <= dmax + 1e-12:
            raise MeshError(f"slice depth d={d:g} outside [{lower:g}, 0.9*d0={dmax:g}]")
    elif d < lower:
        raise MeshError(f"slice depth d={d:g} below {lower:g}")


def clip_moments(mesh, svals, d):
    """Per-triangle (area, int s, int s^2) over {phi > d}; (T, 3) array."""
    return backend.clip_table(mesh.vertices, mesh.triangles, mesh.phi, svals, d)


def region_integral(mesh, element_density, d):
    """Integral over {phi > d} of a per-triangle-constant density."""
    _check_d(mesh, d, 0.0)
    dens = np.asarray(element_density, dtype=float)
    if dens.ndim == 0:
        dens = np.full(mesh.n_triangles, float(dens))
    if not np.all(np.isfinite(dens)):
        raise MeshError("non-finite element density")
    areas = backend.clip_table(mesh.vertices, mesh.triangles, mesh.phi, None, d)[:, 0]
    return float(np.dot(dens, areas))


@dataclass(eq=False)
class LevelCut:
    """The polyline {phi_h = d}: one chord per cut triangle."""

    mesh: object
    d: float
    tri: np.ndarray   # (C,) triangle indices
    w0: np.ndarray    # (C, 3) barycentric weights of first endpoint
    w1: np.ndarray    # (C, 3)

    @cached_property
    def coords(self):
        return self.mesh.vertices[self.mesh.triangles[self.tri]]

    @cached_property
    def endpoints(self):
        p0 = np.einsum("ci,cij->cj", self.w0, self.coords)
        p1 = np.einsum("ci,cij->cj", self.w1, self.coords)
        return p0, p1

    @cached_property
    def lengths(self):
        p0, p1 = self.endpoints
        return np.hypot(p1[:, 0] - p0[:, 0], p1[:, 1] - p0[:, 1])

    @cached_property
    def normals(self):
        """Euclidean unit normal -grad(phi_h)/|grad(phi_h)|, constant per chord."""
        g = p1_gradients(self.coords, self.mesh.phi[self.mesh.triangles[self.tri]])
        return -g / np.linalg.norm(g, axis=1, keepdims=True)

    @cached_property
    def gauss_points(self):
        """Two Gauss nodes per chord: a pair of (C, 2) arrays."""
        p0, p1 = self.endpoints
        return (p0 + _G0 * (p1 - p0), p0 + _G1 * (p1 - p0))

    def values_at_gauss(self, vertex_values):
        """Linear field sampled at the two Gauss nodes; pair of (C,) arrays."""
        v = vertex_values[self.mesh.triangles[self.tri]]
        wg0 = self.w0 + _G0 * (self.w1 - self.w0)
        wg1 = self.w0 + _G1 * (self.w1 - self.w0)
        return (np.einsum("ci,ci->c", wg0, v), np.einsum("ci,ci->c", wg1, v))

    def integrate(self, vals0, vals1):
        """Chord-rule sum of densities given at the two Gauss node sets."""
        return float(np.dot(0.5 * self.lengths, vals0 + vals1))


def level_cut(mesh, d):
    """Extract the level polyline {phi_h = d} (d = 0 yields the boundary)."""
    _check_d(mesh, d, 0.0)
    tri, w0, w1 = backend.level_chords(mesh.vertices, mesh.triangles, mesh.phi, d)
    return LevelCut(mesh=mesh, d=d, tri=tri, w0=w0, w1=w1)


def levelset_integral(mesh, segment_density, d):
    """Integral over {phi = d} of density(point, unit normal).

    The density callable receives batched (M, 2) points and (M, 2) normals
    and returns (M,) values; it is sampled at the two Gauss nodes of each
    chord.
    """
    if d <= 0.0:
        raise MeshError("levelset integral requires d > 0")
    _check_d(mesh, d, 0.0)
    cut = level_cut(mesh, d)
    if cut.tri.size == 0:
        return 0.0
    x0, x1 = cut.gauss_points
    v0 = np.asarray(segment_density(x0, cut.normals), dtype=float)
    v1 = np.asarray(segment_density(x1, cut.normals), dtype=float)
    return cut.integrate(v0, v1)
