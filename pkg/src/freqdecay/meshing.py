"""Conforming triangulations aligned with boundary-distance level sets.

The generator lays concentric inward offsets of the boundary curve through
the unique-projection tube (so distance level curves run along element
layers), halving the angular resolution as rings shrink, and fills the
remaining star-shaped core with radially scaled copies of the innermost
ring.  All construction is deterministic for fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import MeshError
from .geometry import project_points

_PROJECT_CHUNK = 16384
_MIN_RING_POINTS = 16


@dataclass(eq=False)
class Mesh:
    """Triangulation with per-vertex distance to the boundary.

    ``phi`` holds the Euclidean distance to the boundary curve, so the
    regions {phi > d} and level curves {phi = d} are recovered by linear
    interpolation inside triangles.  ``boundary_cycle`` traces the boundary
    once, counterclockwise.
    """

    vertices: np.ndarray      # (V, 2) float
    triangles: np.ndarray     # (T, 3) int32, counterclockwise
    boundary_cycle: np.ndarray  # (K,) int
    phi: np.ndarray           # (V,) float
    h: float
    domain: object = field(default=None, repr=False)

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_triangles(self):
        return self.triangles.shape[0]

    @cached_property
    def tri_areas(self):
        p = self.vertices[self.triangles]
        e1 = p[:, 1] - p[:, 0]
        e2 = p[:, 2] - p[:, 0]
        return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])

    @cached_property
    def tri_centroids(self):
        return self.vertices[self.triangles].mean(axis=1)

    @cached_property
    def boundary_edge_lengths(self):
        cyc = self.boundary_cycle
        p = self.vertices[cyc]
        q = self.vertices[np.roll(cyc, -1)]
        return np.linalg.norm(q - p, axis=1)

    def interpolate_gradient(self, values, rows=None):
        """Per-triangle constant gradient of a P1 field, (T, 2) or (len(rows), 2)."""
        tri = self.triangles if rows is None else self.triangles[rows]
        out = np.empty((tri.shape[0], 2))
        for lo in range(0, tri.shape[0], 1 << 19):
            sel = tri[lo: lo + (1 << 19)]
            out[lo: lo + (1 << 19)] = p1_gradients(self.vertices[sel], values[sel])
        return out


def p1_gradients(coords, values):
    """Gradient of the linear interpolant on each triangle.

    coords: (n, 3, 2) triangle vertex coordinates; values: (n, 3).
    """
    e1 = coords[:, 1] - coords[:, 0]
    e2 = coords[:, 2] - coords[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    d1 = values[:, 1] - values[:, 0]
    d2 = values[:, 2] - values[:, 0]
    gx = (d1 * e2[:, 1] - d2 * e1[:, 1]) / det
    gy = (d2 * e1[:, 0] - d1 * e2[:, 0]) / det
    return np.stack([gx, gy], axis=1)


class _Builder:
    def __init__(self):
        self.vertices = []
        self.triangles = []

    def add_ring(self, points):
        start = sum(len(v) for v in self.vertices)
        self.vertices.append(np.asarray(points, dtype=float))
        return np.arange(start, start + len(points))

    def add_vertex(self, point):
        start = sum(len(v) for v in self.vertices)
        self.vertices.append(np.asarray(point, dtype=float)[None, :])
        return start

    def strip(self, outer, inner, outer_pts=None, inner_pts=None):
        """Triangulate between two aligned rings of equal length.

        With point arrays given, each quad is split along its shorter
        diagonal (needed where rings are sheared against the rays, as in
        the scaled core fill of eccentric domains).
        """
        a, b = outer, inner
        an = np.roll(a, -1)
        bn = np.roll(b, -1)
        if outer_pts is None:
            pick_first = np.ones(len(a), dtype=bool)
        else:
            d1 = np.linalg.norm(np.roll(outer_pts, -1, axis=0) - inner_pts, axis=1)
            d2 = np.linalg.norm(outer_pts - np.roll(inner_pts, -1, axis=0), axis=1)
            pick_first = d1 <= d2
        for j in range(len(a)):
            if pick_first[j]:
                self.triangles.append((a[j], an[j], b[j]))
                self.triangles.append((an[j], bn[j], b[j]))
            else:
                self.triangles.append((a[j], an[j], bn[j]))
                self.triangles.append((a[j], bn[j], b[j]))

    def transition(self, outer, inner):
        """Triangulate outer ring (2m points) against inner ring (m points)."""
        a, b = outer, inner
        m = len(b)
        for j in range(m):
            a0, a1, a2 = a[2 * j], a[2 * j + 1], a[(2 * j + 2) % (2 * m)]
            b0, b1 = b[j], b[(j + 1) % m]
            self.triangles.append((a0, a1, b0))
            self.triangles.append((a1, a2, b1))
            self.triangles.append((a1, b1, b0))

    def fan(self, ring, center):
        r = ring
        rn = np.roll(r, -1)
        for j in range(len(r)):
            self.triangles.append((r[j], rn[j], center))

    def connect(self, outer, inner, outer_pts=None, inner_pts=None, choose=False):
        if len(inner) == len(outer):
            if choose:
                self.strip(outer, inner, outer_pts, inner_pts)
            else:
                self.strip(outer, inner)
        elif 2 * len(inner) == len(outer):
            self.transition(outer, inner)
        else:
            raise MeshError("ring sizes must match or halve")

    def finish(self):
        v = np.concatenate(self.vertices, axis=0)
        t = np.asarray(self.triangles, dtype=np.int32)
        return v, t


def _max_spacing(points):
    d = points - np.roll(points, -1, axis=0)
    return float(np.max(np.hypot(d[:, 0], d[:, 1])))


def _maybe_halve(stride, count, make_points, h):
    """Double the angular stride when spacing allows (at most once per ring,
    so consecutive rings stay strip- or 2:1-transition compatible)."""
    if count % 2 == 0 and count >= 2 * _MIN_RING_POINTS \
            and _max_spacing(make_points(stride)) <= 0.5 * h:
        stride *= 2
        count //= 2
    return stride, count


def build_mesh(domain, h):
    """Triangulate the domain with target edge length h (max edge 1.5 h)."""
    if not 0.0 < h < domain.d0:
        raise MeshError(f"h={h:g} outside (0, d0={domain.d0:g})")

    perimeter = domain.perimeter()
    theta_all = domain.curvature(np.linspace(0, 2 * np.pi, 4096, endpoint=False))
    kappa_min = float(np.min(theta_all))
    # Concave sections stretch inward offsets; refine the angular sampling
    # so stretched spacings still meet the edge-length bound.
    growth = 1.0 + domain.d0 * max(0.0, -kappa_min)
    h_ang = h / growth

    k0 = max(_MIN_RING_POINTS, 2 ** int(np.ceil(np.log2(perimeter / h_ang))))
    base_theta = domain.arclength_params(k0)
    normals = domain.outward_normal(base_theta)
    curve_pts = domain.curve(base_theta)

    builder = _Builder()
    boundary_ids = builder.add_ring(curve_pts)

    # Rings sit at half-offset depths (i - 1/2) h so that round slice depths
    # fall mid-layer: cut triangles then straddle the level curve and their
    # one-sided P1 gradients sample it at second order.
    n_tube = int(np.floor(domain.d0 / h + 0.5 - 1e-12))
    stride, count = 1, k0
    prev_ids = boundary_ids
    last_pts = curve_pts
    for i in range(1, n_tube + 1):
        depth = (i - 0.5) * h

        def ring_points(s, depth=depth):
            return curve_pts[::s] - depth * normals[::s]

        stride, count = _maybe_halve(stride, count, ring_points, h)
        last_pts = ring_points(stride)
        ids = builder.add_ring(last_pts)
        builder.connect(prev_ids, ids)
        prev_ids = ids

    # Core fill: radially scaled copies of the innermost ring.  Rays need
    # not be normal to the rings here, so the step is tightened and strip
    # quads are split along their shorter diagonal.
    q = last_pts
    rho_max = float(np.max(np.hypot(q[:, 0], q[:, 1])))
    m_core = max(1, int(np.ceil(rho_max / (0.75 * h))))
    core_stride, core_count = 1, len(q)
    prev_pts = q
    for k in range(1, m_core):
        scale = (m_core - k) / m_core

        def ring_points(s, scale=scale):
            return scale * q[::s]

        core_stride, core_count = _maybe_halve(core_stride, core_count, ring_points, h)
        pts = ring_points(core_stride)
        ids = builder.add_ring(pts)
        equal = len(prev_ids) == len(ids)
        builder.connect(prev_ids, ids,
                        outer_pts=prev_pts if equal else None,
                        inner_pts=pts if equal else None,
                        choose=equal)
        prev_ids, prev_pts = ids, pts
    center = builder.add_vertex(np.zeros(2))
    builder.fan(prev_ids, center)

    vertices, triangles = builder.finish()

    # Distance to the boundary at every vertex; boundary ring is exact.
    phi = np.empty(vertices.shape[0])
    phi[: len(boundary_ids)] = 0.0
    interior = np.arange(len(boundary_ids), vertices.shape[0])
    for lo in range(0, interior.size, _PROJECT_CHUNK):
        sel = interior[lo: lo + _PROJECT_CHUNK]
        phi[sel] = project_points(domain, vertices[sel])[0]

    mesh = Mesh(vertices=vertices, triangles=triangles,
                boundary_cycle=np.asarray(boundary_ids), phi=phi, h=h, domain=domain)
    _validate(mesh)
    return mesh


def _validate(mesh):
    areas = mesh.tri_areas
    if np.any(areas < 1e-14 * mesh.h ** 2):
        raise MeshError(f"degenerate triangle: min area {areas.min():.3e} "
                        f"< 1e-14*h^2 = {1e-14 * mesh.h**2:.3e}")
    p = mesh.vertices[mesh.triangles]
    emax = 0.0
    for i in range(3):
        e = p[:, (i + 1) % 3] - p[:, i]
        emax = max(emax, float(np.max(np.hypot(e[:, 0], e[:, 1]))))
    if emax > 1.5 * mesh.h * (1.0 + 1e-9):
        raise MeshError(f"edge length {emax:.6g} exceeds 1.5*h = {1.5 * mesh.h:.6g}")
    if np.any(mesh.phi[len(mesh.boundary_cycle):] <= 0.0):
        raise MeshError("interior vertex with non-positive distance")


def write_mesh_text(mesh, path):
    """Plain-text mesh export; reals carry 17 significant digits."""
    with open(path, "w") as f:
        f.write(f"vertices {mesh.n_vertices} triangles {mesh.n_triangles} "
                f"boundary {len(mesh.boundary_cycle)} h {mesh.h:.17g}\n")
        for (x, y), p in zip(mesh.vertices, mesh.phi):
            f.write(f"{x:.17g} {y:.17g} {p:.17g}\n")
        for i, j, k in mesh.triangles:
            f.write(f"{i} {j} {k}\n")
        for i in mesh.boundary_cycle:
            f.write(f"{i}\n")


def read_mesh_text(path):
    with open(path) as f:
        header = f.readline().split()
        nv, nt, nb = int(header[1]), int(header[3]), int(header[5])
        h = float(header[7])
        rows = [f.readline().split() for _ in range(nv)]
        vertices = np.array([[float(r[0]), float(r[1])] for r in rows])
        phi = np.array([float(r[2]) for r in rows])
        triangles = np.array([f.readline().split() for _ in range(nt)], dtype=np.int32)
        boundary = np.array([int(f.readline()) for _ in range(nb)])
    return Mesh(vertices=vertices, triangles=triangles, boundary_cycle=boundary,
                phi=phi, h=h, domain=None)
