import numpy as np
import pytest

from freqdecay.errors import MeshError
from freqdecay.slicing import level_cut, levelset_integral, region_integral


def ones_density(points, normals):
    return np.ones(len(points))


class TestRegionIntegral:
    def test_full_region_is_mesh_area(self, disk_coarse):
        mesh, _ = disk_coarse
        total = region_integral(mesh, np.ones(mesh.n_triangles), 0.0)
        assert total == pytest.approx(mesh.tri_areas.sum(), rel=1e-12)

    def test_half_depth_disk(self, disk_fine):
        mesh = disk_fine["mesh"]
        got = region_integral(mesh, np.ones(mesh.n_triangles), 0.5)
        assert got == pytest.approx(np.pi * 0.25, rel=5e-3)

    def test_depth_beyond_max_is_zero(self, disk_coarse):
        mesh, _ = disk_coarse
        # stay within the 0.9*d0 guard but above every vertex phi
        d = 0.9 * mesh.domain.d0
        sub = region_integral(mesh, np.ones(mesh.n_triangles), d)
        assert sub < np.pi * (1 - d) ** 2 * 1.2

    def test_monotone_in_depth(self, disk_coarse):
        mesh, _ = disk_coarse
        dens = np.ones(mesh.n_triangles)
        vals = [region_integral(mesh, dens, d) for d in np.linspace(0, 0.8, 17)]
        assert all(a >= b - 1e-14 for a, b in zip(vals, vals[1:]))

    def test_rejects_out_of_range(self, disk_coarse):
        mesh, _ = disk_coarse
        with pytest.raises(MeshError):
            region_integral(mesh, np.ones(mesh.n_triangles), 0.95)


class TestLevelsetIntegral:
    def test_circumference(self, disk_fine):
        mesh = disk_fine["mesh"]
        got = levelset_integral(mesh, ones_density, 0.5)
        assert got == pytest.approx(np.pi, rel=1e-2)

    def test_unit_square_density_matches_ones(self, disk_coarse):
        mesh, _ = disk_coarse
        u2 = levelset_integral(mesh, lambda p, n: np.ones(len(p)) ** 2, 0.4)
        one = levelset_integral(mesh, ones_density, 0.4)
        assert u2 == pytest.approx(one, rel=1e-14)

    def test_normals_point_outward(self, disk_coarse):
        mesh, _ = disk_coarse
        cut = level_cut(mesh, 0.4)
        p0, p1 = cut.endpoints
        mid = 0.5 * (p0 + p1)
        radial = mid / np.linalg.norm(mid, axis=1, keepdims=True)
        assert np.einsum("ni,ni->n", cut.normals, radial).min() > 0.9

    def test_deep_cut_small_positive(self, disk_coarse):
        mesh, _ = disk_coarse
        d = 0.9 * mesh.domain.d0 - 1e-3
        val = levelset_integral(mesh, ones_density, d)
        assert 0.0 < val < 2 * np.pi * (1 - d) * 1.3

    def test_requires_positive_depth(self, disk_coarse):
        mesh, _ = disk_coarse
        with pytest.raises(MeshError):
            levelset_integral(mesh, ones_density, 0.0)

    def test_cut_at_zero_recovers_boundary(self, disk_coarse):
        mesh, _ = disk_coarse
        cut = level_cut(mesh, 0.0)
        total = float(cut.lengths.sum())
        assert total == pytest.approx(mesh.boundary_edge_lengths.sum(), rel=1e-12)


class TestCoarea:
    def test_discrete_coarea_identity(self, disk_fine):
        """d/dd region integral = -levelset integral of the same density."""
        mesh = disk_fine["mesh"]
        cent = mesh.tri_centroids
        dens_tri = 1.0 + cent[:, 0] ** 2

        def dens_pts(points, normals):
            return 1.0 + points[:, 0] ** 2

        d, delta = 0.30, 1e-4
        lhs = (region_integral(mesh, dens_tri, d + delta)
               - region_integral(mesh, dens_tri, d - delta)) / (2 * delta)
        rhs = -levelset_integral(mesh, dens_pts, d)
        assert lhs == pytest.approx(rhs, rel=1e-3)
