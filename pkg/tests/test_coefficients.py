import numpy as np
import pytest

from freqdecay import fem
from freqdecay.coefficients import (aks_modify, blended, conformal_rescale,
                                    constant_scalar, constant_tensor, linear_ramp,
                                    metric_quantities, radial_bump,
                                    reduce_to_scalar, rotated_anisotropic)
from freqdecay.errors import FieldError
from freqdecay.geometry import project_points


def rot(deg):
    t = np.deg2rad(deg)
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


class TestMetricQuantities:
    def test_identity(self):
        mq = metric_quantities(np.eye(2), np.array([1.0, 0.0]))
        assert mq.sqrt_g == pytest.approx(1.0)
        assert mq.alpha == pytest.approx(1.0)
        assert np.allclose(mq.nu_M, [1.0, 0.0])

    def test_isotropic_scaling(self):
        mq = metric_quantities(4.0 * np.eye(2), np.array([0.0, 1.0]))
        assert mq.sqrt_g == pytest.approx(4.0)
        assert np.allclose(mq.G_inv, np.eye(2) / 4.0)
        assert mq.alpha == pytest.approx(2.0)
        assert np.allclose(mq.nu_M, [0.0, 0.5])
        # unit metric norm of the metric normal
        g = 4.0 * np.eye(2)
        assert mq.nu_M @ g @ mq.nu_M == pytest.approx(1.0, abs=1e-12)

    def test_anisotropic(self):
        mq = metric_quantities(np.diag([4.0, 1.0]), np.array([1.0, 0.0]))
        assert mq.alpha == pytest.approx(2.0)
        assert np.allclose(mq.nu_M, [0.5, 0.0])

    def test_rejects_non_spd(self):
        with pytest.raises(FieldError):
            metric_quantities(np.diag([1.0, -2.0]), np.array([1.0, 0.0]))
        with pytest.raises(FieldError):
            metric_quantities(np.array([[1.0, 3.0], [3.0, 1.0]]),
                              np.array([1.0, 0.0]))


class TestCatalog:
    def test_spectral_bounds_invariant(self, rng):
        fields = [constant_scalar(2.0), radial_bump(0.5, 0.2, 0.1, 0.7),
                  linear_ramp(0.9, 0.3), rotated_anisotropic(2.0, 0.5, 30.0),
                  blended(0.4, constant_scalar(1.0),
                          radial_bump(-0.4, 0.0, 0.0, 0.5))]
        pts = rng.uniform(-2.0, 2.0, size=(200, 2))
        for f in fields:
            m = f.tensor_at(pts)
            eig = np.linalg.eigvalsh(m)
            assert eig.min() >= f.lam * (1 - 1e-9)
            assert eig.max() <= (1 + 1e-9) / f.lam

    def test_lipschitz_bound_dominates_grid_estimate(self):
        f = radial_bump(0.8, 0.0, 0.0, 0.5)
        xs = np.linspace(-2.5, 2.5, 64)
        gx, gy = np.meshgrid(xs, xs, indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
        vals = f.scalar_at(pts).reshape(64, 64)
        step = xs[1] - xs[0]
        fd = max(np.abs(np.diff(vals, axis=0)).max(),
                 np.abs(np.diff(vals, axis=1)).max()) / step
        assert fd <= 1.1 * f.lipschitz_bound

    def test_linear_ramp_clamps(self):
        f = linear_ramp(5.0, 0.25)
        v = f.scalar_at(np.array([[-2.0, 0.0], [2.0, 0.0], [0.0, 0.0]]))
        assert v[0] == pytest.approx(0.25)
        assert v[1] == pytest.approx(4.0)
        assert v[2] == pytest.approx(1.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(FieldError):
            radial_bump(-1.5, 0.0, 0.0, 0.5)


class TestReduce:
    def test_identity_pair(self, rng):
        g1, gt = reduce_to_scalar(constant_tensor(1, 0, 1),
                                  constant_tensor(1, 0, 1))
        pts = rng.uniform(-1, 1, size=(20, 2))
        assert np.allclose(g1.scalar_at(pts), 1.0)
        assert np.allclose(gt.tensor_at(pts), np.eye(2))

    def test_diagonal_conductivity(self, rng):
        g1, gt = reduce_to_scalar(constant_tensor(2.0, 0.0, 0.5),
                                  constant_tensor(1, 0, 1))
        pts = rng.uniform(-1, 1, size=(20, 2))
        assert np.allclose(g1.scalar_at(pts), 1.0, atol=1e-14)
        assert np.allclose(gt.tensor_at(pts), np.diag([0.5, 2.0]), atol=1e-14)

    def test_rotated_conductivity(self, rng):
        r = rot(30.0)
        g1, gt = reduce_to_scalar(rotated_anisotropic(2.0, 0.5, 30.0),
                                  constant_tensor(1, 0, 1))
        pts = rng.uniform(-1, 1, size=(20, 2))
        assert np.allclose(g1.scalar_at(pts), 1.0, atol=1e-12)
        expect = r @ np.diag([0.5, 2.0]) @ r.T
        assert np.allclose(gt.tensor_at(pts), expect, atol=1e-12)

    def test_stiffness_invariance(self, disk_coarse):
        mesh, _ = disk_coarse
        a = rotated_anisotropic(2.0, 0.5, 30.0)
        euclid = constant_tensor(1, 0, 1)
        g1, gt = reduce_to_scalar(a, euclid, domain=mesh.domain)
        k_a = fem.assemble(mesh, a, euclid).K
        k_r = fem.assemble(mesh, g1, gt).K
        diff = abs(k_a - k_r).max()
        assert diff <= 1e-12 * abs(k_a).max()


class TestConformal:
    def test_identity_factor(self, disk_coarse, rng):
        mesh, _ = disk_coarse
        a = constant_scalar(1.0)
        g = constant_tensor(1, 0, 1)
        a2, g2 = conformal_rescale(a, g, constant_scalar(1.0))
        pts = rng.uniform(-1, 1, size=(20, 2))
        assert a2 is a
        assert np.allclose(g2.tensor_at(pts), np.eye(2))

    def test_constant_two(self, rng):
        a = constant_scalar(1.0)
        a2, g2 = conformal_rescale(a, constant_tensor(1, 0, 1),
                                   constant_scalar(2.0))
        pts = rng.uniform(-1, 1, size=(20, 2))
        assert np.allclose(g2.tensor_at(pts), 2.0 * np.eye(2))
        assert a2 is a

    def test_stiffness_invariance(self, disk_coarse):
        mesh, mats = disk_coarse
        a = constant_scalar(1.0)
        g = constant_tensor(1, 0, 1)
        a2, g2 = conformal_rescale(a, g, radial_bump(0.5, 0.2, 0.1, 0.7),
                                   domain=mesh.domain)
        k2 = fem.assemble(mesh, a2, g2).K
        assert abs(k2 - mats.K).max() <= 1e-12 * abs(mats.K).max()


class TestAks:
    def test_euclidean_fixed_point(self, disk):
        gt = aks_modify(disk, constant_tensor(1, 0, 1))
        pts = np.stack([np.linspace(0.05, 0.95, 40), np.zeros(40)], axis=1)
        assert np.abs(gt.tensor_at(pts) - np.eye(2)).max() <= 1e-12

    def test_isotropic_scaling_in_tube(self, disk):
        gt = aks_modify(disk, constant_tensor(4, 0, 4))
        pts = np.stack([np.linspace(0.6, 0.99, 20), np.zeros(20)], axis=1)
        assert np.abs(gt.tensor_at(pts) - np.eye(2)).max() <= 1e-12

    def test_boundary_value_anisotropic(self, disk):
        gt = aks_modify(disk, constant_tensor(4, 0, 1))
        val = gt.tensor_at(np.array([[1.0, 0.0]]))[0]
        assert np.allclose(val, np.diag([1.0, 0.25]), atol=1e-10)

    def test_unit_metric_gradient_in_half_tube(self, disk, rng):
        gt = aks_modify(disk, constant_tensor(4, 0, 1))
        r = np.sqrt(rng.uniform((1 - 0.449) ** 2, (1 - 1e-3) ** 2, 256))
        th = rng.uniform(0, 2 * np.pi, 256)
        pts = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
        phi, grad, _, _ = project_points(disk, pts)
        assert (phi < 0.45).all()
        ginv = gt.inverse_at(pts)
        norms = np.sqrt(np.einsum("nij,ni,nj->n", ginv, grad, grad))
        assert np.abs(norms - 1.0).max() <= 1e-10
