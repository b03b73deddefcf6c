import numpy as np
import pytest

from freqdecay.errors import ProfileError
from freqdecay.oracle import brute_force_disk, disk_mode_values, disk_oracle


class TestClosedForms:
    def test_base_mode(self):
        rec = disk_oracle(1, 0.0)
        assert rec.D == pytest.approx(np.pi)
        assert rec.H == pytest.approx(np.pi)
        assert rec.N == pytest.approx(1.0)
        assert rec.Phi == 1.0

    def test_mode_three_half_depth(self):
        rec = disk_oracle(3, 0.5)
        assert rec.D == pytest.approx(3 * np.pi / 64)
        assert rec.H == pytest.approx(np.pi / 128)
        assert rec.N == pytest.approx(6.0)
        assert rec.F == pytest.approx(6.0)

    def test_vanishing_limit(self):
        rec = disk_oracle(2, 1.0 - 1e-9)
        assert rec.D < 1e-15 and rec.H < 1e-15 and rec.E < 1e-15
        assert rec.N > 1e8

    def test_self_consistency(self):
        for n in (1, 3, 6):
            for d in (0.0, 0.2, 0.7):
                rec = disk_oracle(n, d)
                assert rec.N * rec.H == pytest.approx(rec.D, rel=1e-12)
                assert rec.F * rec.D == pytest.approx(rec.T, rel=1e-12)
                assert rec.K * rec.E == pytest.approx(rec.H, rel=1e-12)
                assert rec.mu == rec.Phi == rec.Phi1

    def test_rejects_bad_input(self):
        with pytest.raises(ProfileError):
            disk_oracle(0, 0.1)
        with pytest.raises(ProfileError):
            disk_oracle(2, 1.0)


class TestBruteForce:
    def test_quadrature_matches_closed_forms(self):
        for n in range(1, 9):
            for d in (0.0, 0.3, 0.6):
                rec = disk_oracle(n, d)
                bf = brute_force_disk(n, d)
                assert bf["D"] == pytest.approx(rec.D, rel=1e-10)
                assert bf["E"] == pytest.approx(rec.E, rel=1e-10)
                assert bf["H"] == pytest.approx(rec.H, rel=1e-12)
                assert bf["T"] == pytest.approx(rec.T, rel=1e-12)

    def test_coarea_from_closed_forms(self):
        eps = 1e-7
        for n in (1, 4):
            for d in (0.1, 0.5):
                de = (disk_oracle(n, d + eps).E - disk_oracle(n, d - eps).E) / (2 * eps)
                assert -de == pytest.approx(disk_oracle(n, d).H, rel=1e-6)


class TestModeValues:
    def test_polar_form(self):
        pts = np.array([[0.5, 0.0], [0.0, 0.5], [0.3, 0.4]])
        v = disk_mode_values(pts, 2)
        r = np.hypot(pts[:, 0], pts[:, 1])
        th = np.arctan2(pts[:, 1], pts[:, 0])
        assert np.allclose(v, r**2 * np.cos(2 * th))
