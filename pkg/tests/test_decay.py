import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freqdecay import decay, fem, oracle, spectral
from freqdecay.coefficients import constant_scalar, constant_tensor, radial_bump
from freqdecay.errors import ProfileError


@pytest.fixture(scope="module")
def disk_profiles(disk_fine, euclid_fields):
    """Profiles, frequencies for cos modes 1..4 at h = 0.02."""
    mesh, mats = disk_fine["mesh"], disk_fine["mats"]
    gamma, met = euclid_fields
    grid = np.round(np.arange(0.0, 0.61, 0.1), 12)
    out = {}
    for n in range(1, 5):
        f = fem.fourier_datum(mesh, n)
        u = fem.solve_dirichlet(mats, mesh, f)
        prof = decay.decay_profile(mesh, gamma, met, u, grid)
        phi = spectral.frequency(mats, mesh, f, dtn=disk_fine["dtn"])
        phi1 = spectral.low_frequency(disk_fine["basis"], mats.B_e_bb, f)
        out[n] = (prof, phi, phi1)
    return out


class TestHFun:
    def test_branch_values(self):
        assert decay.h_fun(0.0) == 1.0
        assert decay.h_fun(1.0) == pytest.approx(np.exp(-1.0), rel=1e-15)
        assert decay.h_fun(1.0 + 1e-12) == pytest.approx(np.exp(-1.0), rel=1e-9)
        assert decay.h_fun(2.0) == pytest.approx(1.0 / (2.0 * np.e), rel=1e-15)

    def test_rejects_negative(self):
        with pytest.raises(ProfileError):
            decay.h_fun(-0.1)

    @settings(max_examples=50, deadline=None)
    @given(s1=st.floats(0, 20), s2=st.floats(0, 20))
    def test_strictly_decreasing(self, s1, s2):
        if s1 < s2:
            assert decay.h_fun(s1) > decay.h_fun(s2)


class TestProfile:
    def test_matches_oracle(self, disk_profiles):
        for n, (prof, _, _) in disk_profiles.items():
            for i, d in enumerate(prof.d_grid):
                rec = oracle.disk_oracle(n, float(d))
                assert prof.D[i] == pytest.approx(rec.D, rel=0.03)
                assert prof.H[i] == pytest.approx(rec.H, rel=0.03)
                assert prof.N[i] == pytest.approx(rec.N, rel=0.03)
                assert prof.E[i] == pytest.approx(rec.E, rel=0.03)
                assert prof.K[i] == pytest.approx(rec.K, rel=0.03)
                assert prof.K1[i] == pytest.approx(rec.K1, rel=0.03)
                assert prof.T[i] == pytest.approx(rec.T, rel=0.08)

    def test_constant_datum_flagged(self, disk_fine, euclid_fields):
        mesh, mats = disk_fine["mesh"], disk_fine["mats"]
        u = np.ones(mesh.n_vertices)
        with pytest.raises(ProfileError, match="D"):
            decay.decay_profile(mesh, *euclid_fields, u, np.array([0.0, 0.1]))

    def test_cauchy_schwarz(self, disk_profiles):
        for prof, _, _ in disk_profiles.values():
            assert (prof.F >= prof.N * (1 - 1e-8)).all()

    def test_d_e_non_increasing(self, disk_profiles):
        for prof, _, _ in disk_profiles.values():
            assert (np.diff(prof.D) <= 1e-12).all()
            assert (np.diff(prof.E) <= 1e-12).all()

    def test_k1_below_k(self, disk_profiles):
        for prof, _, _ in disk_profiles.values():
            assert (prof.K1 <= prof.K * (1 + 1e-12)).all()

    def test_scaled_mode_ratio(self, disk_profiles):
        for n, (prof, _, _) in disk_profiles.items():
            assert np.abs(prof.N * (1 - prof.d_grid) / n - 1).max() <= 0.02

    def test_frequency_links(self, disk_profiles):
        for n, (prof, phi, phi1) in disk_profiles.items():
            assert prof.N[0] == pytest.approx(phi, rel=0.02)
            assert prof.K[0] >= 0.5 * phi1
            assert prof.E[0] * phi1 / prof.H[0] <= 1.2

    def test_catalog_pair_links(self, disk_fine):
        mesh, mats_e = disk_fine["mesh"], disk_fine["mats"]
        gamma = radial_bump(0.5, 0.2, 0.1, 0.7)
        met = constant_tensor(1, 0, 1)
        mats = fem.assemble(mesh, gamma, met)
        grid = np.round(np.arange(0.0, 0.61, 0.1), 12)
        f = fem.fourier_datum(mesh, 3)
        u = fem.solve_dirichlet(mats, mesh, f)
        prof = decay.decay_profile(mesh, gamma, met, u, grid)
        phi1 = spectral.low_frequency(disk_fine["basis"], mats_e.B_e_bb, f)
        assert (prof.F >= prof.N * (1 - 1e-8)).all()
        assert prof.K[0] >= 0.5 * phi1
        assert prof.E[0] * phi1 / prof.H[0] <= 1.2

    def test_grid_validation(self, disk_fine, euclid_fields):
        mesh, mats = disk_fine["mesh"], disk_fine["mats"]
        u = fem.solve_dirichlet(mats, mesh, fem.fourier_datum(mesh, 2))
        with pytest.raises(ProfileError, match="step"):
            decay.decay_profile(mesh, *euclid_fields, u, np.array([0.0, 0.01]))
        with pytest.raises(ProfileError, match="outside"):
            decay.decay_profile(mesh, *euclid_fields, u, np.array([0.0, 0.85]))


class TestResiduals:
    def test_requires_uniform_fine_grid(self, disk_profiles):
        prof = disk_profiles[1][0]  # step 0.1 > d0/100
        with pytest.raises(ProfileError):
            decay.derivative_residuals(prof)

    def test_coarea_residual_small(self, disk_fine, euclid_fields):
        # step = 2h = 0.04 exceeds d0/100; relax spacing only for this check
        mesh, mats = disk_fine["mesh"], disk_fine["mats"]
        u = fem.solve_dirichlet(mats, mesh, fem.fourier_datum(mesh, 2))
        grid = np.round(np.arange(0.1, 0.5001, 0.008), 12)
        prof = decay.decay_profile(mesh, *euclid_fields, u, grid,
                                   enforce_spacing=False)
        res = decay.derivative_residuals(prof)
        assert res.e.max() <= 5e-3


class TestVerify:
    def test_disk_sweep_conservative_constants(self, disk_profiles):
        rep = decay.verify_decay(list(disk_profiles.values()))
        assert rep.max_ratio_D <= 1.05
        assert rep.max_ratio_H <= 1.05
        assert rep.pass_D and rep.pass_H and rep.pass_cor
        assert rep.fitted_C2 == 0.0 and rep.fitted_c2 == 1.0
        assert rep.fitted_C3 == 0.0 and rep.fitted_c3 == 1.0

    def test_monotone_rate(self, disk_profiles):
        for prof, _, _ in disk_profiles.values():
            assert decay.n_monotone_rate(prof) <= 3.0


class TestPenetration:
    def test_disk_closed_form(self, disk_fine, euclid_fields):
        mesh = disk_fine["mesh"]
        gamma, met = euclid_fields
        for n, d in ((2, 0.2), (3, 0.1)):
            xi = decay.penetration(mesh, gamma, met, n, d,
                                   matrices=disk_fine["mats"])
            assert xi == pytest.approx((1 - d) ** (2 * n + 2), rel=0.05)
            assert xi <= 1.0

    def test_preconditions(self, disk_coarse, euclid_fields):
        mesh, mats = disk_coarse
        gamma, met = euclid_fields
        with pytest.raises(ProfileError, match="n < n_max"):
            decay.penetration(mesh, gamma, met, 4, 0.2, n_max=4, matrices=mats)
        with pytest.raises(ProfileError, match="resolution"):
            decay.penetration(mesh, gamma, met, 30, 0.2, matrices=mats)
        with pytest.raises(ProfileError, match="depth"):
            decay.penetration(mesh, gamma, met, 2, 0.95, n_max=10, matrices=mats)
