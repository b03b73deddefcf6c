import hashlib
import json

import numpy as np
import pytest

from freqdecay import runner
from freqdecay.config import ExperimentConfig, parse_config
from freqdecay.errors import ConfigError

SAMPLE = """\
# sample experiment
domain = disk 1.0
h = 0.05
A = constant 1.0
G = constant_tensor 1 0 1
aks = off
datum = cos 1
datum = cos 3
d_grid = 0.0 0.6 7
steklov_m = 12
"""


class TestParse:
    def test_sample(self):
        cfg = parse_config(SAMPLE)
        assert cfg.domain_family == "disk"
        assert cfg.domain_params == (1.0,)
        assert cfg.data == [("cos", 1), ("cos", 3)]
        assert cfg.d_grid == (0.0, 0.6, 7)

    def test_negative_h_reported_with_constraint(self):
        with pytest.raises(ConfigError, match=r"h must be in \(0, d0\)"):
            parse_config(SAMPLE.replace("h = 0.05", "h = -0.1"))

    def test_all_errors_collected(self):
        bad = "domain = disk 1.0\nh = abc\nfoo = 1\ndatum = wedge 3\n"
        with pytest.raises(ConfigError) as err:
            parse_config(bad)
        lines = [ln for ln, _ in err.value.errors]
        assert 2 in lines and 3 in lines and 4 in lines

    def test_line_numbers_in_message(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config("domain = disk 1.0\nh = 0.05\nbogus_key = 3\n")

    def test_round_trip(self):
        cfg = parse_config(SAMPLE)
        again = parse_config(cfg.serialize())
        assert again.serialize() == cfg.serialize()
        assert again.__dict__ == cfg.__dict__

    def test_blended_round_trip(self):
        text = SAMPLE + "\nA = blended 0.3 | constant 1.2 | radial_bump 0.5 0 0 0.7\n"
        cfg = parse_config(text)
        assert cfg.conductivity[0] == "blended"
        again = parse_config(cfg.serialize())
        assert again.conductivity == cfg.conductivity

    def test_grid_spacing_validated(self):
        with pytest.raises(ConfigError, match="step"):
            parse_config(SAMPLE.replace("d_grid = 0.0 0.6 7",
                                        "d_grid = 0.0 0.6 100"))

    def test_penetration_validated_before_compute(self):
        text = SAMPLE + "penetration_n = 4\npenetration_nmax = 3\npenetration_d = 0.2\n"
        with pytest.raises(ConfigError, match="n < n_max"):
            parse_config(text)


def digest(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


@pytest.fixture(scope="module")
def cfg():
    return parse_config(SAMPLE)


class TestRunner:

    def test_mesh_subcommand(self, cfg, tmp_path):
        code = runner.run(cfg, "mesh", str(tmp_path), quiet=True)
        assert code == 0
        header = (tmp_path / "mesh.txt").read_text().splitlines()[0]
        assert header.startswith("vertices ")
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        assert manifest["outputs"][0]["path"] == "mesh.txt"

    def test_decay_and_oracle_agree(self, cfg, tmp_path):
        assert runner.run(cfg, "decay", str(tmp_path), quiet=True) == 0
        assert runner.run(cfg, "oracle", str(tmp_path), quiet=True) == 0
        got = np.genfromtxt(tmp_path / "decay_cos3.csv", delimiter=",", names=True)
        ref = np.genfromtxt(tmp_path / "oracle_cos3.csv", delimiter=",", names=True)
        assert abs(got["D"][0] / ref["D"][0] - 1) <= 0.03

    def test_verify_exit_zero_on_disk(self, cfg, tmp_path):
        assert runner.run(cfg, "verify", str(tmp_path), quiet=True) == 0
        rows = (tmp_path / "verify.csv").read_text().splitlines()
        assert rows[0].startswith("datum,phi,phi1,max_ratio_D")
        assert len(rows) == 3

    def test_csv_values_reparse_exactly(self, cfg, tmp_path):
        assert runner.run(cfg, "frequency", str(tmp_path), quiet=True) == 0
        lines = (tmp_path / "frequency.csv").read_text().splitlines()[1:]
        for line in lines:
            for tok in line.split(",")[1:]:
                v = float(tok)
                assert f"{v:.17g}" == tok

    def test_determinism(self, cfg, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert runner.run(cfg, "decay", str(a), quiet=True) == 0
        assert runner.run(cfg, "decay", str(b), quiet=True) == 0
        for name in ("decay_cos1.csv", "decay_cos3.csv"):
            assert digest(a / name) == digest(b / name)

    def test_plot_svg(self, cfg, tmp_path):
        assert runner.run(cfg, "plot", str(tmp_path), quiet=True) == 0
        svg = (tmp_path / "decay_cos3.svg").read_text()
        assert 'width="800" height="600"' in svg
        assert "polyline" in svg

    def test_steklov_csv(self, cfg, tmp_path):
        assert runner.run(cfg, "steklov", str(tmp_path), quiet=True) == 0
        rows = (tmp_path / "steklov.csv").read_text().splitlines()
        assert rows[0] == "k,mu_k"
        mu1 = float(rows[2].split(",")[1])
        assert mu1 == pytest.approx(1.0, rel=0.02)

    def test_penetration_csv(self, tmp_path):
        text = SAMPLE + "penetration_n = 2\npenetration_nmax = 12\npenetration_d = 0.2\n"
        pcfg = parse_config(text)
        assert runner.run(pcfg, "penetration", str(tmp_path), quiet=True) == 0
        rows = (tmp_path / "penetration.csv").read_text().splitlines()
        assert rows[0] == "n,d,xi,xi_times_dn"
        n, d, xi, prod = rows[1].split(",")
        assert float(prod) == pytest.approx(float(xi) * 2 * 0.2, rel=1e-12)

    def test_error_cleans_outputs(self, tmp_path):
        # steklov datum index beyond the basis triggers a stage failure
        text = SAMPLE + "datum = steklov 4000\n"
        cfg = parse_config(text)
        code = runner.run(cfg, "decay", str(tmp_path), quiet=True)
        assert code == 1
        assert not list(tmp_path.glob("*.csv"))
