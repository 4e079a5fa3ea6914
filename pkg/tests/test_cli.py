"""CLI contract: config parsing, records, CSV formats, exit codes, determinism."""

import numpy as np
import pytest

from conftest import MU
from sairs_lab.cli import main
from sairs_lab.config import parse_config
from sairs_lab.errors import ConfigError
from sairs_lab.model import ModelParams, endemic_equilibrium, r0_closed_form

PARAM_BLOCK = """
params.beta_a = {beta_a}
params.beta_i = {beta_i}
params.alpha = {alpha}
params.delta_a = {delta_a}
params.delta_i = {delta_i}
params.gamma = {gamma}
params.nu = {nu}
params.mu = {mu}
"""


def write_params(tmp_path, name="run.cfg", extra="", **rates):
    defaults = dict(beta_a=0.5, beta_i=0.9, alpha=0.9, delta_a=0.1, delta_i=0.51,
                    gamma=0.02, nu=0.01, mu=MU)
    defaults.update(rates)
    path = tmp_path / name
    path.write_text(PARAM_BLOCK.format(**defaults) + extra, encoding="utf-8")
    return path, ModelParams(**defaults)


def record_fields(line):
    return dict(pair.split("=", 1) for pair in line.strip().split())


class TestConfigParsing:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("params.beta_x = 1.0")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("regime.boundary_tol = 1e-9\nregime.boundary_tol = 1e-8")

    def test_incomplete_params_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("params.beta_a = 0.5")

    def test_bad_number_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("regime.boundary_tol = fast")

    def test_comments_and_blanks_ignored(self):
        cfg = parse_config("# a comment\n\nregime.boundary_tol = 1e-8\n")
        assert cfg.boundary_tol == 1e-8
        assert cfg.params is None

    def test_family_needs_both_keys(self):
        with pytest.raises(ConfigError):
            parse_config("family.param = gamma")

    def test_initial_block_all_or_none(self):
        with pytest.raises(ConfigError):
            parse_config("initial.s = 0.5")
        cfg = parse_config("initial.s = 0.5\ninitial.a = 0.2\ninitial.i = 0.1\ninitial.r = 0.2")
        assert cfg.initial.s == 0.5

    def test_family_param_validated(self, tmp_path):
        with pytest.raises(ConfigError):
            parse_config("family.param = sigma\nfamily.values = 0.1")


class TestRecordCommands:
    def test_r0_no_transmission(self, tmp_path, capsys):
        path, _ = write_params(tmp_path, beta_a=0.0, beta_i=0.0)
        assert main(["r0", "--config", str(path)]) == 0
        fields = record_fields(capsys.readouterr().out)
        assert float(fields["r0"]) == 0.0
        assert fields["regime"] == "DiseaseFree"
        assert set(fields) >= {"h0", "h1", "h2", "h3", "h4"}

    def test_r0_without_vaccination_matches_reduced_formula(self, tmp_path, capsys):
        path, params = write_params(tmp_path, nu=0.0)
        assert main(["r0", "--config", str(path)]) == 0
        fields = record_fields(capsys.readouterr().out)
        expected = (params.beta_a + params.alpha * params.beta_i / (params.delta_i + params.mu)) / (
            params.alpha + params.delta_a + params.mu
        )
        assert float(fields["r0"]) == pytest.approx(expected, rel=1e-15)

    def test_r0_transmission_corner_is_endemic(self, tmp_path, capsys):
        path, _ = write_params(
            tmp_path, beta_a=0.8, beta_i=0.95, alpha=0.15, delta_a=0.1, delta_i=0.15, gamma=0.01
        )
        assert main(["r0", "--config", str(path)]) == 0
        assert record_fields(capsys.readouterr().out)["regime"] == "Endemic"

    def test_equilibria_subcritical_prints_none(self, tmp_path, capsys):
        path, params = write_params(tmp_path, beta_a=0.01, beta_i=0.01)
        assert r0_closed_form(params) < 1.0
        assert main(["equilibria", "--config", str(path)]) == 0
        fields = record_fields(capsys.readouterr().out)
        assert fields["endemic"] == "none"
        assert float(fields["dfe_residual"]) <= 1e-14

    def test_equilibria_novax_dfe(self, tmp_path, capsys):
        path, _ = write_params(tmp_path, nu=0.0, beta_a=0.01, beta_i=0.01)
        assert main(["equilibria", "--config", str(path)]) == 0
        fields = record_fields(capsys.readouterr().out)
        assert float(fields["dfe_s"]) == 1.0

    def test_equilibria_endemic_residual(self, tmp_path, capsys):
        path, _ = write_params(tmp_path)
        assert main(["equilibria", "--config", str(path)]) == 0
        fields = record_fields(capsys.readouterr().out)
        assert float(fields["ee_residual"]) <= 1e-10

    def test_stability_record(self, tmp_path, capsys):
        path, _ = write_params(tmp_path)
        assert main(["stability", "--config", str(path)]) == 0
        fields = record_fields(capsys.readouterr().out)
        assert fields["dfe_stable"] == "false"
        assert fields["ee_stable"] == "true"

    def test_certificate_record(self, tmp_path, capsys):
        extra = "certificate.epsilon = 0.004\nintegration.t_max = 10\nintegration.sample_dt = 1\n"
        path, _ = write_params(tmp_path, extra=extra)
        assert main(["certificate", "--config", str(path)]) == 0
        fields = record_fields(capsys.readouterr().out)
        assert fields["applicable"] == "true" and fields["certified"] == "true"
        assert all(float(fields[f"hbar{k}"]) < 0.0 for k in (1, 2, 3, 4))


class TestSimulate:
    def test_requires_out(self, tmp_path):
        path, _ = write_params(tmp_path)
        assert main(["simulate", "--config", str(path)]) == 2

    def test_constant_at_disease_free_start(self, tmp_path, capsys):
        extra = (
            "initial.s = 0.66710097719869699\ninitial.a = 0\ninitial.i = 0\n"
            "initial.r = 0.33289902280130301\n"
            "integration.t_max = 300\nintegration.sample_dt = 1\n"
        )
        path, _ = write_params(tmp_path, extra=extra)
        out = tmp_path / "traj.csv"
        assert main(["simulate", "--config", str(path), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t,S,A,I,R"
        data = np.loadtxt(lines[1:], delimiter=",")
        assert np.all(np.diff(data[:, 0]) > 0.0)
        assert np.max(np.abs(data[:, 1] - data[0, 1])) <= 1e-9

    def test_final_row_reaches_endemic_point(self, tmp_path):
        extra = "integration.sample_dt = 1\n"
        path, params = write_params(
            tmp_path, beta_a=0.8, beta_i=0.95, alpha=0.15, delta_a=0.125,
            delta_i=0.15, gamma=0.05, extra=extra,
        )
        out = tmp_path / "traj.csv"
        assert main(["simulate", "--config", str(path), "--out", str(out)]) == 0
        data = np.loadtxt(out.read_text().splitlines()[1:], delimiter=",")
        star = endemic_equilibrium(params)
        target = np.array([star.s, star.a, star.i, 1 - star.s - star.a - star.i])
        assert np.max(np.abs(data[-1, 1:] - target)) <= 1e-6

    def test_roundtrip_and_determinism(self, tmp_path):
        extra = "integration.t_max = 50\nintegration.sample_dt = 1\n"
        path, params = write_params(tmp_path, extra=extra)
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(["simulate", "--config", str(path), "--out", str(out1)]) == 0
        assert main(["simulate", "--config", str(path), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()
        assert b"\r" not in out1.read_bytes()
        # 17 significant digits round-trip doubles exactly.
        from sairs_lab.integrator import integrate
        from sairs_lab.config import load_config
        cfg = load_config(path)
        trajectory = integrate(params, cfg.initial, cfg.integration)
        data = np.loadtxt(out1.read_text().splitlines()[1:], delimiter=",")
        assert np.array_equal(data[:, 1:], trajectory.states)

    def test_integration_failure_exits_3(self, tmp_path):
        extra = "integration.rel_tol = 1e-300\nintegration.abs_tol = 1e-300\n"
        path, _ = write_params(tmp_path, extra=extra)
        assert main(["simulate", "--config", str(path), "--out", str(tmp_path / "x.csv")]) == 3


class TestSweepCommand:
    SWEEP = (
        "sweep.axis1.param = beta_a\nsweep.axis1.min = 0.01\nsweep.axis1.max = 0.8\n"
        "sweep.axis1.count = {n1}\n"
        "sweep.axis2.param = beta_i\nsweep.axis2.min = 0.01\nsweep.axis2.max = 0.95\n"
        "sweep.axis2.count = {n2}\nsweep.check1 = 2\nsweep.check2 = 2\n"
    )

    def run_sweep_cli(self, tmp_path, n1, n2):
        extra = self.SWEEP.format(n1=n1, n2=n2)
        path, _ = write_params(
            tmp_path, beta_a=0.01, beta_i=0.01, alpha=0.15, delta_a=0.1,
            delta_i=0.15, gamma=0.01, extra=extra,
        )
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--config", str(path), "--out", str(out)]) == 0
        return out.read_text().splitlines()

    def test_single_cell(self, tmp_path):
        lines = self.run_sweep_cli(tmp_path, 1, 1)
        assert lines[0] == "beta_a,beta_i,r0,regime,S_inf,A_inf,I_inf,R_inf"
        assert len(lines) == 2

    def test_row_count_and_regime_flip(self, tmp_path):
        n1, n2 = 5, 8
        lines = self.run_sweep_cli(tmp_path, n1, n2)
        assert len(lines) == 1 + n1 * n2
        rows = [line.split(",") for line in lines[1:]]
        for i in range(n1):
            chunk = rows[i * n2 : (i + 1) * n2]
            for cells in chunk:
                r0 = float(cells[2])
                regime = cells[3]
                if r0 < 1.0 - 1e-9:
                    assert regime == "DiseaseFree"
                elif r0 > 1.0 + 1e-9:
                    assert regime == "Endemic"

    def test_sweep_requires_axes(self, tmp_path):
        path, _ = write_params(tmp_path)
        assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "s.csv")]) == 2

    def test_sweep_byte_determinism(self, tmp_path):
        extra = self.SWEEP.format(n1=4, n2=5)
        path, _ = write_params(
            tmp_path, beta_a=0.01, beta_i=0.01, alpha=0.15, delta_a=0.1,
            delta_i=0.15, gamma=0.01, extra=extra,
        )
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        assert main(["sweep", "--config", str(path), "--out", str(out1)]) == 0
        assert main(["sweep", "--config", str(path), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestFamilyCommand:
    def test_one_csv_per_value(self, tmp_path, capsys):
        extra = (
            "family.param = nu\nfamily.values = 0.0, 0.005, 0.01\n"
            "integration.t_max = 50\nintegration.sample_dt = 5\n"
        )
        path, _ = write_params(tmp_path, extra=extra)
        out_dir = tmp_path / "family"
        assert main(["family", "--config", str(path), "--out", str(out_dir)]) == 0
        files = sorted(f.name for f in out_dir.iterdir())
        assert files == ["nu_0.005.csv", "nu_0.01.csv", "nu_0.csv"]
        for name in files:
            header = (out_dir / name).read_text().splitlines()[0]
            assert header == "t,S,A,I,R"


class TestVerifyAndProbe:
    def test_verify_passes(self, capsys):
        assert main(["verify", "--seed", "3", "--samples", "10"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "PASS" in out

    def test_verify_deterministic(self, capsys):
        main(["verify", "--seed", "3", "--samples", "5"])
        first = capsys.readouterr().out
        main(["verify", "--seed", "3", "--samples", "5"])
        assert capsys.readouterr().out == first

    def test_verify_zero_samples_usage_error(self):
        assert main(["verify", "--seed", "3", "--samples", "0"]) == 2

    def test_probe_record(self, capsys):
        assert main(["probe", "--samples", "2", "--seed", "9"]) == 0
        fields = record_fields(capsys.readouterr().out)
        assert 0.0 <= float(fields["fraction"]) <= 1.0


class TestExitCodes:
    def test_missing_config_is_usage_error(self):
        assert main(["r0"]) == 2

    def test_unreadable_config(self, tmp_path):
        assert main(["r0", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_bad_config_key(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("params.bogus = 1\n")
        assert main(["r0", "--config", str(path)]) == 2
