import json

import numpy as np
import pytest

from torusdyn import config as config_mod
from torusdyn.cli import run
from torusdyn.fields import FourierSeries, OneForm
from torusdyn.lagrangian import MechanicalLagrangian

PENDULUM_CFG = """\
[lagrangian]
dim = 1
dt = 0.001

[potential.cos]
1 = 1.0
"""

CANAL_CFG = PENDULUM_CFG + """
[canal]
eps = 0.1
k = 2
core = 0.0
n_random_loops = 40
"""


@pytest.fixture
def golden_file(tmp_path):
    path = tmp_path / "golden.txt"
    path.write_text("11\n10\n")
    return str(path)


def run_capture(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, out


class TestSubcommands:
    def test_sft_entropy_golden(self, capsys, golden_file):
        code, out = run_capture(capsys, ["sft-entropy", "--matrix", golden_file])
        assert code == 0
        payload = json.loads(out)
        assert abs(payload["h"] - np.log((1 + np.sqrt(5)) / 2)) < 1e-9

    def test_sft_shortest_cycle(self, capsys):
        code, out = run_capture(capsys, ["sft-shortest-cycle", "--golden-mean"])
        payload = json.loads(out)
        assert code == 0 and payload["period"] == 1
        assert payload["period"] <= payload["bq_bound"]

    def test_sft_recode(self, capsys, tmp_path):
        out_path = str(tmp_path / "z2.txt")
        code, out = run_capture(capsys, ["sft-recode", "--golden-mean", "--n", "2",
                                         "--matrix-out", out_path])
        payload = json.loads(out)
        assert code == 0 and payload["symbols"] == 3 and payload["inequality_ok"]
        from torusdyn.sft import load_matrix, top_entropy
        assert abs(top_entropy(load_matrix(out_path)) - payload["h_recoded"]) < 1e-12

    def test_critical_value(self, capsys, tmp_path):
        cfg = tmp_path / "pendulum.cfg"
        cfg.write_text(PENDULUM_CFG)
        code, out = run_capture(capsys, ["critical-value", "--config", str(cfg)])
        payload = json.loads(out)
        assert code == 0 and abs(payload["c"] - 1.0) <= 1e-2

    def test_action_potential_csv(self, capsys, tmp_path):
        cfg = tmp_path / "pendulum.cfg"
        cfg.write_text(PENDULUM_CFG)
        code, out = run_capture(capsys, [
            "action-potential", "--config", str(cfg), "--k", "0.5,1.2",
            "--x", "0.0", "--y", "0.5", "--format", "csv"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "k,x,y,phi,status"
        assert "neg_inf" in lines[1] and "finite" in lines[2]

    def test_suspend_integrate(self, capsys):
        code, out = run_capture(capsys, [
            "suspend-integrate", "--golden-mean", "--tau-base", "1.0",
            "--tau-bonus", "0.5", "--f", "height"])
        payload = json.loads(out)
        assert code == 0
        p1 = 1.0 / (1.0 + ((1 + np.sqrt(5)) / 2) ** 2)
        exact = (1.0 * (1 - p1) + 2.25 * p1) / (2 * (1.0 + 0.5 * p1))
        assert abs(payload["value"] - exact) < 1e-9

    def test_entropy_estimate(self, capsys):
        code, out = run_capture(capsys, [
            "entropy-estimate", "--orbits", "400", "--steps", "10", "--seed", "3"])
        payload = json.loads(out)
        assert code == 0
        assert payload["r"] <= payload["s"]
        assert abs(payload["h_estimate"] - np.log((3 + np.sqrt(5)) / 2)) <= 0.15

    def test_entropy_series_csv(self, capsys):
        code, out = run_capture(capsys, [
            "entropy-estimate", "--orbits", "50", "--steps", "5", "--seed", "1",
            "--series", "--format", "csv"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "t,cover,close_pairs"
        assert len(lines) == 7

    def test_hexpansivity(self, capsys):
        code, out = run_capture(capsys, [
            "hexpansivity", "--orbits", "100", "--steps", "40", "--horizon", "30"])
        payload = json.loads(out)
        assert code == 0 and payload["probe"] <= 0.05

    def test_shadow(self, capsys):
        code, out = run_capture(capsys, [
            "shadow", "--delta", "1e-4", "--length", "2000", "--count", "4", "--seed", "7"])
        payload = json.loads(out)
        assert code == 0
        assert payload["eps_achieved"] <= payload["Q"] * payload["delta"]
        assert payload["all_within_Q_delta"]

    def test_canal_experiment(self, capsys, tmp_path):
        cfg = tmp_path / "canal.cfg"
        cfg.write_text(CANAL_CFG)
        code, out = run_capture(capsys, ["canal-experiment", "--config", str(cfg)])
        payload = json.loads(out)
        assert code == 0 and payload["monotone"]
        assert abs(payload["c_perturbed"] - 1.0) <= 2e-2


class TestExitCodes:
    def test_usage_error_is_2(self, capsys):
        assert run(["sft-entropy", "--bogus-flag"]) == 2

    def test_unknown_command_is_2(self, capsys):
        assert run(["not-a-command"]) == 2

    def test_domain_error_is_1(self, capsys):
        # acyclic matrix: shortest cycle is a domain error
        import tempfile, os
        with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
            fh.write("01\n00\n")
            path = fh.name
        try:
            assert run(["sft-shortest-cycle", "--matrix", path]) == 1
        finally:
            os.unlink(path)

    def test_missing_file_is_1(self, capsys):
        assert run(["sft-entropy", "--matrix", "/nonexistent/m.txt"]) == 1


class TestDeterminism:
    def test_byte_identical_runs_and_threads(self, capsys):
        outputs = []
        for threads in ("1", "8", "1"):
            code, out = run_capture(capsys, [
                "--threads", threads, "shadow", "--delta", "1e-4",
                "--length", "1500", "--count", "6", "--seed", "42"])
            assert code == 0
            outputs.append(out)
        assert outputs[0] == outputs[1] == outputs[2]

    def test_entropy_estimate_deterministic(self, capsys):
        a = run_capture(capsys, ["entropy-estimate", "--orbits", "200", "--steps", "8",
                                 "--seed", "11"])[1]
        b = run_capture(capsys, ["entropy-estimate", "--orbits", "200", "--steps", "8",
                                 "--seed", "11"])[1]
        assert a == b


class TestConfigRoundTrip:
    def test_lagrangian_fixpoint(self):
        assert config_mod.round_trips(PENDULUM_CFG)

    def test_magnetic_lagrangian_fixpoint(self):
        eta = OneForm([FourierSeries(2, cos={(0, 1): 0.1}), FourierSeries(2, sin={(1, 0): 0.2})])
        L = MechanicalLagrangian(2, FourierSeries(2, cos={(1, 0): 0.3, (1, 1): 0.05}), eta)
        text = config_mod.serialize_lagrangian(L, {"integrator": "rk4", "dt": 1e-3})
        assert config_mod.round_trips(text)
        L2, meta = config_mod.parse_lagrangian(text)
        pts = np.random.default_rng(0).random((20, 2))
        assert np.allclose(L.potential(pts), L2.potential(pts))
        assert np.allclose(L.oneform(pts), L2.oneform(pts))
        assert meta["integrator"] == "rk4"

    def test_polyline_round_trip(self):
        verts = np.array([[0.1, 0.2], [0.5, 0.6]])
        winds = np.array([[0, 1], [1, 0]])
        text = config_mod.format_polyline_csv(verts, winds)
        v2, w2 = config_mod.parse_polyline_csv(text)
        assert np.allclose(verts, v2) and np.array_equal(winds, w2)

    def test_polyline_without_winds(self):
        v2, w2 = config_mod.parse_polyline_csv("0.25\n0.5\n")
        assert w2 is None and v2.shape == (2, 1)

    def test_canal_config_with_core_file(self, tmp_path):
        core = tmp_path / "core.csv"
        core.write_text("x1\n0.0\n")
        text = PENDULUM_CFG + f"\n[canal]\neps = 0.2\nk = 3\ncore_file = {core.name}\n"
        L, canal, econf = config_mod.parse_canal_experiment(text, base_dir=str(tmp_path))
        assert canal.k == 3 and canal.eps == 0.2
        assert canal.dim == 1
