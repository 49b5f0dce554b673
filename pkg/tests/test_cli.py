import json
import os

import numpy as np

from genricci.cli import run

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "configs")


def cfg(name):
    return os.path.join(CONFIGS, name)


def run_capture(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSugraVerify:
    def test_eta_passes(self, capsys):
        code, out, err = run_capture(
            capsys, ["sugra", "verify", cfg("ads5xs5_eta.toml"), "--param", "c0=0"])
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True
        assert all(abs(v) < 1e-8 for v in payload["residuals"].values())

    def test_param_override_changes_result(self, capsys):
        code, out, _ = run_capture(
            capsys, ["sugra", "verify", cfg("ads5xs5_eta.toml"), "--param", "c0=0.5"])
        assert code == 0

    def test_deterministic_output(self, capsys):
        _, out1, _ = run_capture(capsys, ["sugra", "verify", cfg("ads5xs5_eta.toml")])
        _, out2, _ = run_capture(capsys, ["sugra", "verify", cfg("ads5xs5_eta.toml")])
        assert out1 == out2

    def test_budget_violation_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text("""
kind = "sugra"
[[blocks]]
family = "so"
p = 4
q = 2
lambda = 1.0
c = 0.0
[[blocks]]
family = "so"
p = 7
q = 0
lambda = -1.0
c = 0.0
""")
        code, _, err = run_capture(capsys, ["sugra", "verify", str(bad)])
        assert code == 2
        assert "10" in err or "dim" in err

    def test_malformed_toml_exit_2(self, tmp_path, capsys):
        bad = tmp_path / "broken.toml"
        bad.write_text("kind = [unclosed")
        code, _, err = run_capture(capsys, ["sugra", "verify", str(bad)])
        assert code == 2
        assert "malformed" in err

    def test_missing_file_exit_2(self, capsys):
        code, _, _ = run_capture(capsys, ["sugra", "verify", "nope.toml"])
        assert code == 2

    def test_failing_residuals_exit_1(self, capsys):
        code, out, _ = run_capture(
            capsys, ["sugra", "verify", cfg("ads4_su3_so3_u1.toml"),
                     "--param", "blocks.1.lambda=-0.7"])
        assert code == 1
        assert json.loads(out)["pass"] is False

    def test_all_shipped_configs_pass(self, capsys):
        for name in ("ads5_s3_s2_eta.toml", "ads5_su3_so3_eta.toml",
                     "ads4_s6_twoflux.toml", "ads4_su3_so3_u1.toml",
                     "ads6_cp2_first_ansatz.toml"):
            code, _, _ = run_capture(capsys, ["sugra", "verify", cfg(name)])
            assert code == 0, name


class TestAlgebraAndCurvature:
    def test_algebra_check(self, capsys):
        code, out, _ = run_capture(capsys, ["algebra", "check", cfg("su2_double.toml")])
        assert code == 0
        assert json.loads(out)["pass"] is True

    def test_gric_matches_block_lemma(self, capsys):
        code, out, _ = run_capture(capsys,
                                   ["curvature", "gric", cfg("su2_double.toml")])
        assert code == 0
        payload = json.loads(out)
        mat = np.array(payload["gric"])
        # c = 0, Killing = -4 I on a1: ((c-1)/2) K = 2 I on the (1-t) columns
        assert np.allclose(mat[:, :2], 2.0 * np.eye(2), atol=1e-10)
        assert np.allclose(mat[:, 2:], 0.0, atol=1e-10)

    def test_scalar(self, capsys):
        code, out, _ = run_capture(capsys,
                                   ["curvature", "scalar", cfg("su2_double.toml")])
        assert code == 0
        assert abs(json.loads(out)["scalar_curvature"] + 0.5) < 1e-10

    def test_flow_csv(self, capsys, tmp_path):
        out_file = tmp_path / "traj.csv"
        code, _, err = run_capture(
            capsys, ["curvature", "flow", cfg("su2_double.toml"),
                     "--t-end", "0.05", "--dt", "0.01", "--output", str(out_file)])
        assert code == 0
        lines = out_file.read_text().strip().splitlines()
        assert lines[0] == "# schema: genricci-flow-v1"
        assert lines[1].split(",")[:3] == ["t", "S", "norm_gric"]
        assert len(lines) == 2 + 6

    def test_dirac_check(self, capsys):
        code, out, _ = run_capture(capsys,
                                   ["dirac", "check", cfg("su3_so3_double.toml")])
        assert code == 0
        payload = json.loads(out)
        assert payload["pass"] is True


class TestSolveAndScan:
    def test_solve_first_ansatz(self, capsys):
        code, out, _ = run_capture(
            capsys, ["sugra", "solve", cfg("ads6_cp2_first_ansatz.toml"),
                     "--pin", "c0=0.4", "--seed", "random:3"])
        assert code == 0
        payload = json.loads(out)
        assert payload["variables"][0] == "c0"
        assert any(s["converged"] for s in payload["solutions"])
        for sol in payload["solutions"]:
            if sol["converged"]:
                assert abs(sol["x"]["c0"] - 0.4) < 1e-14
                assert sol["residual_norm"] < 1e-10

    def test_solve_unknown_pin(self, capsys):
        code, _, err = run_capture(
            capsys, ["sugra", "solve", cfg("ads6_cp2_first_ansatz.toml"),
                     "--pin", "bogus=1"])
        assert code == 2

    def test_scan_eta(self, capsys):
        code, out, _ = run_capture(
            capsys, ["sugra", "scan", cfg("ads5xs5_eta.toml"),
                     "--grid", "c0=-0.5,0,0.3,0.7"])
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "# schema: genricci-scan-v1"
        assert len(lines) == 2 + 4
        header = lines[1].split(",")
        assert header[0] == "c0" and header[-3:] == ["status", "pass", "message"]

    def test_scan_boundary_errors_continue(self, capsys):
        code, out, _ = run_capture(
            capsys, ["sugra", "scan", cfg("ads5xs5_eta.toml"),
                     "--grid", "c0=0.9:1.1:3"])
        assert code == 1
        rows = out.strip().splitlines()[2:]
        assert "error" in rows[-1]
        assert rows[0].split(",")[-2] == "true"

    def test_scan_threads_deterministic(self, capsys):
        argv = ["sugra", "scan", cfg("ads5xs5_eta.toml"), "--grid", "c0=-0.2,0.1"]
        _, out1, _ = run_capture(capsys, argv)
        _, out2, _ = run_capture(capsys, argv + ["--threads", "2"])
        assert out1 == out2


class TestUsage:
    def test_unknown_subcommand(self, capsys):
        assert run(["frobnicate"]) == 2

    def test_no_args(self, capsys):
        assert run([]) == 2
