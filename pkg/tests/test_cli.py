"""End-to-end tests of the batch command-line interface (in-process)."""

import json
import math

import numpy as np
import pytest
from scipy.special import zeta

from halphen_lab.cli import main, parse_complex, parse_triple


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestParsing:
    def test_complex_literals(self):
        assert parse_complex("0.3+0.2i") == 0.3 + 0.2j
        assert parse_complex("1.3i") == 1.3j
        assert parse_complex("2") == 2 + 0j

    def test_triple(self):
        assert parse_triple("1,2,3") == (1.0, 2.0, 3.0)


class TestSolve:
    def test_csv_trajectory(self, capsys):
        code, out = run(
            capsys, "solve", "--init", "1,2,3", "--t0", "1", "--t1", "5"
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("T")
        T = [float(line.split(",")[0]) for line in lines[1:]]
        assert all(b > a for a, b in zip(T, T[1:]))

    def test_halphen_sampling(self, capsys):
        code, out = run(
            capsys, "solve", "--halphen", "--t0", "1", "--t1", "3",
            "--samples", "50", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        Om = np.array(payload["Omega"])
        # closed-form ordering: Omega1 < 0 < Omega3 < Omega2
        assert np.all(Om[:, 0] < 0)
        assert np.all(Om[:, 2] > 0)
        assert np.all(Om[:, 1] > Om[:, 2])

    def test_usage_error_bad_init(self, capsys):
        code = main(["solve", "--init", "1,2", "--t0", "1", "--t1", "5"])
        assert code == 1

    def test_usage_error_missing_init(self, capsys):
        code = main(["solve", "--t0", "1", "--t1", "5"])
        assert code == 1


class TestCurvature:
    def test_taubnut_self_dual(self, capsys):
        code, out = run(capsys, "curvature", "--taubnut", "0,-1")
        assert code == 0
        payload = json.loads(out)
        assert payload["flags"]["SelfDual"]
        assert payload["flags"]["RicciFlat"]
        assert max(r["wplus_norm"] for r in payload["samples"]) > 0

    def test_halphen_endpoint_bolt(self, capsys):
        code, out = run(
            capsys, "curvature", "--halphen", "--t0", "0.5", "--t1", "7",
            "--samples", "200",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["flags"]["SelfDual"]
        assert payload["endpoint"]["kind"] == "bolt"


class TestFlow:
    def test_volume_rate_residual(self, capsys):
        code, out = run(
            capsys, "flow", "--init", "1,2,3", "--t0", "1", "--t1", "10"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["volume_rate_residual"] < 1e-3
        assert all(v > 0 for v in payload["volume"])


class TestEisenstein:
    def test_both_methods_agree(self, capsys):
        code, out = run(
            capsys, "eisenstein", "--s", "2", "--tau", "0.2+1.1i",
            "--both-methods",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["agree"] is True

    def test_numeric_failure_exit_code(self, capsys):
        # s = 1 is the pole of the completed series
        code = main(["eisenstein", "--s", "1", "--tau", "1.1i"])
        assert code == 2


class TestDsum:
    def test_d3_near_eisenstein_plus_zeta(self, capsys):
        code, out = run(capsys, "dsum", "--n", "3", "--tau", "2i")
        assert code == 0
        payload = json.loads(out)
        eis = main(["eisenstein", "--s", "3", "--tau", "2i"])
        assert eis == 0
        e3 = json.loads(capsys.readouterr().out)["fourier"]["value"]
        target = e3 / (4 * math.pi) ** 3 + zeta(3) / 64
        assert abs(payload["value"] - target) < 1e-3


class TestGraphd:
    def test_bridge_note(self, capsys):
        code, out = run(
            capsys, "graphd", "--mult", "1,0,0,0,0,1", "--tau", "1.1i"
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["value"] == 0.0
        assert payload["note"] == "zero-mode-excluded"


class TestAmplitude:
    def test_both_forms_agree(self, capsys):
        code, out = run(capsys, "amplitude", "--aps", "0.1", "--apt", "0.15")
        assert code == 0
        payload = json.loads(out)
        assert payload["difference"] < 1e-10
        assert payload["alpha_u"] == pytest.approx(-0.25)


class TestTheta:
    def test_classical_value(self, capsys):
        code, out = run(capsys, "theta", "--classical", "3", "--z", "1i")
        assert code == 0
        payload = json.loads(out)
        ref = math.pi**0.25 / math.gamma(0.75)
        assert payload["re"] == pytest.approx(ref, abs=1e-12)
        assert payload["im"] == pytest.approx(0.0, abs=1e-12)


class TestConformal:
    def test_cp_harmonic_residual(self, capsys):
        code, out = run(
            capsys, "conformal", "--cp", "cp2", "--rho", "1.0", "--eta", "0.7",
            "--h", "1e-4",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["residual"] < 1e-6

    def test_w_first_integral(self, capsys):
        code, out = run(capsys, "conformal", "--z", "1.1i")
        assert code == 0
        payload = json.loads(out)
        fi = complex(payload["first_integral"]["re"], payload["first_integral"]["im"])
        assert abs(fi - 0.25) < 1e-10


class TestOutputs:
    def test_out_file_and_determinism(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        for p in (p1, p2):
            assert main([
                "eisenstein", "--s", "2", "--tau", "1.3i", "--out", str(p)
            ]) == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_unknown_command_is_usage_error(self, capsys):
        code = main(["frobnicate"])
        assert code == 1
