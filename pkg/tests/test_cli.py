import json

import numpy as np
import pytest

from conftest import isotropic
from qcontract import linalg
from qcontract.cli import fixed_point, main
from qcontract.correlation import classical_mu
from qcontract.suites import SUITES, run_suite


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    return {
        "depol07": write(tmp_path / "d07.json", linalg.channel_to_json(linalg.depolarizing_channel(0.7, 2))),
        "depol09": write(tmp_path / "d09.json", linalg.channel_to_json(linalg.depolarizing_channel(0.9, 2))),
        "ident": write(tmp_path / "id.json", linalg.channel_to_json(linalg.identity_channel(2))),
        "replacer": write(tmp_path / "rep.json",
                          linalg.channel_to_json(linalg.replacer_channel(np.diag([0.7, 0.3]), 2))),
        "unitary": write(tmp_path / "u.json", {
            "kraus": [linalg.matrix_to_json(np.array([[0, 1], [1, 0]]))]}),
        "mixed": write(tmp_path / "mm.json", linalg.matrix_to_json(np.eye(2) / 2)),
        "iso": write(tmp_path / "iso.json", linalg.matrix_to_json(isotropic(2, 0.5))),
        "product": write(tmp_path / "prod.json",
                         linalg.matrix_to_json(np.kron(np.diag([0.6, 0.4]), np.diag([0.2, 0.8])))),
        "table": write(tmp_path / "table.json", {"p": [[0.3, 0.1, 0.05], [0.05, 0.2, 0.3]]}),
    }


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_contraction_command(files, capsys):
    code, out, _ = run(capsys, "contraction", files["depol07"], files["mixed"], "--f", "gm")
    assert code == 0
    (report,) = json.loads(out)["reports"]
    assert report["eta"] == pytest.approx(0.49)
    code, out, _ = run(capsys, "contraction", files["ident"], files["mixed"], "--f", "am,gm,hm,lm")
    assert code == 0
    assert [r["eta"] for r in json.loads(out)["reports"]] == pytest.approx([1, 1, 1, 1])


def test_malformed_json_reports_location(tmp_path, files, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"re": [[0.5, 0],\n  [0, 0.5]]')
    code, _, err = run(capsys, "contraction", files["depol07"], str(bad))
    assert code == 1
    assert "line 2" in err and "column" in err


def test_mixing_command(files, capsys):
    code, out, _ = run(capsys, "mixing", files["depol09"], "--delta", "0.01")
    assert code == 0
    payload = json.loads(out)
    assert payload["min"] == {"f": "GM", "n": 51}
    code, out, _ = run(capsys, "mixing", files["replacer"], "--delta", "0.01")
    assert code == 0 and json.loads(out)["min"]["n"] == 1
    code, _, err = run(capsys, "mixing", files["unitary"], "--delta", "0.01")
    assert code == 2 and "multiplicity" in err
    code, out, _ = run(capsys, "mixing", files["depol09"], "--delta", "0.01",
                       "--metric", "relative_entropy")
    assert code == 0 and json.loads(out)["metric"] == "relative_entropy"
    code, _, _ = run(capsys, "mixing", files["depol09"], "--delta", "0.01",
                     "--metric", "relative_entropy", "--f-set", "am")
    assert code == 2


def test_correlation_command(files, capsys):
    code, out, _ = run(capsys, "correlation", files["iso"], "--dims", "2,2", "--k", "0.5")
    assert code == 0 and json.loads(out)["reports"][0]["mu"] == pytest.approx(0.5)
    code, out, _ = run(capsys, "correlation", files["product"], "--dims", "2,2")
    assert code == 0 and json.loads(out)["reports"][0]["mu"] == pytest.approx(0, abs=1e-10)
    code, out, _ = run(capsys, "correlation", files["table"], "--f", "am", "--f", "hm", "--spectrum")
    payload = json.loads(out)
    expected = classical_mu([[0.3, 0.1, 0.05], [0.05, 0.2, 0.3]])
    assert code == 0 and payload["classical_mu"] == pytest.approx(expected)
    assert [r["mu"] for r in payload["reports"]] == pytest.approx([expected, expected])
    assert payload["gm_schmidt_spectrum"][0] == pytest.approx(1.0)
    code, _, _ = run(capsys, "correlation", files["iso"], "--dims", "2,3")
    assert code == 2
    code, _, _ = run(capsys, "correlation", files["iso"])
    assert code == 1


def test_verify_command(capsys):
    code, out, _ = run(capsys, "verify", "dpi", "--seed", "7", "--trials", "50")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "verify", "ordering", "--seed", "1", "--trials", "10")
    assert code == 0
    code, _, err = run(capsys, "verify", "nonexistent")
    assert code == 1 and "unknown suite" in err


def test_output_is_deterministic(files, tmp_path, capsys):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["--out", str(first), "verify", "identities", "--seed", "3", "--trials", "4"]) == 0
    assert main(["--out", str(second), "verify", "identities", "--seed", "3", "--trials", "4"]) == 0
    assert first.read_bytes() == second.read_bytes()
    assert main(["--out", str(first), "contraction", files["depol07"], files["mixed"]]) == 0
    assert main(["--out", str(second), "contraction", files["depol07"], files["mixed"]]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_tolerance_override(files, capsys):
    code, _, _ = run(capsys, "--tol-override", "eta_gap_tol=1e-9", "mixing", files["depol09"],
                     "--delta", "0.01")
    assert code == 0
    for bad in ("eta_gap_tol", "nope=1", "eta_gap_tol=abc", "eta_gap_tol=-1"):
        code, _, _ = run(capsys, "--tol-override", bad, "mixing", files["depol09"], "--delta", "0.01")
        assert code == 1


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "mixing", "missing.json", "--delta", "0.1")[0] == 1


def test_precondition_error_exit_code(tmp_path, capsys):
    not_cptp = write(tmp_path / "bad.json", {"kraus": [linalg.matrix_to_json(2 * np.eye(2))]})
    mixed = write(tmp_path / "m.json", linalg.matrix_to_json(np.eye(2) / 2))
    assert run(capsys, "contraction", not_cptp, mixed)[0] == 2


def test_fixed_point(rng):
    channel = linalg.random_channel(3, seed=rng)
    pi = fixed_point(channel)
    np.testing.assert_allclose(channel(pi), pi, atol=1e-10)
    assert np.trace(pi).real == pytest.approx(1.0)


def test_suites_are_deterministic_and_pass():
    for name in SUITES:
        a, b = run_suite(name, seed=11, trials=3), run_suite(name, seed=11, trials=3)
        assert a.to_json() == b.to_json()
        assert a.passed and a.checks > 0


def test_failed_verification_exits_3_with_counterexample(monkeypatch, capsys):
    def always_fails(result, rng):
        result.record(False, "forced failure", value=float(rng.uniform()))

    monkeypatch.setitem(SUITES, "broken", always_fails)
    code, out, _ = run(capsys, "verify", "broken", "--seed", "1", "--trials", "2")
    payload = json.loads(out)["result"]
    assert code == 3
    assert payload["failures"] == 2 and payload["counterexample"]["check"] == "forced failure"
