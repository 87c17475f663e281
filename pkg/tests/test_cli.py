import io
import json
import math
import subprocess
import sys

import pytest

from fockmaj.cli import dump_json, main, parse_state


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_decompose_ok():
    code, out, err = run("decompose", "--tau", "2", "--n", "1")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["T"] == 1.0 and data["G"] == 2.0
    assert data["r"] == pytest.approx(math.acosh(math.sqrt(2)), abs=1e-15)
    assert "manifest" in err


def test_decompose_not_cp():
    code, out, err = run("decompose", "--tau", "0.5", "--n", "0.2")
    assert code == 1 and out == ""
    assert "tau" in err


def test_usage_errors():
    code, _, err = run("bogus")
    assert code == 1 and "usage" in err
    assert run()[0] == 1
    assert run("schmidt", "--k", "1")[0] == 1
    assert run("schmidt", "--k", "1", "--lambda", "0.5", "--r", "0.5")[0] == 1


def test_matrix_verify_passes():
    code, out, err = run("matrix", "--family", "D", "--lambda", "0.5", "--verify", "--k", "0")
    assert code == 0
    assert out.startswith("c0,c1,")
    report = json.loads(err.splitlines()[0])["report"]
    assert report["passed"] is True


def test_matrix_json_families():
    for family, extra in [("Dk", ["--dk", "3"]), ("R", ["--lambda-prime", "0.3"])]:
        code, out, _ = run("matrix", "--family", family, "--k", "1", "--lambda", "0.6",
                           "--verify", "--format", "json", *extra)
        assert code == 0
        assert json.loads(out)["report"]["passed"] is True
    assert run("matrix", "--family", "R", "--lambda", "0.6")[0] == 1


def test_schmidt_formats():
    code, out, _ = run("schmidt", "--k", "1", "--lambda", "0.5", "--nmax", "1")
    data = json.loads(out)
    assert data["probs"] == pytest.approx([0.5625, 0.28125], rel=1e-15)
    assert data["tail_mass"] == pytest.approx(0.15625)
    code, out, _ = run("schmidt", "--k", "0", "--lambda", "0.5", "--nmax", "2", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "n,p"
    assert [float(x.split(",")[1]) for x in lines[1:]] == pytest.approx([0.75, 0.1875, 0.046875],
                                                                         rel=1e-15)


def test_entropy_and_state_specs(tmp_path):
    code, out, _ = run("entropy", "--state", "fock:0", "--r", "0.5")
    assert code == 0
    vac = json.loads(out)["value"]
    path = tmp_path / "vac.json"
    path.write_text("[[1, 0]]")
    assert json.loads(run("entropy", "--state", f"@{path}", "--r", "0.5")[1])["value"] == vac
    inline = json.loads(run("entropy", "--state", "coeffs:[1,0]", "--r", "0.5")[1])["value"]
    assert inline == vac
    assert run("entropy", "--state", "coeffs:[0,0]", "--r", "0.5")[0] == 1


def test_parse_state():
    s = parse_state("coeffs:[3,0;0,4]")
    assert s.amplitudes[1] == pytest.approx(0.8j)
    assert parse_state("fock:3").dim == 4


def test_truncation_exit_code():
    code, _, err = run("entropy", "--state", "fock:1", "--r", "1.0", "--nmax", "3")
    assert code == 3 and "truncation" in err
    code, _, _ = run("majorize", "--p", "schmidt:0:0.99", "--q", "[1.0]", "--eta", "1e-20")
    assert code == 3


def test_majorize():
    code, out, _ = run("majorize", "--p", "schmidt:0:0.5", "--q", "schmidt:1:0.5")
    assert code == 0 and json.loads(out)["holds"] is True
    code, out, _ = run("majorize", "--p", "[0.6,0.2,0.2]", "--q", "[0.5,0.5]")
    assert json.loads(out)["holds"] is False


def test_locc_commands():
    code, out, _ = run("locc", "reduce", "--k", "1", "--dk", "2", "--lambda", "0.5")
    assert code == 0 and json.loads(out)["deterministic"] is True
    code, out, _ = run("locc", "attenuate", "--k", "0", "--lambda", "0.6", "--lambda-prime", "0.3")
    assert code == 0 and json.loads(out)["checks"]["T"] == pytest.approx(0.25)


def test_scan_fock_csv():
    code, out, _ = run("scan", "fock", "--kmax", "2", "--steps", "4")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "r,k,entanglement" and len(lines) == 13


def test_scan_random_reproducible():
    argv = ("scan", "random", "--dim", "6", "--count", "10", "--seed", "4")
    first, second = run(*argv), run(*argv, "--threads", "2")
    assert first[0] == 0 and first[1] == second[1]
    assert json.loads(first[1])["violations"] == 0


def test_crossing_and_minimize():
    code, out, _ = run("crossing", "--a", "coeffs:[0,0;0.6324555320336759,0;0.7745966692414834,0]",
                       "--b", "fock:1", "--lo", "0.3", "--hi", "1.2")
    assert code == 0 and 0.70 <= json.loads(out)["r_star"] <= 0.80
    code, out, _ = run("minimize", "--dim", "2", "--r", "0.5", "--restarts", "2")
    assert code == 0 and json.loads(out)["vacuum_gap"] >= -1e-6


def test_manifest_file(tmp_path):
    path = tmp_path / "m.json"
    code, _, err = run("decompose", "--tau", "1", "--n", "1", "--manifest", str(path))
    assert code == 0 and "manifest" not in err
    manifest = json.loads(path.read_text())
    assert manifest["argv"][0] == "decompose" and "duration_s" in manifest


def test_dump_json_precision():
    assert dump_json({"x": 0.1}) == '{"x": 0.10000000000000001}'
    assert dump_json({"x": 0.1}, precision=3) == '{"x": 0.1}'
    assert dump_json([1.0, 2, True, None]) == "[1.0, 2, true, null]"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fockmaj", "decompose", "--tau", "2", "--n", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["G"] == 2.0


def test_matrix_verification_failure_exit_code():
    argv = ("matrix", "--family", "R", "--k", "2", "--lambda", "0.9", "--lambda-prime", "0.7",
            "--verify")
    code, out, err = run(*argv)
    assert code == 2 and out.startswith("c0,")
    assert json.loads(err.splitlines()[0])["report"]["stochastic"] is False
    code, out, _ = run(*argv, "--format", "json")
    assert code == 2 and json.loads(out)["report"]["passed"] is False
