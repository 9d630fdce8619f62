import json
import subprocess
import sys

import pytest

from ffzeta import TThetaPoly, at_polynomial, field
from ffzeta.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_compute_at_poly(capsys):
    code, out, _ = run(capsys, "compute", "at-poly", "--q", "3", "--s", "4")
    assert code == 0
    assert TThetaPoly.from_json(field(3), out["value"]) == at_polynomial(field(3), 3)
    assert out["plan"] == {"pi_prec": 240, "jet_order": 4, "tail_bound_log": 240}


def test_compute_omega_taylor(capsys):
    code, out, _ = run(capsys, "compute", "omega-taylor", "--q", "3", "--n", "3", "--prec", "240")
    assert code == 0
    assert out["value"]["order"] == 3 and len(out["value"]["coeffs"]) == 4
    assert out["certified_prec"] >= 240
    assert out["value"]["coeffs"][0]["val"] == 3


def test_compute_mzv(capsys):
    code, out, _ = run(capsys, "compute", "mzv", "--q", "3", "--index", "5,1", "--dmax", "3")
    assert code == 0
    assert out["certified_prec"] == 2 * 5 * 4
    assert out["value"]["prec"] == 40


@pytest.mark.parametrize(
    "argv",
    [
        ("compute", "pi-tilde", "--q", "4"),
        ("compute", "carlitz-gamma", "--q", "3", "--s", "5"),
        ("compute", "at-taylor", "--q", "2", "--index", "3", "--n", "1"),
        ("compute", "cmpl", "--q", "3", "--index", "2", "--n", "1"),
    ],
)
def test_other_compute_kinds(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out["kind"] == argv[1] and "value" in out


def test_cmpl_from_u_file(capsys, tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps([[[[1]], [[0], [1]]]]))
    code, out, _ = run(capsys, "compute", "cmpl", "--q", "3", "--index", "2", "--u-file", str(path), "--n", "1")
    assert code == 0 and out["u"] == [[[[1]], [[0], [1]]]]
    path.write_text("[]")
    assert run(capsys, "compute", "cmpl", "--q", "3", "--index", "2", "--u-file", str(path))[0] == 2
    path.write_text("[[0, 1]]")
    assert run(capsys, "compute", "cmpl", "--q", "3", "--index", "2", "--u-file", str(path))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "rigid", "--q", "3", "--index", "5,1", "--i", "3", "--m", "1", "--n", "2"),
        ("verify", "rigid", "--q", "2", "--index", "1,2"),
        ("verify", "rigid", "--q", "3"),
        ("verify", "prolong", "--q", "3", "--trials", "5"),
        ("verify", "atpoly-identity", "--q", "2", "--index", "3"),
        ("verify", "psi-inverse", "--q", "3", "--index", "1,5"),
        ("verify", "group-closure", "--q", "3", "--index", "1,5", "--n", "1", "--m", "1", "--trials", "20"),
    ],
)
def test_verify_pass(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out["verdict"] == "PASS" and out["report"]["pass"]


def test_verify_fail_exit_code(capsys, monkeypatch):
    from ffzeta import acceptance

    monkeypatch.setattr(acceptance, "atpoly_identity", lambda *a, **k: {"pass": False, "residual_valuation": 3})
    code, out, _ = run(capsys, "verify", "atpoly-identity", "--q", "2", "--index", "3")
    assert code == 1 and out["verdict"] == "FAIL"


def test_non_admissible_u_is_a_config_error(capsys, tmp_path):
    path = tmp_path / "u.json"
    path.write_text(json.dumps([[[[0]] * 40 + [[1]]]]))  # u = theta^40 breaks convergence for s = 1
    code, _, err = run(capsys, "verify", "rigid", "--q", "3", "--index", "1", "--u-file", str(path))
    assert code == 2 and "convergence" in err


@pytest.mark.parametrize(
    "argv, verdict",
    [
        (("scan", "--q", "3", "--values", "pth-power-control"), "RELATION-FOUND"),
        (("scan", "--q", "3", "--values", "euler-control"), "RELATION-FOUND"),
        (("scan", "--q", "3", "--values", "mainb", "--index", "1,5", "--taylor-n", "1", "--dm", "2", "--dtheta", "2"), "NO-RELATION-AT-HEIGHT(2,2,"),
        (("scan", "--q", "3", "--values", "euler-control", "--dtheta", "2"), "NO-RELATION-AT-HEIGHT(2,1,"),
    ],
)
def test_scan(capsys, argv, verdict):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out["verdict"].startswith(verdict)


def test_config_errors(capsys, tmp_path):
    assert run(capsys, "compute", "pi-tilde", "--q", "3", "--prec", "39")[0] == 2
    assert run(capsys, "compute", "pi-tilde", "--q", "3", "--n", "9")[0] == 2
    assert run(capsys, "compute", "pi-tilde", "--q", "6")[0] == 2
    assert run(capsys, "compute", "pi-tilde", "--q", "32")[0] == 2
    assert run(capsys, "compute", "mzv", "--q", "3")[0] == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert run(capsys, "compute", "pi-tilde", "--config", str(bad))[0] == 2


def test_precision_error_exit_code(capsys):
    code, out, err = run(capsys, "scan", "--q", "3", "--values", "omega-family", "--dtheta", "200")
    assert code == 3 and "insufficient precision" in err


def test_config_file_and_flags(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# group closure run\nq = 3\nindex = 1,5\nn = 1\nm = 1\ntrials = 4\nseed = 7\n")
    code, out, _ = run(capsys, "verify", "group-closure", "--config", str(cfg))
    assert code == 0 and out["report"]["trials"] == 4
    # flags override the file
    code, out, _ = run(capsys, "verify", "group-closure", "--config", str(cfg), "--trials", "2")
    assert out["report"]["trials"] == 2


def test_output_is_deterministic(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["verify", "group-closure", "--q", "3", "--index", "1,5", "--n", "1", "--m", "1", "--trials", "3", "--output", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "ffzeta", "compute", "carlitz-gamma", "--q", "3", "--s", "4"],
        capture_output=True,
        text=True,
        check=True,
    )
    assert json.loads(proc.stdout)["value"] == [[0], [2], [0], [1]]


def test_suite_subcommand(capsys):
    code, out, err = run(capsys, "suite", "3")
    assert code == 0 and out["pass"]
    assert "PASS criterion 3" in err
