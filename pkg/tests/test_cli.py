import json
import subprocess
import sys

import pytest

from dgw.cli import main

BUILD = ["build", "--q", "5", "--n", "2", "--zeta", "2", "--alpha", "2",
         "--alphas", "1", "--betas", "0"]


@pytest.fixture(scope="module")
def module_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "mod.json"
    assert main(BUILD + ["--out", str(path)]) == 0
    return path


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_build_output(module_file):
    obj = json.loads(module_file.read_text())
    assert obj["schema"] == "dgw.module/1" and obj["q"] == 5 and obj["n"] == 2
    assert obj["instance"]["alphas"] == [1]


def test_build_is_deterministic(module_file, tmp_path):
    again = tmp_path / "again.json"
    assert main(BUILD + ["--out", str(again)]) == 0
    assert again.read_text() == module_file.read_text()


def test_check(module_file, capsys):
    code, out = _run(["check", "--module", str(module_file), "--place", "s"], capsys)
    assert code == 0 and out["ok"] and out["first_failure"] is None


def test_solve(module_file, capsys):
    code, out = _run(["solve", "--module", str(module_file), "--place", "s+1", "--N", "4"], capsys)
    assert code == 0
    assert out["checks"] == {"fundamental": True, "det_one": True, "constant_term_invertible": True}
    assert out["M"] % out["lang_M"] == 0


def test_extract_and_certify(module_file, tmp_path, capsys):
    wits = tmp_path / "w.json"
    assert main(["extract", "--module", str(module_file), "--d-max", "1", "--N", "2",
                 "--out", str(wits)]) == 0
    obj = json.loads(wits.read_text())
    assert len(obj["witnesses"]) == 5 and not obj["errors"]
    code, rep = _run(["certify", "--witnesses", str(wits), "--strict"], capsys)
    assert code == 0 and rep["closure_size"] == 120 and rep["verdict"] == "full"
    assert rep["torus_charpoly"]["matches"]
    # a single witness cannot certify
    obj["witnesses"] = obj["witnesses"][:1]
    wits.write_text(json.dumps(obj))
    code, rep = _run(["certify", "--witnesses", str(wits), "--strict"], capsys)
    assert code == 5 and rep["verdict"] != "full"


def test_export_motive(module_file, capsys):
    code, out = _run(["export-motive", "--module", str(module_file), "--place", "s+3"], capsys)
    assert code == 0 and out["descriptor"]["variable"] == "theta"
    code, _ = _run(["export-motive", "--module", str(module_file), "--place", "s^2+2"], capsys)
    assert code == 64


def test_exit_codes(module_file, tmp_path, capsys):
    assert main(["build", "--q", "5"]) == 64
    assert main(["frobnicate"]) == 64
    assert main(BUILD[:-1] + ["0", "--N", "1"]) == 64
    empty = tmp_path / "empty.json"
    empty.write_text("")
    assert main(["check", "--module", str(empty)]) == 65
    garbage = tmp_path / "garbage.json"
    garbage.write_text('{"p": 5, "D": [["s+"]]}')
    assert main(["check", "--module", str(garbage)]) == 65
    # the module has a pole at s = 0 in the t^1 coefficient of D after reduction at s
    pole = tmp_path / "pole.json"
    pole.write_text(json.dumps({"schema": "dgw.module/1", "p": 5, "n": 1,
                                "D": [[{"num": "s+t", "den": "s"}]]}))
    assert main(["solve", "--module", str(pole), "--place", "s"]) == 3
    bad_zeta = BUILD.copy()
    bad_zeta[6] = "4"
    assert main(bad_zeta) == 2
    # place s+3 needs M = 100; a smaller cap is an invariant failure
    assert main(["solve", "--module", str(module_file), "--place", "s+3", "--M-max", "20"]) == 2
    capsys.readouterr()


def test_build_accepts_q4(capsys):
    # zeta = x has order 3 in F_4 and q = 4 > 3
    code, out = _run(["build", "--q", "4", "--n", "2", "--zeta", "[0,1]", "--alpha", "[1,1]",
                      "--alphas", "1", "--betas", "0", "--N", "4"], capsys)
    assert code == 0 and out["q"] == 4


def test_check_reports_first_failure(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"schema": "dgw.module/1", "p": 5, "n": 1, "D": [["1+t"]]}))
    code, out = _run(["check", "--module", str(path)], capsys)
    assert code == 0 and not out["ok"] and out["first_failure"] == 1


def test_extract_with_no_integral_place(tmp_path, capsys):
    # s^5 - s vanishes at every degree-1 place
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"schema": "dgw.module/1", "p": 5, "n": 1,
                                "D": [[{"num": "s^5+4*s+t", "den": "s^5+4*s"}]]}))
    code, out = _run(["extract", "--module", str(path), "--d-max", "1", "--N", "2"], capsys)
    assert code == 4 and out["witnesses"] == [] and len(out["errors"]) == 5


def test_certify_small_witness_sets(module_file, tmp_path, capsys):
    wits = tmp_path / "w.json"
    assert main(["extract", "--module", str(module_file), "--d-max", "1", "--N", "2",
                 "--out", str(wits)]) == 0
    obj = json.loads(wits.read_text())
    obj["witnesses"] = [w for w in obj["witnesses"] if w["place_label"] == "s+3"]
    wits.write_text(json.dumps(obj))
    code, rep = _run(["certify", "--witnesses", str(wits)], capsys)
    assert code == 0 and rep["verdict"] == "proper" and rep["closure_size"] == 4
    obj["witnesses"] = []
    wits.write_text(json.dumps(obj))
    code, rep = _run(["certify", "--witnesses", str(wits), "--strict"], capsys)
    assert code == 5 and rep["verdict"] == "proper"


def test_threads_env(module_file, tmp_path, monkeypatch):
    monkeypatch.setenv("DGW_THREADS", "2")
    out = tmp_path / "w.json"
    assert main(["extract", "--module", str(module_file), "--d-max", "1", "--N", "2",
                 "--out", str(out)]) == 0
    monkeypatch.setenv("DGW_THREADS", "zero")
    assert main(["extract", "--module", str(module_file), "--d-max", "1", "--N", "2",
                 "--out", str(out)]) == 64


def test_console_script(module_file):
    proc = subprocess.run([sys.executable, "-m", "dgw.cli", "check", "--module", str(module_file)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]
