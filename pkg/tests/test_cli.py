import json
import math
from pathlib import Path

import pytest

from qsphere.cli import main
from qsphere.qmetric import DISTANCE_CSV_HEADER


def test_verify_pass(tmp_path, capsys):
    rc = main(["verify", "--q", "0.9", "--out", str(tmp_path / "rep.json")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "[PASS]" in out and "[FAIL]" not in out
    report = json.loads((tmp_path / "rep.json").read_text())
    assert report["failed"] == 0
    assert report["worst_residual"] <= 1e-8
    assert all(s["failed"] == 0 for s in report["suites"])


def test_verify_classical_branch(tmp_path, capsys):
    rc = main(["verify", "--q", "1.0", "--out", str(tmp_path / "rep.json")])
    assert rc == 0
    report = json.loads((tmp_path / "rep.json").read_text())
    names = {c["name"] for s in report["suites"] for c in s["checks"]}
    assert any("classical metric endpoints" in n for n in names)
    # the deformed-branch series checks are not run at q = 1
    assert not any("triangle inequality" in n for n in names)


def test_verify_rejects_bad_q(capsys):
    rc = main(["verify", "--q", "1.5"])
    assert rc == 2
    assert "must lie in (0, 1]" in capsys.readouterr().err


def test_berezin_table(tmp_path, capsys):
    rc = main(["berezin", "--N", "4", "--q", "0.5", "--out", str(tmp_path)])
    assert rc == 0
    out = capsys.readouterr().out
    lines = (tmp_path / "berezin_q0.5_N4.csv").read_text().strip().splitlines()
    assert lines[0] == "m,B"
    rows = [line.split(",") for line in lines[1:]]
    assert float(rows[0][1]) == 1.0
    assert all(0.0 < float(r[1]) <= 1.0 for r in rows)
    fix = json.loads((tmp_path / "berezin_q4.json".replace("4", "0.5_N4")).read_text())
    assert fix["N"] == 4 and len(fix["B"]) == 5


def test_berezin_rejects_bad_args(capsys):
    assert main(["berezin", "--N", "4", "--q", "1.5"]) == 2
    assert main(["berezin", "--N", "100", "--q", "0.5"]) == 2


def test_sweep_deterministic(tmp_path):
    args = ["sweep", "--q", "0.5", "--N", "1", "2", "--max-degree", "10",
            "--seed", "7", "--out"]
    rc = main(args + [str(tmp_path / "run1")])
    assert rc == 0
    rc = main(args + [str(tmp_path / "run2")])
    assert rc == 0
    b1 = (tmp_path / "run1" / "distance_sweep.csv").read_bytes()
    b2 = (tmp_path / "run2" / "distance_sweep.csv").read_bytes()
    assert b1 == b2


def test_sweep_jobs_match_serial(tmp_path):
    base = ["sweep", "--q", "0.5", "0.9", "--N", "1", "2", "--max-degree", "10",
            "--seed", "3", "--out"]
    assert main(base + [str(tmp_path / "serial"), "--jobs", "1"]) == 0
    assert main(base + [str(tmp_path / "par"), "--jobs", "4"]) == 0
    assert (tmp_path / "serial" / "distance_sweep.csv").read_bytes() == \
        (tmp_path / "par" / "distance_sweep.csv").read_bytes()


def test_sweep_csv_contract(tmp_path):
    rc = main(["sweep", "--q", "0.7", "--N", "1", "4", "--max-degree", "10",
               "--out", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "distance_sweep.csv").read_text().strip().splitlines()
    assert lines[0] == DISTANCE_CSV_HEADER
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 2
    for row in rows:
        q, N, dqu, dql, margin, distq, conv = row
        assert float(dql) <= float(dqu) + 1e-8
        assert float(distq) == float(dqu)
        assert conv in ("0", "1")
    cfg = json.loads((tmp_path / "distance_sweep_config.json").read_text())
    assert cfg["q_grid"] == [0.7]


def test_sweep_config_file(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps({"q_grid": [0.5], "N_grid": [1],
                                   "max_degree": 10, "seed": 5}))
    rc = main(["sweep", "--config", str(cfgfile), "--out", str(tmp_path)])
    assert rc == 0
    lines = (tmp_path / "distance_sweep.csv").read_text().strip().splitlines()
    assert len(lines) == 2


def test_sweep_rejects_bad_grid(capsys):
    assert main(["sweep", "--q", "1.7", "--N", "1"]) == 2


def test_lipnorm_command(capsys):
    rc = main(["lipnorm", "--q", "0.5", "--podles-gen", "A", "--max-degree", "14"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["converged"] in (True, False)
    assert 0.8 < data["value"] < 0.9  # sup of sqrt(s(1 - q^2 s)) at q = 0.5


def test_lipnorm_from_json_element(tmp_path, capsys):
    from qsphere import QParam, generators_podles, to_json
    p = QParam.from_q(0.5)
    A, _, _ = generators_podles(p)
    f = tmp_path / "el.json"
    f.write_text(to_json(A))
    rc = main(["lipnorm", "--q", "0.5", "--element", str(f), "--max-degree", "12"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["value"] > 0.5


def test_mk_command(capsys):
    rc = main(["mk", "--q", "0.9", "--N", "2", "--starts", "3"])
    assert rc == 0
    data = json.loads(capsys.readouterr().out)
    assert data["mk_lower"] <= data["dq_upper"] + 1e-8
    assert len(data["start_values"]) == 3
