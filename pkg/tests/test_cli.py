import json
import math
import os

import numpy as np
import pytest

from stepprop.cli import main

WS = json.dumps({"family": "woods_saxon", "m": 1.0, "V0": 1.0,
                 "alpha": 1.0, "hbar": 1.0})
HV = json.dumps({"family": "heaviside", "m": 1.0, "V0": 1.0,
                 "alpha": 1.0, "hbar": 1.0})


def _read_csv(path):
    with open(path) as fh:
        lines = [l.strip() for l in fh if l.strip()]
    config = json.loads(lines[0].split("# config: ", 1)[1])
    header = lines[1].split(",")
    rows = [l.split(",") for l in lines[2:]]
    return config, header, rows


def test_rates_heaviside_matches_closed_form(tmp_path):
    out = tmp_path / "rates.csv"
    rc = main(["rates", "--model", HV, "--k-range", "1.5:5:20",
               "--out", str(out)])
    assert rc == 0
    _, header, rows = _read_csv(out)
    assert header[:3] == ["k", "R2", "T2"]
    for row in rows:
        k, r2 = float(row[0]), float(row[1])
        p = math.sqrt(k * k - 2.0)
        assert r2 == pytest.approx(((k - p) / (k + p)) ** 2, rel=1e-12)


def test_malformed_model_json_exits_2(tmp_path, capsys):
    out = tmp_path / "never.csv"
    rc = main(["rates", "--model", "{not json", "--out", str(out)])
    assert rc == 2
    assert not out.exists()
    record = json.loads(capsys.readouterr().err.strip())
    assert "error" in record and "message" in record


def test_unknown_model_key_exits_2(capsys):
    bad = json.dumps({"family": "heaviside", "bogus": 1})
    assert main(["rates", "--model", bad]) == 2
    record = json.loads(capsys.readouterr().err.strip())
    assert record["error"] == "ValidationError"


def test_numerical_failure_exits_3(capsys):
    # no topological saddle exists at very long T: machine-readable exit 3
    rc = main(["classical", "--model", json.dumps(
        {"family": "woods_saxon", "m": 1, "V0": 1, "alpha": 5, "hbar": 1}),
        "--x0", "-5", "--x1", "-9.25", "--T", "11",
        "--saddles", "real+caustic+topological"])
    assert rc == 3
    record = json.loads(capsys.readouterr().err.strip())
    assert record["error"] == "NoTopologicalSaddleError"


def test_propagate_roundtrip_reproducible(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = ["propagate", "--model", HV, "--x0=-4", "--x1-range=-6:-5:3",
            "--T", "10"]
    assert main(args + ["--out", str(out1)]) == 0
    config, header, rows = _read_csv(out1)
    # re-run from the echoed config
    assert main(["propagate", "--model", json.dumps(config["model"]),
                 f"--x0={config['x0']}", f"--x1-range={config['x1_range']}",
                 "--T", str(config["T"]), "--out", str(out2)]) == 0
    assert out1.read_text().split("\n", 1)[1] == out2.read_text().split("\n", 1)[1]


def test_classical_json_fields(capsys):
    rc = main(["classical", "--model", HV, "--x0=-4", "--x1=-3",
               "--T", "10"])
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    kinds = {s["kind"] for s in payload["saddles"]}
    assert kinds == {"direct", "low_bounce", "high_bounce"}
    for s in payload["saddles"]:
        assert set(s) == {"kind", "E_re", "E_im", "S_re", "S_im",
                          "vv_re", "vv_im", "relevant"}


def test_spectrum_csv(tmp_path):
    out = tmp_path / "spec.csv"
    rc = main(["spectrum", "--model", HV, "--x0", "5", "--x1", "4",
               "--T", "10", "--kind", "fourier", "--A", "1", "--B", "6",
               "--n-omega", "128", "--tau-range", "4:8:41",
               "--out", str(out)])
    assert rc == 0
    _, header, rows = _read_csv(out)
    assert header == ["grid", "value", "err"]
    assert len(rows) == 41


def test_reproduce_fig1(tmp_path):
    rc = main(["reproduce", "fig1", "--out-dir", str(tmp_path), "--coarse"])
    assert rc == 0
    assert (tmp_path / "fig1_potentials.csv").exists()


def test_reproduce_unknown_recipe(tmp_path, capsys):
    assert main(["reproduce", "fig99", "--out-dir", str(tmp_path)]) == 2


def test_propagate_threads_deterministic(tmp_path):
    out1 = tmp_path / "serial.csv"
    out2 = tmp_path / "par.csv"
    base = ["propagate", "--model", HV, "--x0=-4", "--x1-range=-7:-5:5",
            "--T", "10"]
    assert main(base + ["--out", str(out1)]) == 0
    assert main(base + ["--threads", "2", "--out", str(out2)]) == 0
    assert out1.read_text() == out2.read_text()
