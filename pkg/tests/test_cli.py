import csv
import json
import math

import pytest

from lyapspec import cli
from lyapspec import map_core as mc

T0 = math.log2((1 + math.sqrt(5)) / 2)


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_pressure_two_slope(tmp_path):
    code = cli.run(["pressure", "--map", "two-slope", "--t-min", "-2", "--t-max", "2", "--grid", "81",
                    "--depth", "14", "--out", str(tmp_path)])
    assert code == 0
    rows = read_csv(tmp_path / "pressure.csv")
    assert len(rows) == 81
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["t0"] == pytest.approx(T0, abs=1e-6)
    side = json.loads((tmp_path / "pressure.csv.run.json").read_text())
    assert side["command"] == "pressure" and side["params"]["depth"] == 14
    assert (tmp_path / "summary.json.run.json").exists()


def test_pressure_csv_seventeen_digits(tmp_path):
    cli.run(["pressure", "--map", "tent", "--grid", "5", "--depth", "6", "--out", str(tmp_path)])
    row = read_csv(tmp_path / "pressure.csv")[1]
    # t = -1 on a 5-point grid over [-2, 2]; P = 2 log 2
    assert float(row["P"]) == pytest.approx(2 * math.log(2), abs=1e-15)
    assert row["P"] == format(float(row["P"]), ".17g")


def test_pressure_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.run(["pressure", "--map", "two-slope", "--grid", "21", "--depth", "8", "--out", str(d)]) == 0
    assert (a / "pressure.csv").read_bytes() == (b / "pressure.csv").read_bytes()


def test_pressure_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("LYAPSPEC_CACHE", str(tmp_path / "cache"))
    args = ["pressure", "--map", "two-slope", "--grid", "21", "--depth", "8"]
    assert cli.run(args + ["--out", str(tmp_path / "a")]) == 0
    assert len(list((tmp_path / "cache").iterdir())) == 1
    assert cli.run(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "pressure.csv").read_bytes() == (tmp_path / "b" / "pressure.csv").read_bytes()


def test_pressure_json_format(tmp_path):
    assert cli.run(["pressure", "--map", "tent", "--grid", "9", "--depth", "6", "--format", "json",
                    "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "pressure.json").read_text())
    assert len(doc["P"]) == 9 and doc["summary"]["t0"] == pytest.approx(1.0)


def test_pliss_chebyshev(tmp_path):
    code = cli.run(["pliss", "--map", "chebyshev", "--x", "0.3", "--n", "2000", "--sigma", "0.4",
                    "--out", str(tmp_path)])
    assert code == 0
    rows = read_csv(tmp_path / "pliss.csv")
    assert len(rows) == 2001
    H = [int(r["n"]) for r in rows if r["is_pliss"] == "1"]
    assert H
    phi = [float(r["phi"]) for r in rows]
    for n in H[:50]:
        assert all(phi[n] - phi[n - k] >= 0.4 * k - 1e-12 for k in range(1, n + 1))


def test_pliss_random_itinerary(tmp_path):
    assert cli.run(["pliss", "--map", "two-slope", "--random-itinerary", "--n", "300", "--sigma", "0.5",
                    "--seed", "7", "--format", "json", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "pliss.json").read_text())
    # every slope is at least log 2 > 0.5, so every time is a Pliss time
    assert doc["pliss_times"] == list(range(1, 301))


def test_pullback_csv(tmp_path):
    assert cli.run(["pullback", "--map", "tent", "--y", "0.5", "--r", "0.1", "--depth", "3",
                    "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "pullback.csv")
    assert len(rows) == 15
    assert set(rows[0]) == {"depth", "left", "right", "signature", "singular_flag"}


def test_spectrum_csv(tmp_path):
    assert cli.run(["spectrum", "--map", "two-slope", "--depth", "10", "--pressure-depth", "8",
                    "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "spectrum.csv")
    assert sum(int(r["count"]) for r in rows) == 2 ** 10


def test_info(capsys):
    assert cli.run(["info", "--map", "chebyshev"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["name"] == "chebyshev" and doc["expanding"] is False


def test_map_from_file(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps(mc.map_to_config(mc.tent_map())))
    assert cli.run(["pressure", "--map", str(path), "--grid", "5", "--depth", "4", "--out", str(tmp_path)]) == 0


@pytest.mark.parametrize("argv", [
    ["pressure", "--grid", "2"],
    ["pressure", "--t-min", "1", "--t-max", "0"],
    ["pullback", "--y", "0.5", "--r", "0"],
    ["pressure", "--map", "no-such-map"],
    ["pressure", "--bogus"],
    ["frobnicate"],
    ["pliss", "--map", "two-slope", "--x", "0.3", "--n", "10"],
    ["pressure", "--map", "/nonexistent/map.json"],
    ["verify", "--suite", "nope"],
])
def test_invalid_input_exit_one(argv, tmp_path, capsys):
    assert cli.run(argv + (["--out", str(tmp_path)] if argv[0] != "verify" and "--bogus" not in argv
                           and argv[0] != "frobnicate" else [])) == 1
    assert capsys.readouterr().err


def test_computation_failure_exit_two(tmp_path):
    assert cli.run(["pullback", "--map", "tent", "--y", "0.5", "--r", "0.1", "--depth", "30",
                    "--node-cap", "5000", "--out", str(tmp_path)]) == 2


def test_verify_failure_exit_three(monkeypatch, capsys):
    from lyapspec import verify
    monkeypatch.setitem(verify.SUITES, "map_core", [("always fails", lambda rng: (False, "forced"))])
    assert cli.run(["verify", "--suite", "map_core"]) == 3
    assert "FAIL" in capsys.readouterr().out


def test_verify_single_suite(tmp_path, capsys):
    report = tmp_path / "report.txt"
    assert cli.run(["verify", "--suite", "cocycle", "--seed", "3", "--report", str(report)]) == 0
    assert report.read_text() == capsys.readouterr().out
    assert (tmp_path / "report.txt.run.json").exists()


def test_help_exits_zero(capsys):
    assert cli.run(["--help"]) == 0
    assert "pressure" in capsys.readouterr().out
