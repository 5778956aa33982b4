import os

import numpy as np
import pytest

from wavecomove.cli import run

from conftest import ar1


def write_series(path, values, start=(1990, 1)):
    y, m = start
    lines = ["date,value"]
    for v in values:
        lines.append(f"{y:04d}-{m:02d}-01,{float(v)!r}")
        m += 1
        if m == 13:
            y, m = y + 1, 1
    path.write_text("\n".join(lines) + "\n")
    return str(path)


@pytest.fixture(scope="module")
def data(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    rng = np.random.default_rng(0)
    n = 160
    t = np.arange(n)
    z = np.sin(2 * np.pi * t / 16) + ar1(0.5, n, rng)
    x = 50 + z + 0.3 * rng.normal(size=n)
    y = 80 + z + 0.3 * rng.normal(size=n)
    return {
        "x": write_series(d / "oil.csv", x),
        "y": write_series(d / "food.csv", y, start=(1990, 3)),
        "z": write_series(d / "gsci.csv", 20 + z),
        "const": write_series(d / "flat.csv", np.full(n, 3.0)),
    }


def files(p):
    return sorted(f for f in os.listdir(p))


def test_coherence_outputs(data, tmp_path, capsys):
    out = tmp_path / "o"
    rc = run(["coherence", "--x", data["x"], "--y", data["y"], "--alpha", "0.05",
              "--runs", "100", "--seed", "42", "--out", str(out)])
    assert rc == 0
    assert {"coherence.csv", "phase.csv", "coherence.png", "phase_arrows.csv", "coi.csv"} <= set(files(out))
    lines = capsys.readouterr().out.strip().split("\n")
    assert len(lines) == len(files(out))
    head = (out / "coherence.csv").read_text().split("\n")[0]
    assert head == "time_index,scale,value,significant"


def test_coherence_deterministic(data, tmp_path):
    outs = []
    for k in range(2):
        o = tmp_path / f"r{k}"
        assert run(["coherence", "--x", data["x"], "--y", data["y"], "--runs", "100",
                    "--seed", "42", "--format", "csv", "--out", str(o)]) == 0
        outs.append(o)
    for name in files(outs[0]):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_weem_levels(data, tmp_path):
    o = tmp_path / "w"
    assert run(["weem", "--x", data["x"], "--levels", "2:7", "--filter", "la8",
                "--out", str(o)]) == 0
    lines = (o / "weem.csv").read_text().strip().split("\n")
    assert lines[0].startswith("J,WE,WE_wn,WEEM")
    assert [int(r.split(",")[0]) for r in lines[1:]] == [2, 3, 4, 5, 6, 7]
    assert (o / "weem.png").exists()


def test_cweem_both_directions(data, tmp_path):
    o = tmp_path / "c"
    assert run(["cweem", "--x", data["y"], "--y", data["z"], "--levels", "2:5",
                "--format", "csv", "--out", str(o)]) == 0
    rows = [r.split(",") for r in (o / "cweem.csv").read_text().strip().split("\n")[1:]]
    assert len(rows) == 8
    assert {r[1] for r in rows} == {"food->gsci", "gsci->food"}


def test_stats_and_cwt_and_pcoh(data, tmp_path):
    assert run(["stats", "--x", data["x"], "--y", data["y"], "--out", str(tmp_path / "s")]) == 0
    text = (tmp_path / "s" / "stats.csv").read_text().split("\n")
    assert text[0].startswith("series,n,mean") and len(text) == 4
    assert run(["cwt", "--x", data["x"], "--out", str(tmp_path / "w")]) == 0
    assert {"power.csv", "power.png", "coi.csv"} <= set(files(tmp_path / "w"))
    assert run(["pcoh", "--x", data["x"], "--y", data["y"], "--z", data["z"], "--runs", "0",
                "--out", str(tmp_path / "p")]) == 0
    assert {"pcoh.csv", "pphase.csv", "pcoh.png"} <= set(files(tmp_path / "p"))


def test_usage_errors(data, tmp_path, capsys):
    o = tmp_path / "u"
    assert run(["coherence", "--x", data["x"], "--out", str(o)]) == 2
    assert "--y" in capsys.readouterr().err
    assert run(["coherence", "--x", data["x"], "--y", data["y"], "--alpha", "1.5",
                "--out", str(o)]) == 2
    assert "--alpha" in capsys.readouterr().err
    assert run(["weem", "--x", data["x"], "--bogus", "1"]) == 2
    assert run(["weem", "--x", data["x"], "--filter", "db99"]) == 2
    assert run(["weem", "--x", data["x"], "--levels", "5:2"]) == 2
    assert not o.exists()


def test_data_error_leaves_no_files(data, tmp_path, capsys):
    o = tmp_path / "d"
    o.mkdir()
    rc = run(["coherence", "--x", data["x"], "--y", data["const"], "--runs", "0", "--out", str(o)])
    assert rc == 1
    assert "DegenerateSeries" in capsys.readouterr().err
    assert files(o) == []
    rc = run(["weem", "--x", data["x"], "--levels", "2:12", "--out", str(o)])
    assert rc == 1 and files(o) == []


def test_missing_file_is_data_error(tmp_path):
    assert run(["stats", "--x", str(tmp_path / "nope.csv"), "--out", str(tmp_path)]) == 1


def test_config_file(data, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# defaults\nx = {data['x']}\nlevels = 2:4\nformat = csv\nbase = 2\n")
    o = tmp_path / "cfg"
    assert run(["weem", "--config", str(cfg), "--out", str(o)]) == 0
    rows = (o / "weem.csv").read_text().strip().split("\n")[1:]
    assert len(rows) == 3 and rows[0].split(",")[4] == "2"
    assert files(o) == ["weem.csv"]
    # flags override the file
    o2 = tmp_path / "cfg2"
    assert run(["weem", "--config", str(cfg), "--levels", "2:3", "--out", str(o2)]) == 0
    assert len((o2 / "weem.csv").read_text().strip().split("\n")) == 3


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = red\n")
    assert run(["weem", "--config", str(cfg)]) == 2
