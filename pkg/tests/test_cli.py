"""CLI subcommands: outputs, exit codes, determinism."""

import json

import pytest

from gaugetree.cli import main, parse_gauge_spec, read_csv_table


def run(argv):
    return main([str(a) for a in argv])


@pytest.fixture
def maps_file(tmp_path):
    path = tmp_path / "maps.json"
    path.write_text(json.dumps([{"kind": "bit_flip"}, {"kind": "shift"}]))
    return str(path)


def test_parse_gauge_spec():
    g = parse_gauge_spec("power:1/2")
    assert g.kind == "power"
    g = parse_gauge_spec("power_log:1,1")
    assert g.kind == "power_log"
    g = parse_gauge_spec("table:1=1/2,2=1/4")
    assert g.kind == "table"
    import argparse

    with pytest.raises(argparse.ArgumentTypeError):
        parse_gauge_spec("power:sideways")
    with pytest.raises(argparse.ArgumentTypeError):
        parse_gauge_spec("nope:1")


def test_bad_gauge_exits_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        run(["schedule", "--gauge", "power:x", "--depth", 8, "--out", tmp_path / "o.json"])
    assert e.value.code == 2


def test_schedule_outputs(tmp_path):
    out = tmp_path / "sched.json"
    csv_out = tmp_path / "sched.csv"
    assert run([
        "schedule", "--gauge", "power_log:1,1", "--depth", 64,
        "--out", out, "--csv", csv_out,
    ]) == 0
    data = json.loads(out.read_text())
    assert data["schedule"]["indices"] == [1, 3, 7, 15, 31, 63]
    assert data["manifest"]["command"] == "schedule"
    header, rows = read_csv_table(str(csv_out))
    assert header == ["n", "cap", "in_schedule"]
    assert len(rows) == 64
    assert csv_out.read_text().startswith("# manifest: ")


def test_schedule_empty_warns(tmp_path, capsys):
    out = tmp_path / "empty.json"
    assert run(["schedule", "--gauge", "power:1", "--depth", 16, "--out", out]) == 0
    assert "warning" in json.loads(out.read_text())
    assert "empty schedule" in capsys.readouterr().err


def test_measure_command(tmp_path):
    sched_out = tmp_path / "s.json"
    run(["schedule", "--gauge", "power:1/2", "--depth", 20, "--out", sched_out])
    schedule = json.loads(sched_out.read_text())["schedule"]
    tree_file = tmp_path / "tree.json"
    tree_file.write_text(json.dumps({
        "schedule": schedule,
        "selector": {"kind": "constant", "bit": 0},
        "depth": 20,
    }))
    out = tmp_path / "m.json"
    csv_out = tmp_path / "m.csv"
    assert run([
        "measure", "--tree", tree_file, "--gauge", "power:1/2",
        "--delta-exp", 4, "--out", out, "--csv", csv_out,
    ]) == 0
    cert = json.loads(out.read_text())["certificate"]
    assert cert["lower"]["value"] == "1"
    assert cert["upper"]["value"] == "1"
    header, rows = read_csv_table(str(csv_out))
    assert header[0] == "n"
    assert len(rows) == 21


def test_antichain_pipeline_and_determinism(tmp_path, maps_file):
    out1, out2 = tmp_path / "a1.json", tmp_path / "a2.json"
    argv = [
        "antichain", "--gauge", "power_log:1,1", "--maps", maps_file,
        "--depth", 64, "--stages", 3, "--out",
    ]
    assert run(argv + [out1]) == 0
    assert run(argv + [out2]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    report = json.loads(out1.read_text())
    cert = report["game_certificate"]
    assert cert["stages_executed"] == 12
    for req in cert["requirements"]:
        assert req["stages"] == 3
    for row in cert["escape_report"]["per_map"]:
        assert row["unaccounted"] == 0
    assert report["measure_certificate"]["frostman"]["lower"] == "1"
    assert report["measure_certificate"]["delta_exp"] >= 1
    assert report["dimension"]["depth"] == 60


def test_antichain_infeasible_exits_3(tmp_path, maps_file, capsys):
    out = tmp_path / "x.json"
    code = run([
        "antichain", "--gauge", "power_log:1,1", "--maps", maps_file,
        "--depth", 16, "--stages", 9, "--out", out,
    ])
    assert code == 3
    assert "infeasible" in capsys.readouterr().err
    assert not out.exists()


def test_transfer_four_cover(tmp_path):
    out = tmp_path / "fc.csv"
    assert run(["transfer", "four-cover", "--count", 50, "--out", out]) == 0
    header, rows = read_csv_table(str(out))
    assert header[-1] == "pass"
    assert all(r[-1] == "1" for r in rows)


def test_transfer_interleave_check(tmp_path):
    out = tmp_path / "ic.csv"
    assert run([
        "transfer", "interleave-check", "--count", 50, "--length", 60, "--out", out,
    ]) == 0
    _, rows = read_csv_table(str(out))
    assert len(rows) == 50
    assert all(r[-1] == "1" for r in rows)


def test_transfer_cube_map(tmp_path):
    out = tmp_path / "cm.csv"
    assert run([
        "transfer", "cube-map", "--bits", "011011", "--n", 2, "--out", out,
    ]) == 0
    _, rows = read_csv_table(str(out))
    assert rows == [["0", "3/8"], ["1", "5/8"]]


def test_plot_svg(tmp_path):
    table = tmp_path / "t.csv"
    run(["schedule", "--gauge", "power_log:1,1", "--depth", 32,
         "--out", tmp_path / "s.json", "--csv", table])
    out1, out2 = tmp_path / "p1.svg", tmp_path / "p2.svg"
    assert run(["plot", "--table", table, "--x", "n", "--y", "cap", "--out", out1]) == 0
    assert run(["plot", "--table", table, "--x", "n", "--y", "cap", "--out", out2]) == 0
    svg = out1.read_text()
    assert svg.startswith('<?xml version="1.0"')
    assert "<polyline" in svg and "</svg>" in svg
    assert out1.read_bytes() == out2.read_bytes()


def test_plot_missing_column_exits_2(tmp_path, capsys):
    table = tmp_path / "t.csv"
    run(["schedule", "--gauge", "power_log:1,1", "--depth", 16,
         "--out", tmp_path / "s.json", "--csv", table])
    assert run(["plot", "--table", table, "--x", "n", "--y", "bogus",
                "--out", tmp_path / "p.svg"]) == 2
    assert "missing column" in capsys.readouterr().err


def test_json_outputs_are_sorted_and_manifested(tmp_path):
    out = tmp_path / "s.json"
    run(["schedule", "--gauge", "power:1/2", "--depth", 8, "--out", out])
    text = out.read_text()
    data = json.loads(text)
    assert text == json.dumps(data, sort_keys=True, indent=2) + "\n"
    m = data["manifest"]
    assert m["tool"] == "gaugetree"
    assert "version" in m and "config" in m
