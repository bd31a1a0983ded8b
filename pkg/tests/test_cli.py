import csv
import random

import pytest

from langeq import automata as au
from langeq.autfmt import read_aut, write_aut
from langeq.cli import main
from langeq.generate import TWO_LATCH_BLIF, two_latch, random_network, shift_family
from langeq.solver import machine_automaton, make_problem


@pytest.fixture
def two_latch_file(tmp_path):
    path = tmp_path / "two_latch.blif"
    path.write_text(TWO_LATCH_BLIF)
    return path


def test_solve_both_flows(two_latch_file, tmp_path, capsys):
    out = tmp_path / "two_latch.aut"
    rc = main(["solve", "--circuit", str(two_latch_file), "--split", "cs_2", "--flow", "both",
               "--out", str(out), "--dot", str(tmp_path / "two_latch.dot")])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert stdout.count("states=") == 2 and "explored=" in stdout and "time_s=" in stdout
    part = tmp_path / "two_latch.partitioned.aut"
    mono = tmp_path / "two_latch.monolithic.aut"
    assert (tmp_path / "two_latch.partitioned.dot").exists()
    p = make_problem(two_latch(), ["cs_2"])
    a = read_aut(part.read_text(), manager=p.manager)
    b = read_aut(mono.read_text(), manager=p.manager)
    assert au.equivalent(a, b)


def test_solve_errors(two_latch_file, tmp_path, capsys):
    out = str(tmp_path / "x.aut")
    assert main(["solve", "--circuit", str(two_latch_file), "--split", "nope", "--out", out]) == 1
    assert "nope" in capsys.readouterr().err
    assert main(["solve", "--circuit", str(two_latch_file), "--split", "cs_2", "--out", out,
                 "--node-limit", "10"]) == 3
    assert main(["solve", "--circuit", str(tmp_path / "missing.blif"), "--split", "k:1",
                 "--out", out]) == 1
    bad = tmp_path / "bad.blif"
    bad.write_text(".inputs a\n.outputs y\n.names a y\n1 1\n0 0\n")
    assert main(["solve", "--circuit", str(bad), "--split", "k:1", "--out", out]) == 1
    assert "line 5" in capsys.readouterr().err
    assert main(["solve", "--circuit", str(two_latch_file), "--out", out]) == 1


def test_solve_timeout(tmp_path):
    path = tmp_path / "s14.blif"
    path.write_text(shift_family(14).to_blif())
    rc = main(["solve", "--circuit", str(path), "--split", "r13", "--flow", "monolithic",
               "--out", str(tmp_path / "s.aut"), "--timeout-s", "0.2"])
    assert rc == 3


def test_solve_no_solution(two_latch_file, tmp_path, monkeypatch, capsys):
    # a latch split always admits X_p, so the empty outcome is forced here
    from langeq import cli
    from langeq.netlist import parse_blif_lite
    from langeq.solver import problem_from_networks, solve_partitioned
    s = parse_blif_lite(".inputs i\n.outputs o\n.names o\n1\n.end\n")
    f = parse_blif_lite(".inputs i v\n.outputs o u\n.names o\n.names i u\n1 1\n.end\n")
    empty = solve_partitioned(problem_from_networks(f, s, ["u"], ["v"]))
    assert empty.is_empty
    monkeypatch.setitem(cli.FLOWS, "partitioned", lambda p, **kw: empty)
    rc = main(["solve", "--circuit", str(two_latch_file), "--split", "cs_2",
               "--out", str(tmp_path / "c.aut")])
    assert rc == 2
    assert "no solution" in capsys.readouterr().err
    assert ".states 0" in (tmp_path / "c.aut").read_text()


def test_verify(two_latch_file, tmp_path, capsys):
    out = tmp_path / "csf.aut"
    assert main(["solve", "--circuit", str(two_latch_file), "--split", "cs_2", "--out", str(out)]) == 0
    capsys.readouterr()
    assert main(["verify", "--circuit", str(two_latch_file), "--split", "cs_2", "--csf", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3 and all(ln.startswith("PASS") for ln in lines)

    # corrupt: let the initial state jump to the universal sink on a missing label
    text = out.read_text().replace(".trans 0 000 2", ".trans 0 000 2\n.trans 0 100 1")
    assert text != out.read_text()
    bad = tmp_path / "bad.aut"
    bad.write_text(text)
    assert main(["verify", "--circuit", str(two_latch_file), "--split", "cs_2", "--csf", str(bad)]) == 4
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("FAIL (2)")

    # the particular solution itself
    p = make_problem(two_latch(), ["cs_2"])
    xp = tmp_path / "xp.aut"
    xp.write_text(write_aut(machine_automaton(p.xp, all_states=False), "xp"))
    assert main(["verify", "--circuit", str(two_latch_file), "--split", "cs_2", "--csf", str(xp)]) == 0

    wrong = tmp_path / "wrong.aut"
    wrong.write_text(".aut w\n.labels i o\n.states 1\n.initial 0\n.accepting 0\n.end\n")
    assert main(["verify", "--circuit", str(two_latch_file), "--split", "cs_2", "--csf", str(wrong)]) == 1


def test_bench(tmp_path, capsys):
    rng = random.Random(0)
    lines = []
    for k in range(3):
        path = tmp_path / f"c{k}.blif"
        path.write_text(random_network(rng, 2, 1, 4).to_blif())
        lines.append(f"c{k} {path.name} k:2")
    (tmp_path / "s14.blif").write_text(shift_family(14).to_blif())
    lines.append("slow s14.blif r13")
    (tmp_path / "m.txt").write_text("\n".join(lines) + "\n")
    out = tmp_path / "b.csv"
    assert main(["bench", "--manifest", str(tmp_path / "m.txt"), "--csv", str(out),
                 "--timeout-s", "0.5", "--jobs", "2"]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["name", "i", "o", "cs", "f_cs", "x_cs", "csf_states", "part_s", "mono_s", "ratio"]
    assert len(rows) == 5
    for r in rows[1:4]:
        assert r[8] != "CNC"
        assert r[9] == f"{float(r[8]) / float(r[7]):.1f}"
    slow = rows[4]
    assert slow[7] != "CNC" and slow[8] == "CNC" and slow[9] == "-"
    assert slow[3:6] == ["14", "13", "1"]


def test_export(two_latch_file, tmp_path):
    dot = tmp_path / "f.dot"
    assert main(["export", "--circuit", str(two_latch_file), "--completed", "--dot", str(dot)]) == 0
    nodes = [ln for ln in dot.read_text().splitlines() if "circle" in ln]
    assert len(nodes) == 5
    aut = tmp_path / "csf.aut"
    main(["solve", "--circuit", str(two_latch_file), "--split", "cs_1", "--out", str(aut)])
    again = tmp_path / "again.aut"
    assert main(["export", "--in", str(aut), "--out", str(again)]) == 0
    assert again.read_bytes() == aut.read_bytes()
    empty = tmp_path / "e.aut"
    empty.write_text(".aut e\n.labels a\n.states 0\n.accepting\n.end\n")
    assert main(["export", "--in", str(empty), "--dot", str(dot)]) == 0
    assert '"empty"' in dot.read_text()
    garbage = tmp_path / "g.aut"
    garbage.write_text(".aut g\n.labels a\n.states 1\n.initial 0\n.trans 0 x 0\n")
    assert main(["export", "--in", str(garbage), "--dot", str(dot)]) == 1
    assert main(["export", "--dot", str(dot)]) == 1
