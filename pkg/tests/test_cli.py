from __future__ import annotations

import json

import pytest

from evasive.cli import run
from evasive.subspaces import ambient, save_subspace


def read(path):
    return json.loads(path.read_text())


def test_verify_table1_and_dual_chain(tmp_path, capsys):
    c, u, d, cd = (tmp_path / f for f in ("c.json", "u.json", "d.json", "cd.json"))
    assert run(["verify-table1", "--p", "2", "--s", "1", "--sweep", "-o", str(c), "--out-subspace", str(u)]) == 0
    cert = read(c)
    assert cert["k_star"] == 1 and cert["dim"] == 7 and cert["d_sweep"]["scattered"]
    assert run(["dual", str(u), "-o", str(d)]) == 0
    assert run(["check", str(d), "--h", "2", "--k", "4", "-o", str(cd)]) == 0
    assert read(cd)["k_star"] == 4
    assert run(["check", str(d), "--h", "2", "--k", "3", "--quiet"]) == 3
    assert run(["check", str(d), "--h", "2", "--verify-cert", str(cd), "--quiet"]) == 0
    assert run(["qsystem", str(d), "-o", str(tmp_path / "qs.json")]) == 0
    assert read(tmp_path / "qs.json")["d"] == 4
    assert run(["delsarte-dual", str(d), "-o", str(tmp_path / "e.json")]) == 0
    assert read(tmp_path / "e.json")["r"] == 5


def test_whole_space_violates(tmp_path, capsys):
    w = tmp_path / "w.json"
    save_subspace(ambient(2, 2, 2).whole(), str(w))
    assert run(["check", str(w), "--h", "1", "--k", "1"]) == 3
    out = json.loads(capsys.readouterr().out)
    assert out["k_star"] == 2 and out["claim"]["holds"] is False and out["witness"]["basis"]


def test_exit_codes(tmp_path, capsys, monkeypatch):
    assert run(["nonsense"]) == 2
    assert run(["check", str(tmp_path / "missing.json"), "--h", "1"]) == 2
    assert run(["construct", "gabidulin", "--q", "2", "--n", "2"]) == 2
    assert run(["construct", "gabidulin", "--q", "2", "--n", "1", "--r", "2"]) == 2
    g = tmp_path / "g.json"
    assert run(["construct", "gabidulin", "--q", "2", "--n", "5", "--r", "3", "-o", str(g)]) == 0
    monkeypatch.setenv("EVASIVE_BUDGET", "10")
    assert run(["check", str(g), "--h", "2", "--strategy", "full_enum"]) == 4
    assert run(["check", str(g), "--h", "2", "--budget", "2000", "--quiet"]) == 0


def test_constructions_via_cli(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["construct", "gabidulin", "--q", "2", "--n", "3", "--r", "2", "-o", str(a)]) == 0
    assert run(["construct", "direct-sum", "--input", str(a), "--input", str(a), "-o", str(b)]) == 0
    assert read(b)["r"] == 4
    for argv in (["subgeometry", "--q", "2", "--n", "4", "--r", "2", "--m", "2"],
                 ["guruswami", "--q", "2", "--n", "3", "--r", "3", "--h", "1"],
                 ["guruswami-sum", "--q", "2", "--n", "3", "--r", "3", "--h", "1", "--copies", "2"],
                 ["extend", "--input", str(a), "--s", "1", "--seed", "5"],
                 ["lift", "--input", str(a), "--s", "2"],
                 ["b1", "--q", "2", "--n", "5", "--r", "3", "--k", "3"],
                 ["ex00", "--q", "2", "--n", "3", "--r", "3", "--k", "3"],
                 ["dual-of-scattered", "--q", "2", "--n", "4", "--r", "3"],
                 ["scattered", "--q", "2", "--n", "5", "--r", "3"]):
        assert run(["construct"] + argv + ["--quiet"]) == 0, argv
    assert run(["construct", "scattered", "--q", "2", "--n", "7", "--r", "3", "--quiet"]) == 2


def test_bounds_and_case_table(capsys):
    assert run(["bounds", "--q", "2", "--n", "5", "--r", "3", "--h", "2", "--k", "4"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["binding"] == 8
    assert run(["case-table", "--q", "3", "--n", "5"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [r["bound"] for r in rows] == [7, 10, 11, 12, 5, 6, 8]


def test_search_and_random_scan(capsys):
    assert run(["search35", "--p", "2", "--lambda", "31369", "--recipe", "paper", "--quiet"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["lambda_exponent"] == 31369 and out["subspace"]["r"] == 3
    assert run(["search35", "--p", "2", "--lambda", "3", "--recipe", "paper", "--quiet"]) == 4
    assert run(["random-scan", "--q", "2", "--samples", "300", "--seed", "1", "--quiet"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["samples"] == 300 and len(rep["ci95"]) == 2


def test_reproducible_outputs_and_manifest(tmp_path, capsys):
    outs = []
    for jobs in ("1", "2"):
        c, m = tmp_path / f"c{jobs}.json", tmp_path / f"m{jobs}.json"
        g = tmp_path / "g.json"
        run(["construct", "gabidulin", "--q", "2", "--n", "5", "--r", "3", "-o", str(g), "--quiet"])
        assert run(["check", str(g), "--h", "2", "--jobs", jobs, "-o", str(c), "--manifest", str(m), "--quiet"]) == 0
        outs.append(c.read_bytes())
        man = read(m)
        assert man["subcommand"] == "check" and man["jobs"] == int(jobs)
        assert str(g) in man["inputs"] and str(c) in man["outputs"]
        assert man["exit_code"] == 0 and "version" in man
    assert outs[0] == outs[1]


def test_version(capsys):
    with pytest.raises(SystemExit):
        from evasive.cli import build_parser

        build_parser().parse_args(["--version"])
