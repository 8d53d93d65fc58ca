import json
import os

import pytest

from wkra.cli import run

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CAT = os.path.join(ROOT, "catalog")


def cat_file(name):
    return os.path.join(CAT, name)


def test_check_s4_passes(capsys):
    assert run(["check", cat_file("S4.json"), "--profile", "wkra3"]) == 0
    assert "PASS" in capsys.readouterr().out


def test_check_s3_fails_with_named_witness(capsys):
    assert run(["check", cat_file("S3.json"), "--profile", "wkra2"]) == 1
    out = capsys.readouterr().out
    assert "phi2-2<=" in out and "s=a0" in out and "t=a-1" in out


def test_text_and_json_carry_the_same_verdicts(capsys):
    run(["check", cat_file("S3.json"), "--profile", "wkra3"])
    text = capsys.readouterr().out
    run(["--format", "json", "check", cat_file("S3.json"), "--profile", "wkra3"])
    data = json.loads(capsys.readouterr().out)
    for r in data["results"]:
        mark = "pass" if r["passed"] else "FAIL"
        assert f"[{mark}] {r['label']}" in text
        if r["witness"]:
            for k, v in r["witness"].items():
                assert f"{k}={v}" in text


def test_pebble_game_on_s3(capsys):
    assert run(["game", cat_file("S3.json"), "--pebbles", "2", "--solve"]) == 1
    assert "∀ wins" in capsys.readouterr().out
    assert run(["game", cat_file("S4.json"), "--pebbles", "3", "--solve"]) == 0


def test_round_game_and_transcript(tmp_path, capsys):
    t = tmp_path / "t.json"
    assert run(["game", cat_file("S3.json"), "--rounds", "2", "--transcript", str(t)]) == 1
    moves = json.loads(t.read_text())
    assert moves[0]["move"] == "init" and moves[-1]["move"] == "end"
    assert run(["game", cat_file("wk2.json"), "--rounds", "2"]) == 0
    assert run(["game", cat_file("S6.json"), "--rounds", "3", "--limit", "5"]) == 1
    assert "inconclusive" in capsys.readouterr().out


def test_enumerate(capsys):
    assert run(["enumerate", "--size", "6", "--profile", "wkra3+assoc"]) == 0
    out = capsys.readouterr().out
    assert "total: 14" in out and "size 6: 8" in out and "diagonal:" in out


def test_enumerate_emit(tmp_path, capsys):
    assert run(["enumerate", "--size", "4", "--profile", "wkra3+assoc", "--emit", str(tmp_path)]) == 0
    assert len(list(tmp_path.glob("*.json"))) == 6
    assert run(["--format", "json", "enumerate", "--size", "2", "--profile", "wkra2"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out[out.index("{\n"):])["total"] == 2


def test_conversions_round_trip(tmp_path, capsys):
    f = tmp_path / "f.json"
    a = tmp_path / "a.json"
    assert run(["to-frame", cat_file("wk2.json"), "-o", str(f)]) == 0
    assert run(["to-algebra", str(f), "-o", str(a)]) == 0
    assert run(["check", str(a), "--profile", "wkra3+assoc"]) == 0
    assert run(["check", str(f), "--profile", "wkra3"]) == 0
    assert run(["to-algebra", cat_file("wk2.json")]) == 2


def test_wk_and_verify_rep(tmp_path, capsys):
    (tmp_path / "p.json").write_text(json.dumps({"points": ["0", "1"], "leq": [[0, 1]]}))
    out = tmp_path / "wk.json"
    assert run(["wk", "--poset", str(tmp_path / "p.json"), "--emit", str(out)]) == 0
    assert "6 elements" in capsys.readouterr().out
    doc = json.loads(out.read_text())
    rels = {"∅": [], "{(0,1)}": [[0, 1]], "{(0,0),(0,1)}": [[0, 0], [0, 1]],
            "{(0,1),(1,1)}": [[0, 1], [1, 1]], "{(0,0),(0,1),(1,1)}": [[0, 0], [0, 1], [1, 1]],
            "{(0,0),(0,1),(1,0),(1,1)}": [[0, 0], [0, 1], [1, 0], [1, 1]]}
    assert set(doc["elements"]) == set(rels)
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"algebra": "wk.json", "poset": "p.json", "map": rels}))
    assert run(["verify-rep", "--map", str(m)]) == 0
    rels["{(0,1)}"] = []
    m.write_text(json.dumps({"algebra": "wk.json", "poset": "p.json", "map": rels}))
    assert run(["verify-rep", "--map", str(m)]) == 1


def test_catalog_command(tmp_path, capsys):
    assert run(["catalog", "--emit", str(tmp_path)]) == 0
    assert "total: 14" in capsys.readouterr().out
    assert len(list(tmp_path.glob("*.json"))) == 14


def test_sigma_command(tmp_path, capsys):
    assert run(["sigma", "0"]) == 0
    assert "forall a b." in capsys.readouterr().out
    assert run(["sigma", "1", "--eval", cat_file("wk2.json"), "-o", str(tmp_path / "s.txt")]) == 0
    assert "true" in capsys.readouterr().out
    assert run(["sigma", "1", "--eval", cat_file("S3.json")]) == 1
    assert run(["sigma", "2"]) == 2


def test_discriminator_command(capsys):
    assert run(["discriminator", cat_file("A2.json")]) == 0
    assert run(["discriminator", cat_file("wk2.json")]) == 1
    assert "fails on 20 triples" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    [], ["check"], ["frobnicate"], ["game", "x.json", "--solve"],
    ["enumerate", "--size", "12"], ["enumerate", "--size", "3", "--profile", "nope"],
    ["game", os.path.join(CAT, "S4.json")],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2


def test_malformed_input(tmp_path, capsys):
    assert run(["check", str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert run(["check", str(bad)]) == 3
    bad.write_text(json.dumps({"elements": ["x"], "leq": [], "comp": [[3]], "neg": [0],
                               "one": 0, "bot": 0, "top": 0}))
    assert run(["check", str(bad)]) == 3
