import json

import numpy as np
import pytest

from wkra.algebra import MalformedInput, validate_algebra
from wkra.frame import algebra_to_frame, r_min_all
from wkra.io import (algebra_from_json, algebra_to_json, dump_algebra, dump_frame, frame_from_json,
                     frame_to_json, load_algebra, load_frame, load_poset, load_representation,
                     load_structure, poset_to_json)
from wkra.models import identity_representation, relation_pairs, verify_representation


def test_algebra_round_trip(cat, tmp_path):
    for A in cat.values():
        path = tmp_path / "a.json"
        dump_algebra(A, path)
        B = load_algebra(path)
        assert B.same_tables(A) and B.names == A.names and B.name == A.name
        assert validate_algebra(B).ok


def test_frame_round_trip(cat, tmp_path):
    for A in cat.values():
        F = algebra_to_frame(A)
        path = tmp_path / "f.json"
        dump_frame(F, path)
        G = load_frame(path)
        assert (G.R == F.R).all() and (G.leq == F.leq).all()
        assert isinstance(load_structure(path), type(F))


def test_frame_generators_are_closed(s4):
    F = algebra_to_frame(s4)
    doc = frame_to_json(F)
    doc["R"] = [list(map(int, t)) for t in np.argwhere(r_min_all(F))]
    doc["R_is_generators"] = True
    assert (frame_from_json(doc).R == F.R).all()
    doc["I"] = [bool(v) for v in F.I]
    assert (frame_from_json(doc).I == F.I).all()


def test_reflexive_pairs_optional(cat):
    doc = algebra_to_json(cat["S4"])
    assert all(i != j for i, j in doc["leq"])
    doc["leq"] = doc["leq"] + [[0, 0]]
    assert algebra_from_json(doc).same_tables(cat["S4"])


def test_malformed_documents(cat):
    doc = algebra_to_json(cat["S4"])
    for broken in ({k: v for k, v in doc.items() if k != "comp"},
                   {**doc, "leq": [[0, 9]]},
                   {**doc, "neg": [0, 1]},
                   [1, 2, 3]):
        with pytest.raises(MalformedInput):
            algebra_from_json(broken)


def test_invalid_json(tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    with pytest.raises(MalformedInput):
        load_algebra(p)


def test_representation_map(wk2, tmp_path):
    P = wk2.poset
    dump_algebra(wk2, tmp_path / "wk2.json")
    (tmp_path / "p.json").write_text(json.dumps(poset_to_json(P)))
    h = identity_representation(wk2)
    doc = {"algebra": "wk2.json", "poset": "p.json",
           "map": {wk2.names[i]: sorted(map(list, relation_pairs(R))) for i, R in h.items()}}
    (tmp_path / "m.json").write_text(json.dumps(doc))
    A, Q, rels = load_representation(tmp_path / "m.json")
    assert verify_representation(A, Q, rels).ok
    del doc["map"][wk2.names[1]]
    (tmp_path / "m.json").write_text(json.dumps(doc))
    with pytest.raises(MalformedInput):
        load_representation(tmp_path / "m.json")


def test_poset_from_covers(tmp_path):
    (tmp_path / "p.json").write_text(json.dumps({"points": ["a", "b", "c"], "leq": [[0, 1], [1, 2]]}))
    P = load_poset(tmp_path / "p.json")
    assert P.leq[0, 2] and P.points == ["a", "b", "c"]
