"""JSON files for algebras, frames, posets and representation maps."""

from __future__ import annotations

import json
import os

import numpy as np

from .algebra import FiniteAlgebra, MalformedInput
from .frame import RelevanceFrame
from .models import Poset


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: not valid JSON ({exc})") from exc


def _write(obj, path):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def _need(doc, keys, what):
    if not isinstance(doc, dict):
        raise MalformedInput(f"{what} file must hold a JSON object")
    missing = [k for k in keys if k not in doc]
    if missing:
        raise MalformedInput(f"{what} file lacks {', '.join(missing)}")


def _order_matrix(n, pairs, what):
    leq = np.eye(n, dtype=bool)
    for pair in pairs:
        if len(pair) != 2 or not all(isinstance(v, int) and 0 <= v < n for v in pair):
            raise MalformedInput(f"{what}: bad order pair {pair!r}")
        leq[pair[0], pair[1]] = True
    return leq


def _order_pairs(leq):
    return [[int(i), int(j)] for i, j in np.argwhere(leq) if i != j]


# ---------------------------------------------------------------- algebras


def algebra_from_json(doc) -> FiniteAlgebra:
    _need(doc, ("elements", "leq", "comp", "neg", "one", "bot", "top"), "algebra")
    names = [str(x) for x in doc["elements"]]
    leq = _order_matrix(len(names), doc["leq"], "algebra")
    return FiniteAlgebra(leq, doc["comp"], doc["neg"], doc["bot"], doc["top"], doc["one"],
                         names=names, name=str(doc.get("name", "")))


def algebra_to_json(A: FiniteAlgebra) -> dict:
    return {
        "name": A.name,
        "elements": list(A.names),
        "leq": _order_pairs(A.leq),
        "comp": A.comp.tolist(),
        "neg": A.neg.tolist(),
        "one": int(A.one),
        "bot": int(A.bot),
        "top": int(A.top),
    }


def load_algebra(path) -> FiniteAlgebra:
    return algebra_from_json(_read(path))


def dump_algebra(A: FiniteAlgebra, path, extra=None):
    doc = algebra_to_json(A)
    if extra:
        doc.update(extra)
    _write(doc, path)


# ------------------------------------------------------------------ frames


def frame_from_json(doc) -> RelevanceFrame:
    _need(doc, ("points", "leq", "hat", "I", "R"), "frame")
    names = [str(x) for x in doc["points"]]
    k = len(names)
    leq = _order_matrix(k, doc["leq"], "frame")
    I = doc["I"]
    if all(isinstance(v, bool) for v in I) and len(I) == k:
        I = [i for i, v in enumerate(I) if v]
    for t in doc["R"]:
        if len(t) != 3:
            raise MalformedInput(f"frame: R entry {t!r} is not a triple")
    return RelevanceFrame.from_triples(
        leq, doc["hat"], I, [tuple(t) for t in doc["R"]], names=names,
        name=str(doc.get("name", "")), close=bool(doc.get("R_is_generators", False)),
    )


def frame_to_json(F: RelevanceFrame) -> dict:
    return {
        "name": F.name,
        "points": list(F.names),
        "leq": _order_pairs(F.leq),
        "hat": [int(v) for v in F.hat],
        "I": [int(i) for i in np.flatnonzero(F.I)],
        "R": [list(t) for t in F.triples()],
        "R_is_generators": False,
    }


def load_frame(path) -> RelevanceFrame:
    return frame_from_json(_read(path))


def dump_frame(F: RelevanceFrame, path):
    _write(frame_to_json(F), path)


def load_structure(path):
    """An algebra or a frame, told apart by the keys present."""
    doc = _read(path)
    if isinstance(doc, dict) and "points" in doc and "R" in doc:
        return frame_from_json(doc)
    return algebra_from_json(doc)


# ------------------------------------------------------ posets and maps


def poset_from_json(doc) -> Poset:
    """Covering pairs are enough; the order is closed reflexively and transitively."""
    _need(doc, ("points", "leq"), "poset")
    names = [str(x) for x in doc["points"]]
    _order_matrix(len(names), doc["leq"], "poset")
    return Poset.from_pairs(len(names), [tuple(p) for p in doc["leq"]], names)


def load_poset(path):
    return poset_from_json(_read(path))


def poset_to_json(P: Poset) -> dict:
    return {"points": list(P.points), "leq": _order_pairs(P.leq)}


def load_representation(path):
    """Returns (algebra, poset, h) with h a list of boolean matrices indexed
    like the algebra's elements."""
    doc = _read(path)
    _need(doc, ("algebra", "poset", "map"), "representation map")
    base = os.path.dirname(os.path.abspath(path))
    A = load_algebra(os.path.join(base, doc["algebra"]))
    P = load_poset(os.path.join(base, doc["poset"]))
    n = len(P.leq)
    h = []
    for name in A.names:
        if name not in doc["map"]:
            raise MalformedInput(f"representation map has no image for {name!r}")
        rel = np.zeros((n, n), dtype=bool)
        for pair in doc["map"][name]:
            if len(pair) != 2 or not all(isinstance(v, int) and 0 <= v < n for v in pair):
                raise MalformedInput(f"representation map: bad pair {pair!r}")
            rel[pair[0], pair[1]] = True
        h.append(rel)
    return A, P, h
