"""The fourteen associative algebras of the wkRA3 axioms with at most six
elements, stored as JSON data under ``wkra/catalog``.

Each file holds the full tables together with the diagram data they were
completed from: the lattice covers, which elements are idempotent, and the
few named products (``0;0`` and the like).  :func:`complete_figure` rebuilds
the tables from that data alone and insists that the completion is unique
up to isomorphism.
"""

from __future__ import annotations

import os
from importlib import resources

import numpy as np

from .algebra import FiniteAlgebra, MalformedInput
from .axioms import AxiomProfile
from .finder import Batch, Family, _sorted_downsets, batch_profile, canonical_form, family_tables
from .io import algebra_from_json, algebra_to_json, _read, _write

ORDER = ("1", "2", "2^2", "A2", "A3", "S4", "W6,1", "W6,2", "W6,3",
         "W6,4", "W6,5", "W6,6", "wk(2)", "S6")

_PAIR = {"⊥": "⊤", "0": "1", "a": "~a"}
_PAIR.update({v: k for k, v in _PAIR.items()})


class CompletionError(RuntimeError):
    pass


def _file_name(name):
    return name.replace("^", "").replace(",", "_").replace("(", "").replace(")", "") + ".json"


def figure_lattice(fig):
    """Order, negation and constants of a diagram description."""
    names = list(fig["elements"])
    n = len(names)
    idx = {v: i for i, v in enumerate(names)}
    leq = np.eye(n, dtype=bool)
    for lo, hi in fig["covers"]:
        leq[idx[lo], idx[hi]] = True
    for k in range(n):
        leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
    neg = [idx[_PAIR.get(v, v)] if _PAIR.get(v, v) in idx else i for i, v in enumerate(names)]
    bot = int(np.flatnonzero(leq.all(axis=1))[0])
    top = int(np.flatnonzero(leq.all(axis=0))[0])
    one = idx[fig.get("one", "1" if "1" in idx else names[0])]
    return names, leq, neg, bot, top, one


def _matches(comp, fig, idx):
    idem = {idx[v] for v in fig["idempotent"]}
    for e in range(len(comp)):
        if (comp[e, e] == e) != (e in idem):
            return False
    for lhs, rhs in fig.get("products", {}).items():
        x, y = lhs.split(";")
        if comp[idx[x], idx[y]] != idx[rhs]:
            return False
    return True


def complete_figure(fig, name="") -> FiniteAlgebra:
    """The unique (up to isomorphism) algebra on the given lattice, negation
    and unit that satisfies the base axioms, the wkRA3 quasiequations and
    associativity and agrees with the idempotence and product annotations."""
    names, leq, neg, bot, top, one = figure_lattice(fig)
    n = len(names)
    idx = {v: i for i, v in enumerate(names)}
    skel = FiniteAlgebra(leq, np.zeros((n, n), dtype=np.int64), neg, bot, top, one, names=names)
    pts = list(skel.irreducibles)
    pos = {p: i for i, p in enumerate(pts)}
    try:
        hat = np.array([pos[skel.hat(p)] for p in pts], dtype=np.int64)
    except (KeyError, ValueError) as exc:
        raise CompletionError(f"{name}: negation does not induce an involution on points") from exc
    pleq = leq[np.ix_(pts, pts)].copy()
    I = leq[pts, one].copy()
    k = len(pts)
    fam = Family(pleq, hat, I, [np.arange(k)], _sorted_downsets(pleq))
    if fam.m != n:
        raise CompletionError(f"{name}: the order is not a distributive lattice")
    batch = Batch(fam, family_tables(fam))
    ok = np.flatnonzero(batch_profile(batch, AxiomProfile(phi3=True, assoc=True)))
    # element e of the diagram is the downset of points below it
    slot = {mask: i for i, mask in enumerate(fam.downsets)}
    to_batch = np.array([slot[sum(1 << pos[p] for p in pts if leq[p, e])] for e in range(n)])
    back = np.empty(n, dtype=np.int64)
    back[to_batch] = np.arange(n)
    found = {}
    for i in ok:
        B = batch.algebra(int(i))
        comp = back[B.comp[np.ix_(to_batch, to_batch)]]
        if not _matches(comp, fig, idx):
            continue
        A = FiniteAlgebra(leq, comp, neg, bot, top, one, names=names, name=name)
        found.setdefault(canonical_form(A), A)
    if len(found) != 1:
        raise CompletionError(f"{name}: {len(found)} completions up to isomorphism, expected 1")
    return next(iter(found.values()))


def _catalog_dir():
    return resources.files("wkra") / "catalog"


def catalog_documents():
    """The raw JSON documents in catalog order."""
    base = _catalog_dir()
    return [_read(str(base / _file_name(n))) for n in ORDER]


def catalog() -> list[FiniteAlgebra]:
    """The fourteen catalog algebras, checked against their diagram data."""
    out = []
    for doc in catalog_documents():
        A = algebra_from_json(doc)
        fig = doc["figure"]
        names, leq, neg, bot, top, one = figure_lattice(fig)
        if (names != A.names or not (leq == A.leq).all() or list(neg) != A.neg.tolist()
                or (bot, top, one) != (A.bot, A.top, A.one)
                or not _matches(A.comp, fig, {v: i for i, v in enumerate(names)})):
            raise MalformedInput(f"catalog entry {A.name} disagrees with its diagram data")
        out.append(A)
    return out


def catalog_entry(name) -> FiniteAlgebra:
    for A in catalog():
        if A.name == name:
            return A
    raise KeyError(name)


def write_catalog(directory, figures=None):
    """Complete every diagram and write one file per algebra."""
    figures = figures or {doc["name"]: doc["figure"] for doc in catalog_documents()}
    paths = []
    for name in ORDER:
        A = complete_figure(figures[name], name=name)
        path = os.path.join(directory, _file_name(name))
        doc = algebra_to_json(A)
        doc["figure"] = figures[name]
        _write(doc, path)
        paths.append(path)
    return paths


def finite_representation(A: FiniteAlgebra, max_points: int = 3):
    """Search for a representation over a small finite poset.

    Posets with up to ``max_points`` points are tried in order (via an
    embedding into wk(P)), then the Cayley representation of Cm(Z7).
    Returns (poset, list of relations) or None; callers should confirm the
    result with :func:`wkra.models.verify_representation`.
    """
    from .models import all_posets, build_wk, cayley_representation, cm_z7, find_embedding

    for n in range(max_points + 1):
        for P in all_posets(n):
            W = build_wk(P, max_elements=1024)
            h = find_embedding(A, W)
            if h is not None:
                return P, [W.relations[i] for i in h]
    h = find_embedding(A, cm_z7())
    if h is not None:
        P, rels = cayley_representation(7)
        return P, [rels[i] for i in h]
    return None
