import json
import os

import pytest

from wkra.axioms import check_associativity, check_phi3
from wkra.algebra import validate_algebra
from wkra.catalog import (ORDER, CompletionError, _file_name, catalog, catalog_documents,
                          complete_figure, finite_representation)
from wkra.io import load_algebra
from wkra.models import algebras_isomorphic, sugihara, verify_representation

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


def test_fourteen_entries(cat):
    assert list(cat) == list(ORDER)
    assert len(cat) == 14
    for A in cat.values():
        assert validate_algebra(A).ok
        assert check_phi3(A).ok
        assert check_associativity(A).ok


def test_completion_is_unique_and_matches_shipped_tables():
    for doc in catalog_documents():
        A = complete_figure(doc["figure"], name=doc["name"])
        assert A.comp.tolist() == doc["comp"], doc["name"]


def test_completion_fails_loudly_on_ambiguous_data():
    doc = next(d for d in catalog_documents() if d["name"] == "W6,4")
    fig = dict(doc["figure"])
    fig["products"] = {}
    fig["idempotent"] = []
    with pytest.raises(CompletionError):
        complete_figure(fig, name="stripped")


def test_named_isomorphisms(cat, wk2):
    assert algebras_isomorphic(cat["wk(2)"], wk2)
    assert algebras_isomorphic(cat["S4"], sugihara(4))
    assert algebras_isomorphic(cat["S6"], sugihara(6))


def test_repository_catalog_matches_package_data(cat):
    for name, A in cat.items():
        B = load_algebra(os.path.join(ROOT, "catalog", _file_name(name)))
        assert A.same_tables(B)
    assert not check_phi3(load_algebra(os.path.join(ROOT, "catalog", "S3.json"))).ok


def test_finite_representations(cat):
    for name, points in (("2", 1), ("A2", 2), ("A3", 3), ("wk(2)", 2)):
        found = finite_representation(cat[name], max_points=points)
        assert found is not None, name
        P, h = found
        assert len(P) == points
        assert verify_representation(cat[name], P, h).ok
