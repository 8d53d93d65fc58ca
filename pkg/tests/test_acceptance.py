"""The ten acceptance criteria, at exact tolerance.

Each test records one ``criterion N: PASS|FAIL ...`` line; the lines are
printed in the terminal summary (see conftest.py), or directly when this file
is run as a script.  Criteria 2 and 3 share one pass over the full
population of base algebras with at most six elements; the pebble games make
that pass take several minutes.
"""

import itertools
import time

import numpy as np
import pytest

from wkra.algebra import eval_discriminator_term
from wkra.axioms import (AxiomProfile, check_associativity, check_diagonal,
                         check_frame_conditions_3, check_phi2, check_phi3, check_top_simple)
from wkra.catalog import catalog, finite_representation
from wkra.finder import (EnumerationTask, batch_frame_conditions, batch_profile, enumerate_algebras,
                         iter_batches)
from wkra.frame import algebra_to_frame, frame_to_algebra, frames_isomorphic
from wkra.games import EXISTS, FORALL, decide_gamma, solve_pebble_game
from wkra.models import (Poset, algebras_isomorphic, all_posets, build_wk, cayley_representation,
                         cm_z7, direct_product, discriminator_lemma_failures, extend_generators,
                         find_embedding, hom_even_to_odd, identity_representation,
                         is_homomorphism, point_subalgebras, sugihara, verify_representation)

RESULTS = {}


def record(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    return ok


@pytest.fixture(scope="module")
def cat():
    return {A.name: A for A in catalog()}


@pytest.fixture(scope="module")
def population():
    """Verdicts of every method on every base algebra with at most six
    elements, plus the round trips of criterion 4."""
    p2, p3 = AxiomProfile(phi2=True), AxiomProfile(phi3=True)
    out = {"total": 0, "lemma1": [], "lemma2": [], "g2": [], "g3": [], "trip": [],
           "phi2_true": 0, "phi3_true": 0}
    t0 = time.time()
    for batch in iter_batches(6):
        phi2 = batch_profile(batch, p2)
        phi3 = batch_profile(batch, p3)
        fc2 = batch_frame_conditions(batch, 2)
        fc3 = batch_frame_conditions(batch, 3)
        out["total"] += len(batch)
        out["phi2_true"] += int(phi2.sum())
        out["phi3_true"] += int(phi3.sum())
        for i in np.flatnonzero(phi2 != fc2):
            out["lemma1"].append((batch, int(i)))
        for i in np.flatnonzero(phi3 != fc3):
            out["lemma2"].append((batch, int(i)))
        for i in range(len(batch)):
            F = batch.frame(i)
            if solve_pebble_game(F, 2).exists_wins != bool(phi2[i]):
                out["g2"].append((batch, i))
            if solve_pebble_game(F, 3).exists_wins != bool(phi3[i]):
                out["g3"].append((batch, i))
            A = frame_to_algebra(F)
            G = algebra_to_frame(A)
            B = frame_to_algebra(G)
            same_frame = ((G.R == F.R).all() and (G.leq == F.leq).all()
                          and (G.hat == F.hat).all() and (G.I == F.I).all())
            if not (same_frame or frames_isomorphic(F, G)):
                out["trip"].append((batch, i, "frame"))
            if not (A.same_tables(B) or algebras_isomorphic(A, B)):
                out["trip"].append((batch, i, "algebra"))
    out["seconds"] = time.time() - t0
    return out


def _describe(batch, i):
    F = batch.frame(i)
    return (f"k={F.k} m={batch.m} hat={F.hat.tolist()} "
            f"I={np.flatnonzero(F.I).tolist()} |R|={int(F.R.sum())}")


# ------------------------------------------------------------------ 1


def test_criterion_01_catalog_reproduction(cat):
    found = enumerate_algebras(EnumerationTask(6, AxiomProfile(phi3=True, assoc=True)))
    algs = [A for _, A in found]
    match = {}
    for i, A in enumerate(algs):
        hits = [name for name, B in cat.items()
                if B.m == A.m and find_embedding(A, B) is not None]
        match[i] = hits
    bijective = (len(algs) == 14 and all(len(h) == 1 for h in match.values())
                 and len({h[0] for h in match.values()}) == 14)
    ok = record(1, bijective, f"{len(algs)} classes, matched to catalog: "
                f"{sorted(h[0] for h in match.values() if len(h) == 1)}")
    assert ok


# ------------------------------------------------------------------ 2


@pytest.mark.slow
def test_criterion_02_axioms_equal_frame_conditions(population):
    l1, l2 = population["lemma1"], population["lemma2"]
    detail = (f"{population['total']} algebras; wkRA2 vs conditions-2 mismatches: {len(l1)}, "
              f"wkRA3 vs conditions-3 mismatches: {len(l2)}")
    for batch, i in (l1 + l2)[:3]:
        A = batch.algebra(i)
        F = batch.frame(i)
        fails = [r.label for r in check_frame_conditions_3(F).failures]
        detail += f"; mismatch {_describe(batch, i)} phi3={check_phi3(A).ok} failing {fails}"
    ok = record(2, not l1 and not l2, detail)
    assert ok


# ------------------------------------------------------------------ 3


@pytest.mark.slow
def test_criterion_03_pebble_games_equal_axioms(population):
    g2, g3 = population["g2"], population["g3"]
    detail = (f"{population['total']} algebras; 2-pebble mismatches: {len(g2)}, "
              f"3-pebble mismatches: {len(g3)}")
    if g3:
        # each 3-pebble mismatch is a wkRA3 algebra on which the challenger wins;
        # the bounded algebra game confirms it is not representable
        forall = 0
        for batch, i in g3:
            A = batch.algebra(i)
            if check_phi3(A).ok and decide_gamma(A, 3).winner == FORALL:
                forall += 1
        detail += (f"; of the 3-pebble mismatches, {forall} pass the wkRA3 axioms yet lose "
                   f"the 3-round algebra game")
    ok = record(3, not g2 and not g3, detail)
    assert ok


# ------------------------------------------------------------------ 4


@pytest.mark.slow
def test_criterion_04_round_trip(population, cat):
    bad = population["trip"]
    for A in cat.values():
        F = algebra_to_frame(A)
        if not (algebras_isomorphic(frame_to_algebra(F), A)
                and frames_isomorphic(algebra_to_frame(frame_to_algebra(F)), F)):
            bad.append(A.name)
    ok = record(4, not bad, f"{population['total']} frames and algebras, {len(bad)} failures")
    assert ok


# ------------------------------------------------------------------ 5


WK2_ELEMENTS = ["∅", "{(0,1)}", "{(0,0),(0,1)}", "{(0,1),(1,1)}",
                "{(0,0),(0,1),(1,1)}", "{(0,0),(0,1),(1,0),(1,1)}"]


def test_criterion_05_wk2():
    W = build_wk(Poset.chain(2))
    checks = {
        "six elements": W.m == 6,
        "element list": W.names == WK2_ELEMENTS,
        "one is the order": W.names[W.one] == "{(0,0),(0,1),(1,1)}",
        "wkRA3": check_phi3(W).ok,
        "associative": check_associativity(W).ok,
        "identity representation": verify_representation(W, W.poset,
                                                         identity_representation(W)).ok,
    }
    ok = record(5, all(checks.values()), ", ".join(f"{k}: {v}" for k, v in checks.items()))
    assert ok


# ------------------------------------------------------------------ 6


def test_criterion_06_w62_in_cm_z7(cat):
    W = cat["W6,2"]
    Z = cm_z7()
    h = extend_generators(W, Z, {"a": "{1,2,4}", "1": "{0}"})
    ok = h is not None and len(set(h)) == W.m and is_homomorphism(W, Z, h).ok
    images = {}
    if ok:
        P, rels = cayley_representation(7)
        ok = verify_representation(W, P, [rels[j] for j in h]).ok
        images = {W.names[i]: Z.names[j] for i, j in enumerate(h)}
    ok = record(6, ok, f"images {images}")
    assert ok


# ------------------------------------------------------------------ 7


def test_criterion_07_discriminator(cat):
    def failures(A):
        return sum(eval_discriminator_term(A, a, b, c) != (c if a == b else a)
                   for a, b, c in itertools.product(range(A.m), repeat=3))

    subjects = {"wk(2)": build_wk(Poset.chain(2), name="wk(2)")}
    for name, A in cat.items():
        if check_diagonal(A) and check_top_simple(A):
            found = finite_representation(A)
            if found is not None and verify_representation(A, *found).ok:
                subjects[name] = A
    bad = {name: failures(A) for name, A in subjects.items()}
    lemma = sum(len(discriminator_lemma_failures(P)) for n in range(5) for P in all_posets(n))
    ok = all(v == 0 for v in bad.values()) and lemma == 0
    W = subjects["wk(2)"]
    detail = (f"failing triples per algebra {bad}; lemma failures over posets with at most "
              f"4 points: {lemma}; wk(2) diagonal: {check_diagonal(W)}")
    ok = record(7, ok, detail)
    assert ok


# ------------------------------------------------------------------ 8


def test_criterion_08_sugihara(cat):
    S2, S3, S4 = sugihara(2), sugihara(3), sugihara(4)
    S4p, _ = point_subalgebras()
    rep = check_phi2(S3)
    w = rep.first_failure
    witness = f"{w.label} {rep.named_witness(w)}" if w else "none"
    src, dst, h = hom_even_to_odd(4)
    checks = {
        "S2 = 2": algebras_isomorphic(S2, cat["2"]),
        "S4 = point subalgebra": bool((S4p.comp == S4.comp).all() and (S4p.neg == S4.neg).all()
                                      and (S4p.leq == S4.leq).all() and S4p.one == S4.one),
        "S3 fails wkRA2": not rep.ok,
        "S4 -> S3 homomorphism": is_homomorphism(src, dst, h).ok and len(set(h)) == dst.m,
    }
    ok = record(8, all(checks.values()),
                ", ".join(f"{k}: {v}" for k, v in checks.items()) + f"; S3 witness {witness}")
    assert ok


# ------------------------------------------------------------------ 9


def test_criterion_09_w63_in_s4_squared(cat):
    S4 = sugihara(4)
    P = direct_product(S4, S4)
    W = cat["W6,3"]
    h = find_embedding(W, P)
    ok = h is not None and is_homomorphism(W, P, h).ok and len(set(h)) == W.m
    ok = record(9, ok, "embedding " + (str({W.names[i]: P.names[j] for i, j in enumerate(h)})
                                       if h else "not found"))
    assert ok


# ------------------------------------------------------------------ 10


def test_criterion_10_desk_scale_replacements(cat):
    t0 = time.time()
    S4p, W61p = point_subalgebras()
    oracle = algebras_isomorphic(S4p, cat["S4"]) and algebras_isomorphic(W61p, cat["W6,1"])
    phi3 = all(check_phi3(cat[n]).ok for n in ("W6,4", "W6,5", "W6,6"))
    games = {}
    for name, A in cat.items():
        games[name] = [decide_gamma(A, r).winner for r in range(5)]
    survive = all(w == EXISTS for ws in games.values() for w in ws)
    losers = [n for n, ws in games.items() if any(w != EXISTS for w in ws)]
    ok = record(10, oracle and phi3 and survive,
                f"point-algebra oracle: {oracle}, W6,4-W6,6 wkRA3: {phi3}, "
                f"algebra game rounds 0-4 won by the responder on all 14: {survive} "
                f"{losers or ''}({time.time() - t0:.0f} s)")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
