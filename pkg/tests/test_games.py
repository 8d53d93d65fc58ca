import itertools

import numpy as np
import pytest

from wkra.axioms import AxiomProfile, check_phi2, check_phi3
from wkra.finder import EnumerationTask, enumerate_algebras
from wkra.frame import RelevanceFrame, algebra_to_frame
from wkra.games import (EXISTS, FORALL, INCONCLUSIVE, FrameNetwork, SigmaTooLarge, TermNetwork,
                        decide_gamma, emit_sigma, frame_consistent, initial_networks,
                        literal_frame_game, replay_certificate, replay_gamma_transcript, sigma,
                        solve_pebble_game, term_consistent)
from wkra.models import sugihara
from wkra.terms import Conn, canonical, holds, parse_formula, show


@pytest.fixture(scope="module")
def small_algebras():
    return [A for _, A in enumerate_algebras(EnumerationTask(5), threads=1)]


# ------------------------------------------------------------ networks


def test_term_consistency(wk2):
    a, b = wk2.index("{(0,0),(0,1)}"), wk2.index("{(0,1),(1,1)}")
    assert not wk2.le(a, b)
    n1, n2 = initial_networks(wk2, a, b)
    assert n2.well_formed(wk2) and term_consistent(n2, wk2)
    clash = TermNetwork.of([[{wk2.top, wk2.one}, {wk2.top, a}],
                            [{wk2.top, int(wk2.neg[a])}, {wk2.top, wk2.one}]])
    assert not term_consistent(clash, wk2)
    # with a = b the one-node network holds both a and ~a on the diagonal
    n1, _ = initial_networks(wk2, a, a)
    assert not term_consistent(n1, wk2)


def test_frame_consistency(s4):
    F = algebra_to_frame(s4)
    lt, le, top = 0, 1, 2  # points '<', '<=', top
    # two nodes joined by a point and its hat, diagonals '<='
    for p in range(F.k):
        N = FrameNetwork.of([[le, p], [F.hat[p], le]])
        assert frame_consistent(N, F)
    assert not frame_consistent(FrameNetwork.of([[le, lt], [lt, le]]), F)
    # x=0, y=1, z=2 with (x,y) = top, (x,z) = '<', (z,y) = '<'
    h = F.hat
    tri = [[le, top, lt], [h[top], le, h[lt]], [h[lt], lt, le]]
    assert not F.R[top, lt, lt]
    assert not frame_consistent(FrameNetwork.of(tri), F)


def test_canonical_network_is_permutation_invariant(s4):
    F = algebra_to_frame(s4)
    N = FrameNetwork.of([[1, 2, 2], [0, 1, 1], [0, 1, 1]])
    M = N.restrict([2, 0, 1])
    assert N.canonical() == M.canonical()


# --------------------------------------------------------- pebble games


def test_pebble_examples(cat, s3, s4):
    assert solve_pebble_game(algebra_to_frame(s4), 3).exists_wins
    assert solve_pebble_game(algebra_to_frame(s3), 2).winner == FORALL
    assert solve_pebble_game(algebra_to_frame(cat["2^2"]), 3).exists_wins


def test_pebble_games_on_catalog(cat):
    for A in cat.values():
        F = algebra_to_frame(A)
        for n in (2, 3, 4):
            v = solve_pebble_game(F, n)
            assert v.exists_wins, (A.name, n)
            assert replay_certificate(F, v, n)


def test_pebble_games_agree_with_axioms_small(small_algebras):
    for A in small_algebras:
        F = algebra_to_frame(A)
        assert solve_pebble_game(F, 2).exists_wins == check_phi2(A).ok


def test_pebble_monotone_and_replay(small_algebras):
    for A in small_algebras[::7]:
        F = algebra_to_frame(A)
        wins = []
        for n in (2, 3, 4):
            v = solve_pebble_game(F, n)
            assert replay_certificate(F, v, n)
            wins.append(v.exists_wins)
        assert wins == sorted(wins, reverse=True)


def test_chain_frame_passes_phi3_but_loses_three_pebbles():
    # points 0 < 1 < 2, hat reverses, I = {0, 1}; the algebra of downsets
    # satisfies the wkRA3 quasiequations, yet the three-pebble game and the
    # bounded literal game are won by the challenger
    from wkra.frame import frame_to_algebra

    F = None
    for _, A in enumerate_algebras(EnumerationTask(4, AxiomProfile(phi3=True)), threads=1):
        G = algebra_to_frame(A)
        if G.k == 3 and G.I.tolist() == [True, True, False] and not solve_pebble_game(G, 3).exists_wins:
            F = G
    assert F is not None
    A = frame_to_algebra(F)
    assert check_phi3(A).ok
    assert literal_frame_game(F, 2).winner == FORALL
    v = decide_gamma(A, 2)
    assert v.winner == FORALL
    assert replay_gamma_transcript(A, v.certificate)


# --------------------------------------------------------- algebra game


def test_gamma_examples(cat, s3):
    for r in range(4):
        assert decide_gamma(cat["1"], r).exists_wins
    for r in (2, 3):
        v = decide_gamma(s3, r)
        assert v.winner == FORALL
        assert replay_gamma_transcript(s3, v.certificate)


def test_gamma_antitone(small_algebras):
    for A in small_algebras[::11]:
        seen_forall = False
        for r in range(4):
            v = decide_gamma(A, r)
            assert v.winner != INCONCLUSIVE
            if seen_forall:
                assert v.winner == FORALL
            seen_forall = v.winner == FORALL


def test_gamma_shortcut_agrees(cat):
    for name in ("2^2", "A2", "W6,1", "W6,3"):
        for r in range(3):
            assert decide_gamma(cat[name], r).winner == decide_gamma(cat[name], r, shortcut=False).winner


def test_gamma_budget_is_inconclusive(cat):
    v = decide_gamma(cat["S6"], 3, limit=10, shortcut=False)
    assert v.winner == INCONCLUSIVE
    assert "limit" in v.detail


def test_tampered_transcript_is_rejected(s3):
    v = decide_gamma(s3, 2)
    bad = [dict(m) for m in v.certificate]
    bad[-1] = {"move": "end", "consistent": True}
    assert replay_gamma_transcript(s3, bad[:-1] + [bad[-1]]) == replay_gamma_transcript(s3, v.certificate)
    bad[0]["b"] = bad[0]["a"]
    assert not replay_gamma_transcript(s3, bad)


# -------------------------------------------------------------- sentences


def test_sigma_zero_fragment():
    f = sigma(0)
    body = f.body.args[1]
    one_node = body.args[0]
    assert isinstance(one_node, Conn) and one_node.conn == "&"
    # four labels on one node: 16 disequalities t != ~u
    assert len(one_node.args) == 16
    assert all(c.rel == "!=" for c in one_node.args)


def test_sigma_round_trip():
    text = emit_sigma(1)
    f = parse_formula(text)
    assert canonical(f) == canonical(sigma(1))
    assert show(f) == text


def _bound_names(f, acc):
    from wkra.terms import Quant

    if isinstance(f, Quant):
        acc.extend(f.vars)
        _bound_names(f.body, acc)
    elif isinstance(f, Conn):
        for a in f.args:
            _bound_names(a, acc)
    return acc


def test_sigma_variables_are_fresh():
    names = _bound_names(sigma(1), [])
    assert len(names) == len(set(names))
    assert names[:2] == ["a", "b"]


def test_sigma_size_limit():
    with pytest.raises(SigmaTooLarge):
        sigma(2)


def test_sigma_agrees_with_gamma(wk2, small_algebras):
    s0, s1 = sigma(0), sigma(1)
    assert holds(wk2, s1) == decide_gamma(wk2, 1).exists_wins
    for A in small_algebras:
        assert holds(A, s0) == decide_gamma(A, 0).exists_wins
        assert holds(A, s1) == decide_gamma(A, 1).exists_wins
