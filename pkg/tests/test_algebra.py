import itertools

import numpy as np
import pytest

from wkra.algebra import (FiniteAlgebra, MalformedInput, eval_discriminator_term, hat,
                          join_irreducibles, kappa, validate_algebra)
from helpers import named


def test_wk2_validates(wk2):
    assert wk2.m == 6
    assert validate_algebra(wk2).ok


def test_trivial_algebra_validates(cat):
    one = cat["1"]
    assert one.m == 1
    assert validate_algebra(one).ok


def test_boolean_square_with_identity_negation_fails(cat):
    B = cat["2^2"]
    bad = FiniteAlgebra(B.leq, B.comp, list(range(B.m)), B.bot, B.top, B.one, names=B.names)
    rep = validate_algebra(bad)
    assert not rep.ok
    first = rep.first_failure
    assert first.label in ("involution", "de-morgan")
    # the witness really violates De Morgan
    s, t = first.witness["s"], first.witness["t"]
    assert bad.neg[bad.meet(s, t)] != bad.join(bad.neg[s], bad.neg[t])


def test_ragged_tables_are_malformed():
    with pytest.raises(MalformedInput):
        FiniteAlgebra([[1, 0], [1]], [[0, 0], [0, 1]], [1, 0], 0, 1, 1)
    with pytest.raises(MalformedInput):
        FiniteAlgebra([[1, 1], [0, 1]], [[0, 0], [0, 5]], [1, 0], 0, 1, 1)


def test_bound_laws(cat):
    for A in cat.values():
        for s in range(A.m):
            assert A.join(A.bot, s) == s
            assert A.meet(A.top, s) == s


def test_join_irreducibles_examples(cat, s4):
    two = cat["2"]
    assert join_irreducibles(two) == [two.top]
    B = cat["2^2"]
    assert set(join_irreducibles(B)) == set(named(B, "a", "~a"))
    # S4 is the chain a-2 < a-1 < a1 < a2, i.e. empty < '<' < '<=' < top
    assert join_irreducibles(s4) == [1, 2, 3]


def test_every_element_is_join_of_irreducibles_below(cat):
    for A in cat.values():
        irr = join_irreducibles(A)
        for s in range(A.m):
            assert A.join_all([a for a in irr if A.le(a, s)]) == s


def test_kappa_examples(cat, s4):
    assert kappa(s4, 1) == 0
    assert kappa(s4, 3) == 2
    B = cat["2^2"]
    a, na = named(B, "a", "~a")
    assert kappa(B, a) == na
    assert kappa(B, na) == a


def test_hat_examples(cat, s4):
    # empty=0, '<'=1, '<='=2, top=3
    assert [hat(s4, a) for a in (1, 2, 3)] == [3, 2, 1]
    B = cat["2^2"]
    a = B.index("a")
    assert hat(B, a) == a


def test_hat_is_order_reversing_involution(cat):
    for A in cat.values():
        irr = join_irreducibles(A)
        for a in irr:
            assert hat(A, hat(A, a)) == a
            for b in irr:
                if A.le(a, b):
                    assert A.le(hat(A, b), hat(A, a))


def test_order_and_negation(cat):
    for A in cat.values():
        for s, t in itertools.product(range(A.m), repeat=2):
            le = A.le(s, t)
            assert le == (A.join(s, t) == t)
            assert le == A.le(A.neg[t], A.neg[s])


def test_full_additivity(cat):
    for A in cat.values():
        J, C = A.join_table, A.comp
        r = np.arange(A.m)
        s, t, u, v = np.ix_(r, r, r, r)
        lhs = C[J[s, t], J[u, v]]
        rhs = J[J[C[s, u], C[s, v]], J[C[t, u], C[t, v]]]
        assert (lhs == rhs).all()


def test_discriminator_off_diagonal_on_wk2(wk2):
    for a, b, c in itertools.product(range(wk2.m), repeat=3):
        if a != b:
            assert eval_discriminator_term(wk2, a, b, c) == a


def test_discriminator_on_diagonal_top_simple_entries(cat):
    for name in ("1", "2", "A2", "A3", "W6,2"):
        A = cat[name]
        for a, b, c in itertools.product(range(A.m), repeat=3):
            assert eval_discriminator_term(A, a, b, c) == (c if a == b else a)


def test_discriminator_idempotent(cat):
    for A in cat.values():
        for a in range(A.m):
            assert eval_discriminator_term(A, a, a, a) == a


def test_wk2_equal_arguments_keep_first_argument(wk2):
    # wk(2) is not diagonal (1.0 is the order itself), and d(R,R,S) is R for
    # every R strictly between bottom and top; see the decisions ledger.
    mid = [s for s in range(wk2.m) if s not in (wk2.bot, wk2.top)]
    for r in mid:
        for s in range(wk2.m):
            assert eval_discriminator_term(wk2, r, r, s) == r
