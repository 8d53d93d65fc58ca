"""Finite bounded cyclic involutive unital dl-magmas given by operation tables.

Elements are the integers ``0..m-1``.  The order table ``leq`` is the source
of truth for the lattice; join and meet tables are derived from it on first
use and cached.
"""

from __future__ import annotations

from functools import cached_property, reduce

import numpy as np

from .report import AxiomReport

ALGEBRA_AXIOMS = (
    "poset",
    "bounds",
    "lattice",
    "distributivity",
    "additivity",
    "bot-annihilation",
    "unit",
    "involution",
    "de-morgan",
)


class MalformedInput(ValueError):
    """Raised for ragged tables or out-of-range indices (not an axiom failure)."""


class NonIrreducibleResult(ValueError):
    """hat produced an element that is not join-irreducible."""


def _first(mask):
    """Lexicographically least index tuple where ``mask`` holds, or None."""
    idx = np.argwhere(mask)
    if len(idx) == 0:
        return None
    return tuple(int(v) for v in idx[0])


def _bound_table(leq):
    # score[s,t,u] counts upper bounds v of {s,t} with u <= v; u is the join
    # iff it is itself an upper bound and scores all of them.
    m = len(leq)
    ub = leq[:, None, :] & leq[None, :, :]
    count = ub.sum(axis=2)
    score = ub.reshape(m * m, m).astype(np.float32) @ leq.T.astype(np.float32)
    least = ub & (score.reshape(m, m, m) == count[:, :, None])
    return np.where(least.any(axis=2), least.argmax(axis=2), -1)


class FiniteAlgebra:
    """Operation tables of a finite bounded cyclic involutive unital dl-magma.

    Parameters
    ----------
    leq : (m, m) bool array, ``leq[s, t]`` iff s <= t.
    comp : (m, m) int array, ``comp[s, t] = s;t``.
    neg : (m,) int array, ``neg[s] = ~s``.
    bot, top, one : element indices.

    ``zero`` is always ``neg[one]``.  Shape problems raise :class:`MalformedInput`;
    axiom failures are reported by :func:`validate_algebra`.
    """

    def __init__(self, leq, comp, neg, bot, top, one, names=None, name=""):
        try:
            leq = np.array(leq, dtype=bool)
            comp = np.array(comp, dtype=np.int64)
            neg = np.array(neg, dtype=np.int64)
        except (ValueError, TypeError) as exc:
            raise MalformedInput(f"ragged or non-numeric table: {exc}") from exc
        m = len(neg)
        if neg.ndim != 1 or m == 0:
            raise MalformedInput("neg must be a non-empty vector")
        if leq.shape != (m, m):
            raise MalformedInput(f"leq has shape {leq.shape}, expected {(m, m)}")
        if comp.shape != (m, m):
            raise MalformedInput(f"comp has shape {comp.shape}, expected {(m, m)}")
        for label, tab in (("comp", comp), ("neg", neg)):
            if tab.size and (tab.min() < 0 or tab.max() >= m):
                raise MalformedInput(f"{label} has an index outside 0..{m - 1}")
        for label, v in (("bot", bot), ("top", top), ("one", one)):
            if not (isinstance(v, (int, np.integer)) and 0 <= v < m):
                raise MalformedInput(f"{label}={v!r} is not an element index")
        if names is None:
            names = [str(i) for i in range(m)]
        names = [str(x) for x in names]
        if len(names) != m:
            raise MalformedInput("names and tables disagree on the element count")
        for tab in (leq, comp, neg):
            tab.setflags(write=False)
        self.leq, self.comp, self.neg = leq, comp, neg
        self.bot, self.top, self.one = int(bot), int(top), int(one)
        self.names = names
        self.name = name

    @property
    def m(self) -> int:
        return len(self.neg)

    def __len__(self):
        return self.m

    @property
    def zero(self) -> int:
        return int(self.neg[self.one])

    def __repr__(self):
        return f"FiniteAlgebra({self.name!r}, m={self.m})"

    def index(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        return self.names.index(name)

    def le(self, s, t) -> bool:
        return bool(self.leq[s, t])

    @cached_property
    def join_table(self):
        t = _bound_table(self.leq)
        t.setflags(write=False)
        return t

    @cached_property
    def meet_table(self):
        t = _bound_table(self.leq.T)
        t.setflags(write=False)
        return t

    def join(self, s, t) -> int:
        return int(self.join_table[s, t])

    def meet(self, s, t) -> int:
        return int(self.meet_table[s, t])

    def join_all(self, elements) -> int:
        return reduce(self.join, elements, self.bot)

    def meet_all(self, elements) -> int:
        return reduce(self.meet, elements, self.top)

    def tables_key(self):
        """Hashable bundle of all tables (labelled equality, not isomorphism)."""
        return (
            self.leq.tobytes(),
            self.comp.tobytes(),
            self.neg.tobytes(),
            self.bot,
            self.top,
            self.one,
        )

    def same_tables(self, other) -> bool:
        return self.m == other.m and self.tables_key() == other.tables_key()

    @cached_property
    def irreducibles(self) -> tuple[int, ...]:
        """Join-irreducible elements, ascending.  Certified once per algebra."""
        out = []
        for a in range(self.m):
            if a == self.bot:
                continue
            hits = self.join_table == a
            hits[a, :] = False
            hits[:, a] = False
            if not hits.any():
                out.append(a)
        return tuple(out)

    def kappa(self, a) -> int:
        """Largest element not above the join-irreducible ``a``."""
        return self.join_all(np.flatnonzero(~self.leq[a]))

    @cached_property
    def hat_map(self) -> dict[int, int]:
        irr = set(self.irreducibles)
        out = {}
        for a in self.irreducibles:
            h = int(self.neg[self.kappa(a)])
            if h not in irr:
                raise NonIrreducibleResult(
                    f"hat({self.names[a]}) = {self.names[h]} is not join-irreducible"
                )
            out[a] = h
        return out

    def hat(self, a) -> int:
        if a not in self.hat_map:
            raise ValueError(f"{self.names[a]} is not join-irreducible")
        return self.hat_map[a]


def validate_algebra(A: FiniteAlgebra) -> AxiomReport:
    """Check the dl-magma axioms in a fixed order, stopping at the first failure.

    Witnesses are lexicographically least violating assignments.
    """
    rep = AxiomReport(subject=f"algebra {A.name}".strip(), names=A.names)
    m, leq, comp, neg = A.m, A.leq, A.comp, A.neg
    ar = np.arange(m)

    w = _first(~leq[ar, ar])
    if w is not None:
        rep.add("poset", False, {"s": w[0]}, "reflexivity")
        return rep
    w = _first(leq & leq.T & (ar[:, None] != ar[None, :]))
    if w is not None:
        rep.add("poset", False, dict(zip("st", w)), "antisymmetry")
        return rep
    w = _first(leq[:, :, None] & leq[None, :, :] & ~leq[:, None, :])
    if not rep.add("poset", w is None, w and dict(zip("stu", w))):
        return rep

    for which, mask in (("bot", ~leq[A.bot, :]), ("top", ~leq[:, A.top])):
        w = _first(mask)
        if w is not None:
            rep.add("bounds", False, {"s": w[0]}, which)
            return rep
    rep.add("bounds", True)

    J, M = A.join_table, A.meet_table
    w = _first((J < 0) | (M < 0))
    if not rep.add("lattice", w is None, w and dict(zip("st", w))):
        return rep

    s, t, u = np.ix_(ar, ar, ar)
    lhs = M[s, J[t, u]]
    rhs = J[M[s, t], M[s, u]]
    w = _first(lhs != rhs)
    if not rep.add("distributivity", w is None, w and dict(zip("stu", w))):
        return rep

    # Additivity (s+t);(u+v) = s;u+s;v+t;u+t;v, checked with v=u and then s=t; the
    # two specialisations are together equivalent to the four-variable law.
    left = comp[J[s, t], u] != J[comp[s, u], comp[t, u]]
    w = _first(left)
    if w is not None:
        rep.add("additivity", False, {"s": w[0], "t": w[1], "u": w[2], "v": w[2]})
        return rep
    right = comp[s, J[t, u]] != J[comp[s, t], comp[s, u]]
    w = _first(right)
    if not rep.add("additivity", w is None, w and {"s": w[0], "t": w[0], "u": w[1], "v": w[2]}):
        return rep

    w = _first((comp[:, A.bot] != A.bot) | (comp[A.bot, :] != A.bot))
    if not rep.add("bot-annihilation", w is None, w and {"s": w[0]}):
        return rep

    w = _first((comp[:, A.one] != ar) | (comp[A.one, :] != ar))
    if not rep.add("unit", w is None, w and {"s": w[0]}):
        return rep

    w = _first(neg[neg] != ar)
    if not rep.add("involution", w is None, w and {"s": w[0]}):
        return rep

    s2, t2 = np.ix_(ar, ar)
    w = _first(neg[M[s2, t2]] != J[neg[s2], neg[t2]])
    rep.add("de-morgan", w is None, w and dict(zip("st", w)))
    return rep


def join_irreducibles(A: FiniteAlgebra) -> list[int]:
    return list(A.irreducibles)


def kappa(A: FiniteAlgebra, a: int) -> int:
    return A.kappa(a)


def hat(A: FiniteAlgebra, a: int) -> int:
    return A.hat(a)


def eval_discriminator_term(A: FiniteAlgebra, a: int, b: int, c: int) -> int:
    """Evaluate the discriminator term d(a, b, c) by table lookups.

    d1(x,y) = 1.(x;(y.~y)), d2(x,y) = 1.(~y;(x.~y)), D = d1(a,b)+d1(b,a)+d2(a,b)+d2(b,a),
    d = (T;D;T).a + ~(T;D;T).c with T the top element.
    """
    J, M, C, N = A.join_table, A.meet_table, A.comp, A.neg
    one, top = A.one, A.top

    def d1(x, y):
        return M[one, C[x, M[y, N[y]]]]

    def d2(x, y):
        return M[one, C[N[y], M[x, N[y]]]]

    D = J[J[d1(a, b), d1(b, a)], J[d2(a, b), d2(b, a)]]
    T = C[C[top, D], top]
    return int(J[M[T, a], M[N[T], c]])
