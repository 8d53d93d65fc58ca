"""Relevance frames and the two conversion maps to and from finite algebras."""

from __future__ import annotations

from functools import cached_property
from itertools import product

import numpy as np

from .algebra import FiniteAlgebra, MalformedInput
from .report import AxiomReport

FRAME_CONDITIONS = (
    "order",
    "hat-involution",
    "hat-order-reversing",
    "unit-left",
    "unit-right",
    "down-closed-1",
    "up-closed-2",
    "up-closed-3",
)


class NotADownset(RuntimeError):
    """A frame operation produced a set that is not a downset."""


def _first(mask):
    idx = np.argwhere(mask)
    if len(idx) == 0:
        return None
    return tuple(int(v) for v in idx[0])


class RelevanceFrame:
    """Points with an order, an involution ``hat``, a unary predicate ``I``
    and a ternary relation ``R`` (stored in full as a k*k*k bool array)."""

    def __init__(self, leq, hat, I, R, names=None, name=""):
        try:
            leq = np.array(leq, dtype=bool)
            hat = np.array(hat, dtype=np.int64).reshape(-1)
            I = np.array(I, dtype=bool).reshape(-1)
            R = np.array(R, dtype=bool)
        except (ValueError, TypeError) as exc:
            raise MalformedInput(f"ragged frame table: {exc}") from exc
        k = len(hat)
        if leq.shape != (k, k) or I.shape != (k,) or R.shape != (k, k, k):
            raise MalformedInput(
                f"frame tables disagree on the point count {k}: "
                f"leq {leq.shape}, I {I.shape}, R {R.shape}"
            )
        if k and (hat.min() < 0 or hat.max() >= k):
            raise MalformedInput("hat has an index outside the point range")
        names = [str(i) for i in range(k)] if names is None else [str(x) for x in names]
        if len(names) != k:
            raise MalformedInput("names and tables disagree on the point count")
        for tab in (leq, hat, I, R):
            tab.setflags(write=False)
        self.leq, self.hat, self.I, self.R = leq, hat, I, R
        self.names = names
        self.name = name

    @classmethod
    def from_triples(cls, leq, hat, I, triples, names=None, name="", close=False):
        """Build from a list of R triples; ``close`` saturates them under the
        closure conditions (down in the first argument, up in the others)."""
        k = len(hat)
        R = np.zeros((k, k, k), dtype=bool)
        for a, b, c in triples:
            if not all(0 <= v < k for v in (a, b, c)):
                raise MalformedInput(f"R triple {(a, b, c)} out of range")
            R[a, b, c] = True
        if close:
            R = close_relation(np.array(leq, dtype=bool), R)
        Iv = np.zeros(k, dtype=bool)
        Iv[list(I)] = True
        return cls(leq, hat, Iv, R, names=names, name=name)

    @property
    def k(self) -> int:
        return len(self.hat)

    def __len__(self):
        return self.k

    def __repr__(self):
        return f"RelevanceFrame({self.name!r}, k={self.k})"

    def triples(self):
        return [tuple(int(v) for v in t) for t in np.argwhere(self.R)]

    @cached_property
    def downsets(self) -> list[int]:
        """Downsets of the point order as bitmasks, sorted by (size, mask)."""
        k = self.k
        below = [sum(1 << q for q in range(k) if self.leq[q, p]) for p in range(k)]
        out = [
            mask
            for mask in range(1 << k)
            if all(below[p] & ~mask == 0 for p in range(k) if mask >> p & 1)
        ]
        return sorted(out, key=lambda x: (bin(x).count("1"), x))


def close_relation(leq, R):
    """Least relation containing R that is down-closed in the first argument
    and up-closed in the second and third."""
    R = R.copy()
    L = leq.astype(np.int64)
    while True:
        # R[a,b,c] <- exists a' >= a, b' <= b, c' <= c with R[a',b',c']
        nxt = np.einsum("ax,xyz->ayz", L, R.astype(np.int64)) > 0
        nxt = np.einsum("yb,ayz->abz", L, nxt.astype(np.int64)) > 0
        nxt = np.einsum("zc,abz->abc", L, nxt.astype(np.int64)) > 0
        if (nxt == R).all():
            return R
        R = nxt


def validate_frame(F: RelevanceFrame) -> AxiomReport:
    """Check the relevance-frame conditions in order, stopping at the first failure."""
    rep = AxiomReport(subject=f"frame {F.name}".strip(), names=F.names)
    k, leq, hat, I, R = F.k, F.leq, F.hat, F.I, F.R
    ar = np.arange(k)

    w = (
        _first(~leq[ar, ar])
        or _first(leq & leq.T & (ar[:, None] != ar[None, :]))
        or _first(leq[:, :, None] & leq[None, :, :] & ~leq[:, None, :])
    )
    if not rep.add("order", w is None, w and dict(zip("abc", w))):
        return rep

    w = _first(hat[hat] != ar)
    if not rep.add("hat-involution", w is None, w and {"a": w[0]}):
        return rep

    w = _first(leq & ~leq[hat[None, :], hat[:, None]])
    if not rep.add("hat-order-reversing", w is None, w and dict(zip("ab", w))):
        return rep

    # unit-left: a <= b iff some e in I has R(a,e,b); unit-right: R(a,b,e)
    left = (R & I[None, :, None]).any(axis=1)
    w = _first(left != leq)
    if not rep.add("unit-left", w is None, w and dict(zip("ab", w))):
        return rep
    right = (R & I[None, None, :]).any(axis=2)
    w = _first(right != leq)
    if not rep.add("unit-right", w is None, w and dict(zip("ab", w))):
        return rep

    # a <= b and R(b,c,d) => R(a,c,d)
    w = _first(leq[:, :, None, None] & R[None, :, :, :] & ~R[:, None, :, :])
    if not rep.add("down-closed-1", w is None, w and dict(zip("abcd", w))):
        return rep
    # b <= c and R(a,b,d) => R(a,c,d)   (indices ordered a,b,c,d)
    w = _first(leq[None, :, :, None] & R[:, :, None, :] & ~R[:, None, :, :])
    if not rep.add("up-closed-2", w is None, w and dict(zip("abcd", w))):
        return rep
    # c <= d and R(a,b,c) => R(a,b,d)
    w = _first(leq[None, None, :, :] & R[:, :, :, None] & ~R[:, :, None, :])
    rep.add("up-closed-3", w is None, w and dict(zip("abcd", w)))
    return rep


def algebra_to_frame(A: FiniteAlgebra) -> RelevanceFrame:
    """Join-irreducible frame: I(a) iff a <= 1, R(a,b,c) iff a <= b;c."""
    pts = np.array(A.irreducibles, dtype=np.int64)
    pos = {int(p): i for i, p in enumerate(pts)}
    hat = [pos[A.hat(int(p))] for p in pts]
    leq = A.leq[np.ix_(pts, pts)]
    I = A.leq[pts, A.one]
    bc = A.comp[np.ix_(pts, pts)]
    R = A.leq[pts[:, None, None], bc[None, :, :]]
    return RelevanceFrame(leq, hat, I, R, names=[A.names[p] for p in pts], name=A.name)


def _downset_name(F, mask):
    if mask == 0:
        return "⊥"
    pts = [p for p in range(F.k) if mask >> p & 1]
    tops = [p for p in pts if not any(q != p and F.leq[p, q] for q in pts)]
    return "+".join(F.names[p] for p in tops)


def frame_to_algebra(F: RelevanceFrame, name=None) -> FiniteAlgebra:
    """Algebra of downsets: 1 = downset of I, ~s = {a : hat(a) not in s},
    s;t = {a : R(a,b,c) for some b in s, c in t}."""
    k = F.k
    if k == 0:
        return FiniteAlgebra([[True]], [[0]], [0], 0, 0, 0, names=["⊥"],
                             name=F.name if name is None else name)
    masks = F.downsets
    n = len(masks)
    index = {mask: i for i, mask in enumerate(masks)}
    D = np.array([[mask >> p & 1 for p in range(k)] for mask in masks], dtype=bool).reshape(n, k)

    def lookup(rows):
        out = []
        for row in rows.reshape(-1, k):
            mask = int(sum(1 << p for p in range(k) if row[p]))
            if mask not in index:
                raise NotADownset(f"{sorted(np.flatnonzero(row))} is not a downset")
            out.append(index[mask])
        return np.array(out, dtype=np.int64)

    leq = ~(D[:, None, :] & ~D[None, :, :]).any(axis=2)
    one_row = (F.leq & F.I[None, :]).any(axis=1)
    one = int(lookup(one_row[None, :])[0])
    neg = lookup(~D[:, F.hat])
    Ri = F.R.astype(np.int64)
    Di = D.astype(np.int64)
    # X[s,a,c] = exists b in s with R(a,b,c); comp[s,t,a] = exists c in t with X[s,a,c]
    X = np.einsum("sb,abc->sac", Di, Ri) > 0
    C = np.einsum("sac,tc->sta", X.astype(np.int64), Di) > 0
    comp = lookup(C).reshape(n, n)
    names = [_downset_name(F, mask) for mask in masks]
    return FiniteAlgebra(
        leq, comp, neg, bot=0, top=n - 1, one=one, names=names,
        name=F.name if name is None else name,
    )


def r_min_all(F: RelevanceFrame) -> np.ndarray:
    """Bool array ``M[a,b,c]``: R(a,b,c) with (b,c) componentwise minimal."""
    R = np.asarray(F.R, dtype=bool)
    le = np.asarray(F.leq, dtype=np.int64)
    # number of pairs (b',c') <= (b,c) with R(a,b',c'), the pair itself included
    below = np.einsum("xyz,yb,zc->xbc", R.astype(np.int64), le, le, optimize=True)
    return R & (below == 1)


def r_min(F: RelevanceFrame, a: int) -> list[tuple[int, int, int]]:
    """Triples (a,b,c) in R whose (b,c) is componentwise minimal."""
    return [(a, int(b), int(c)) for b, c in np.argwhere(r_min_all(F)[a])]


def _point_invariant(F, p):
    return (
        int(F.leq[:, p].sum()),
        int(F.leq[p, :].sum()),
        bool(F.I[p]),
        bool(F.hat[p] == p),
        int(F.R[p].sum()),
        int(F.R[:, p].sum()),
        int(F.R[:, :, p].sum()),
    )


def frame_isomorphism(F: RelevanceFrame, G: RelevanceFrame) -> dict[int, int] | None:
    """Point bijection preserving order, hat, I and R, or None.

    Backtracking over points with a per-point invariant prefilter.
    """
    if F.k != G.k or int(F.R.sum()) != int(G.R.sum()) or int(F.I.sum()) != int(G.I.sum()):
        return None
    k = F.k
    invF = [_point_invariant(F, p) for p in range(k)]
    invG = [_point_invariant(G, q) for q in range(k)]
    if sorted(invF) != sorted(invG):
        return None
    cands = [[q for q in range(k) if invG[q] == invF[p]] for p in range(k)]
    order = sorted(range(k), key=lambda p: len(cands[p]))
    f: dict[int, int] = {}
    used: set[int] = set()

    def ok(p, q):
        for p2, q2 in f.items():
            if F.leq[p, p2] != G.leq[q, q2] or F.leq[p2, p] != G.leq[q2, q]:
                return False
        hp = int(F.hat[p])
        if hp == p:
            if G.hat[q] != q:
                return False
        elif hp in f and f[hp] != G.hat[q]:
            return False
        f[p] = q
        dom = list(f)
        try:
            for x, y in product(dom, repeat=2):
                if F.R[p, x, y] != G.R[q, f[x], f[y]]:
                    return False
                if F.R[x, p, y] != G.R[f[x], q, f[y]]:
                    return False
                if F.R[x, y, p] != G.R[f[x], f[y], q]:
                    return False
            return True
        finally:
            del f[p]

    def search(i):
        if i == k:
            return True
        p = order[i]
        for q in cands[p]:
            if q in used or not ok(p, q):
                continue
            f[p] = q
            used.add(q)
            if search(i + 1):
                return True
            del f[p]
            used.discard(q)
        return False

    return dict(f) if search(0) else None


def frames_isomorphic(F, G) -> bool:
    return frame_isomorphism(F, G) is not None


def prime_filter_frame(A: FiniteAlgebra) -> RelevanceFrame:
    """Frame of prime filters of a finite algebra.

    U <= V iff V is a subset of U; hat(U) = {~s : s not in U}; I(U) iff 1 in U;
    R(U,V,W) iff v;w in U for all v in V, w in W.  In the finite case every
    prime filter is principal, generated by a join-irreducible, so the result
    is checked against :func:`algebra_to_frame`.
    """
    m = A.m
    J, M = A.join_table, A.meet_table
    filters = []
    for s in range(m):
        U = frozenset(int(t) for t in np.flatnonzero(A.leq[s]))
        if len(U) == m:
            continue
        prime = all(
            (x in U or y in U) for x in range(m) for y in range(m) if int(J[x, y]) in U
        )
        closed = all(int(M[x, y]) in U for x in U for y in U)
        if prime and closed:
            filters.append(U)
    filters.sort(key=lambda U: (-len(U), sorted(U)))
    pos = {U: i for i, U in enumerate(filters)}
    k = len(filters)
    leq = np.array([[V <= U for V in filters] for U in filters], dtype=bool)
    hat = []
    for U in filters:
        H = frozenset(int(A.neg[s]) for s in range(m) if s not in U)
        if H not in pos:
            raise NonPrimeFilter(f"hat of a prime filter is not a prime filter: {sorted(H)}")
        hat.append(pos[H])
    I = np.array([A.one in U for U in filters], dtype=bool)
    R = np.zeros((k, k, k), dtype=bool)
    for (i, U), (j, V), (l, W) in product(enumerate(filters), repeat=3):
        R[i, j, l] = all(int(A.comp[v, w]) in U for v in V for w in W)

    def gen_name(U):
        least = [s for s in U if all(A.leq[s, t] for t in U)]
        return "↑" + A.names[least[0]] if least else "?"

    F = RelevanceFrame(leq, hat, I, R, names=[gen_name(U) for U in filters], name=A.name)
    if frame_isomorphism(F, algebra_to_frame(A)) is None:
        raise AssertionError("prime-filter frame differs from the join-irreducible frame")
    return F


class NonPrimeFilter(RuntimeError):
    pass
