"""Concrete algebras: weakening relations over finite posets and the small
algebras used to test representability (point algebra, Sugihara chains,
the complex algebra of Z7, products, embeddings)."""

from __future__ import annotations

import os
from itertools import combinations, permutations, product

import numpy as np

from .algebra import FiniteAlgebra, MalformedInput
from .report import AxiomReport

DEFAULT_MAX_POINTS = 4
DEFAULT_MAX_ELEMENTS = 256


class TooManyElements(ValueError):
    def __init__(self, count, bound):
        super().__init__(f"{count} elements exceeds the bound {bound}")
        self.count = count
        self.bound = bound


# ---------------------------------------------------------------- posets


class Poset:
    """Finite partial order; ``leq[i, j]`` iff point i <= point j."""

    def __init__(self, leq, points=None):
        leq = np.array(leq, dtype=bool)
        n = len(leq)
        if leq.shape != (n, n):
            raise MalformedInput("poset order must be square")
        ar = np.arange(n)
        if not leq[ar, ar].all():
            raise MalformedInput("poset order is not reflexive")
        if (leq & leq.T & (ar[:, None] != ar[None, :])).any():
            raise MalformedInput("poset order is not antisymmetric")
        if (leq[:, :, None] & leq[None, :, :] & ~leq[:, None, :]).any():
            raise MalformedInput("poset order is not transitive")
        leq.setflags(write=False)
        self.leq = leq
        self.points = [str(i) for i in range(n)] if points is None else [str(p) for p in points]

    @classmethod
    def from_pairs(cls, n, pairs, points=None):
        """Reflexive-transitive closure of the given (i, j) pairs."""
        leq = np.eye(n, dtype=bool)
        for i, j in pairs:
            leq[i, j] = True
        for k in range(n):
            leq |= leq[:, k:k + 1] & leq[k:k + 1, :]
        return cls(leq, points)

    @classmethod
    def chain(cls, n):
        return cls(np.triu(np.ones((n, n), dtype=bool)))

    @classmethod
    def antichain(cls, n):
        return cls(np.eye(n, dtype=bool))

    def __len__(self):
        return len(self.leq)

    def __repr__(self):
        return f"Poset({len(self)} points, {int(self.leq.sum()) - len(self)} strict pairs)"

    def downsets(self) -> list[int]:
        n = len(self)
        below = [sum(1 << q for q in range(n) if self.leq[q, p]) for p in range(n)]
        return [
            mask
            for mask in range(1 << n)
            if all(below[p] & ~mask == 0 for p in range(n) if mask >> p & 1)
        ]

    def canonical_key(self) -> bytes:
        n = len(self)
        sig = [(int(self.leq[:, p].sum()), int(self.leq[p].sum())) for p in range(n)]
        best = None
        groups = sorted(set(sig))
        blocks = [[p for p in range(n) if sig[p] == g] for g in groups]
        for choice in product(*(permutations(b) for b in blocks)):
            order = [p for block in choice for p in block]
            key = self.leq[np.ix_(order, order)].tobytes()
            if best is None or key < best:
                best = key
        return bytes([n]) + (best or b"")


def all_posets(n, max_downsets=None) -> list[Poset]:
    """All posets on n points up to isomorphism, optionally only those with at
    most ``max_downsets`` downsets (the count is monotone under adding points)."""
    found: dict[bytes, Poset] = {}

    def grow(leq):
        k = len(leq)
        P = Poset(leq)
        if max_downsets is not None and len(P.downsets()) > max_downsets:
            return
        if k == n:
            found.setdefault(P.canonical_key(), P)
            return
        for mask in P.downsets():
            new = np.zeros((k + 1, k + 1), dtype=bool)
            new[:k, :k] = leq
            new[k, k] = True
            for q in range(k):
                new[q, k] = bool(mask >> q & 1)
            grow(new)

    grow(np.zeros((0, 0), dtype=bool))
    return sorted(found.values(), key=lambda P: P.canonical_key())


# ------------------------------------------------------------- relations


def compose(R, S):
    return (R.astype(np.int64) @ S.astype(np.int64)) > 0


def converse(R):
    return R.T.copy()


def weakening_closure(P: Poset, R) -> np.ndarray:
    """Least weakening relation containing R, i.e. <= ; R ; <=."""
    return compose(compose(P.leq, np.asarray(R, dtype=bool)), P.leq)


def is_weakening(P: Poset, R) -> bool:
    R = np.asarray(R, dtype=bool)
    return bool((weakening_closure(P, R) == R).all())


def relation_pairs(R) -> set[tuple[int, int]]:
    return {(int(i), int(j)) for i, j in np.argwhere(R)}


def relation_from_pairs(n, pairs) -> np.ndarray:
    R = np.zeros((n, n), dtype=bool)
    for i, j in pairs:
        R[i, j] = True
    return R


def all_relations(n) -> np.ndarray:
    """Every binary relation on n points, shape (2**(n*n), n, n)."""
    codes = np.arange(1 << (n * n), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n * n)) & 1
    return bits.astype(bool).reshape(len(codes), n, n)


def weakening_relations(P: Poset, max_points=DEFAULT_MAX_POINTS) -> np.ndarray:
    n = len(P)
    if n > max_points:
        raise TooManyElements(1 << (n * n), 1 << (max_points * max_points))
    cands = all_relations(n)
    L = P.leq.astype(np.int64)
    closed = np.einsum("ij,cjk,kl->cil", L, cands.astype(np.int64), L) > 0
    keep = (closed == cands).all(axis=(1, 2))
    return cands[keep]


class ConcreteAlgebra(FiniteAlgebra):
    """A FiniteAlgebra whose elements are relations over a poset."""

    def __init__(self, *args, poset=None, relations=None, **kw):
        super().__init__(*args, **kw)
        self.poset = poset
        self.relations = relations


def _relation_name(P, R):
    pairs = sorted(relation_pairs(R))
    if not pairs:
        return "∅"
    return "{" + ",".join(f"({P.points[i]},{P.points[j]})" for i, j in pairs) + "}"


def _wk_max_elements(max_elements):
    if max_elements is not None:
        return max_elements
    env = os.environ.get("WKRA_MAX_ELEMENTS")
    return int(env) if env else DEFAULT_MAX_ELEMENTS


def build_wk(P: Poset, max_elements=None, max_points=DEFAULT_MAX_POINTS, name=None):
    """The algebra wk(P) of all weakening relations over P.

    1 is the order, ~R the complement of the converse.  ``max_elements``
    defaults to $WKRA_MAX_ELEMENTS or 256.
    """
    bound = _wk_max_elements(max_elements)
    rels = weakening_relations(P, max_points=max_points)
    m = len(rels)
    if m > bound:
        raise TooManyElements(m, bound)
    n = len(P)
    weights = 1 << np.arange(n * n, dtype=np.int64)
    codes = (rels.reshape(m, -1).astype(np.int64) * weights).sum(axis=1)
    order = sorted(range(m), key=lambda i: (int(rels[i].sum()), int(codes[i])))
    rels = rels[order]
    codes = codes[order]
    index = {int(c): i for i, c in enumerate(codes)}

    def idx(R):
        return index[int((R.reshape(-1).astype(np.int64) * weights).sum())]

    Ri = rels.astype(np.int64)
    prods = np.einsum("aij,bjk->abik", Ri, Ri) > 0
    pcodes = (prods.reshape(m, m, -1).astype(np.int64) * weights).sum(axis=2)
    comp = np.vectorize(lambda c: index[int(c)])(pcodes) if m else np.zeros((0, 0), int)
    neg = [idx(~R.T) for R in rels]
    leq = ~(rels[:, None] & ~rels[None, :]).any(axis=(2, 3))
    one = idx(P.leq)
    top = idx(np.ones((n, n), dtype=bool))
    bot = idx(np.zeros((n, n), dtype=bool))
    names = [_relation_name(P, R) for R in rels]
    return ConcreteAlgebra(
        leq, comp, neg, bot, top, one, names=names,
        name=name or f"wk({n}-point poset)", poset=P, relations=rels,
    )


# ------------------------------------------------------- representations


def verify_representation(A: FiniteAlgebra, P: Poset, h) -> AxiomReport:
    """Check that ``h`` (element index or name -> relation over P) is a
    representation: an injective homomorphism into the weakening relations
    over P with h(1) the order and h(top) an equivalence relation.

    ~ is checked relative to h(top): h(~s) = h(top) minus the converse of h(s).
    """
    n = len(P)
    if isinstance(h, dict):
        imgs = {}
        for key, R in h.items():
            imgs[A.index(key)] = np.asarray(R, dtype=bool)
    else:
        imgs = {i: np.asarray(R, dtype=bool) for i, R in enumerate(h)}
    missing = [A.names[i] for i in range(A.m) if i not in imgs]
    if missing:
        raise MalformedInput(f"representation map misses elements: {missing}")
    for i, R in imgs.items():
        if R.shape != (n, n):
            raise MalformedInput(f"image of {A.names[i]} has shape {R.shape}")
    H = np.array([imgs[i] for i in range(A.m)])
    rep = AxiomReport(subject=f"representation of {A.name}".strip(), names=A.names)

    def run(label, bad):
        w = next(iter(bad), None)
        return rep.add(label, w is None, w)

    run("weakening", ({"s": s} for s in range(A.m) if not is_weakening(P, H[s])))
    seen = {}
    dup = None
    for s in range(A.m):
        key = H[s].tobytes()
        if key in seen:
            dup = {"s": seen[key], "t": s}
            break
        seen[key] = s
    rep.add("injective", dup is None, dup)
    run("bot", ({"s": A.bot} for _ in [0] if H[A.bot].any()))
    top = H[A.top]
    equiv = (
        np.diag(top).all()
        and (top == top.T).all()
        and (compose(top, top) <= top).all()
    )
    rep.add("top-equivalence", bool(equiv), None if equiv else {"s": A.top})
    run("one-is-order", ({"s": A.one} for _ in [0] if not (H[A.one] == P.leq).all()))
    J, M, C, N = A.join_table, A.meet_table, A.comp, A.neg
    pairs = list(product(range(A.m), repeat=2))
    run("meet", ({"s": s, "t": t} for s, t in pairs if not (H[M[s, t]] == (H[s] & H[t])).all()))
    run("join", ({"s": s, "t": t} for s, t in pairs if not (H[J[s, t]] == (H[s] | H[t])).all()))
    run("comp", ({"s": s, "t": t} for s, t in pairs if not (H[C[s, t]] == compose(H[s], H[t])).all()))
    run("neg", ({"s": s} for s in range(A.m) if not (H[N[s]] == (top & ~H[s].T)).all()))
    return rep


def identity_representation(A: ConcreteAlgebra):
    return {i: A.relations[i] for i in range(A.m)}


# ------------------------------------------------ homomorphisms, products


def is_homomorphism(A: FiniteAlgebra, B: FiniteAlgebra, h) -> AxiomReport:
    """Pointwise check of a full-signature homomorphism A -> B (h a list)."""
    h = np.asarray(h, dtype=np.int64)
    rep = AxiomReport(subject=f"homomorphism {A.name} -> {B.name}", names=A.names)
    for label, a, b in (("bot", A.bot, B.bot), ("top", A.top, B.top), ("one", A.one, B.one)):
        rep.add(label, h[a] == b, None if h[a] == b else {"s": a})
    bad = np.flatnonzero(h[A.neg] != B.neg[h])
    rep.add("neg", len(bad) == 0, {"s": int(bad[0])} if len(bad) else None)
    for label, ta, tb in (
        ("join", A.join_table, B.join_table),
        ("meet", A.meet_table, B.meet_table),
        ("comp", A.comp, B.comp),
    ):
        w = np.argwhere(h[ta] != tb[h[:, None], h[None, :]])
        rep.add(label, len(w) == 0, {"s": int(w[0][0]), "t": int(w[0][1])} if len(w) else None)
    return rep


def direct_product(A: FiniteAlgebra, B: FiniteAlgebra, name=None) -> FiniteAlgebra:
    """Componentwise product; element (a, b) has index a * len(B) + b."""
    mb = B.m

    def pair(x, y):
        return x * mb + y

    a, b = np.divmod(np.arange(A.m * mb), mb)
    leq = A.leq[a[:, None], a[None, :]] & B.leq[b[:, None], b[None, :]]
    comp = pair(A.comp[a[:, None], a[None, :]], B.comp[b[:, None], b[None, :]])
    neg = pair(A.neg[a], B.neg[b])
    names = [f"({A.names[x]},{B.names[y]})" for x, y in zip(a, b)]
    return FiniteAlgebra(
        leq, comp, neg, pair(A.bot, B.bot), pair(A.top, B.top), pair(A.one, B.one),
        names=names, name=name or f"{A.name}×{B.name}",
    )


def extend_generators(A: FiniteAlgebra, B: FiniteAlgebra, gens: dict):
    """Extend a partial map on generators to the subalgebra they generate.

    Returns the full map as a list, or None on a conflict or if the generators
    do not generate A.
    """
    h = {A.bot: B.bot, A.top: B.top, A.one: B.one}
    for k, v in gens.items():
        k, v = A.index(k), B.index(v)
        if h.get(k, v) != v:
            return None
        h[k] = v
    J, M, C, N = A.join_table, A.meet_table, A.comp, A.neg
    BJ, BM, BC, BN = B.join_table, B.meet_table, B.comp, B.neg
    changed = True
    while changed:
        changed = False
        dom = list(h)
        updates = []
        for x in dom:
            updates.append((int(N[x]), int(BN[h[x]])))
            for y in dom:
                hx, hy = h[x], h[y]
                updates.append((int(J[x, y]), int(BJ[hx, hy])))
                updates.append((int(M[x, y]), int(BM[hx, hy])))
                updates.append((int(C[x, y]), int(BC[hx, hy])))
        for k, v in updates:
            if k in h:
                if h[k] != v:
                    return None
            else:
                h[k] = v
                changed = True
    if len(h) != A.m:
        return None
    return [h[i] for i in range(A.m)]


def generating_set(A: FiniteAlgebra) -> list[int]:
    """A smallest set of elements generating A together with the constants."""
    fixed = {A.bot, A.top, A.one}
    others = [s for s in range(A.m) if s not in fixed]
    for size in range(len(others) + 1):
        for gens in combinations(others, size):
            if extend_generators(A, A, {g: g for g in gens}) is not None:
                return list(gens)
    return others


def find_embedding(A: FiniteAlgebra, B: FiniteAlgebra):
    """First injective homomorphism A -> B (as a list), or None.

    Images of a minimal generating set are tried in lexicographic order and
    extended by closure; every candidate is re-checked pointwise.
    """
    gens = generating_set(A)
    for images in product(range(B.m), repeat=len(gens)):
        h = extend_generators(A, B, dict(zip(gens, images)))
        if h is None or len(set(h)) != A.m:
            continue
        if is_homomorphism(A, B, h).ok:
            return h
    return None


def algebra_isomorphism(A: FiniteAlgebra, B: FiniteAlgebra):
    """Element bijection preserving all tables, by backtracking; None if absent."""
    if A.m != B.m:
        return None
    m = A.m

    def inv(X, s):
        return (int(X.leq[:, s].sum()), int(X.leq[s].sum()), int(X.comp[s, s] == s))

    ia = [inv(A, s) for s in range(m)]
    ib = [inv(B, s) for s in range(m)]
    if sorted(ia) != sorted(ib):
        return None
    f = {A.bot: B.bot, A.top: B.top, A.one: B.one}
    if len(f) != len({v for v in f.values()}) or any(ia[k] != ib[v] for k, v in f.items()):
        return None
    order = sorted((s for s in range(m) if s not in f), key=lambda s: ia[s])
    used = set(f.values())

    def consistent(s, t):
        f[s] = t
        try:
            for x, fx in f.items():
                if A.leq[s, x] != B.leq[t, fx] or A.leq[x, s] != B.leq[fx, t]:
                    return False
                for p, q in ((s, x), (x, s)):
                    c = int(A.comp[p, q])
                    if c in f and f[c] != B.comp[f[p], f[q]]:
                        return False
            for x, fx in f.items():
                nx = int(A.neg[x])
                if nx in f and f[nx] != B.neg[fx]:
                    return False
            return True
        finally:
            del f[s]

    def search(i):
        if i == len(order):
            return True
        s = order[i]
        for t in range(m):
            if t in used or ib[t] != ia[s] or not consistent(s, t):
                continue
            f[s] = t
            used.add(t)
            if search(i + 1):
                return True
            del f[s]
            used.discard(t)
        return False

    if not search(0):
        return None
    h = [f[i] for i in range(m)]
    return h if is_homomorphism(A, B, h).ok else None


def algebras_isomorphic(A, B) -> bool:
    return algebra_isomorphism(A, B) is not None


def subalgebra(A: FiniteAlgebra, elements, name=None, one=None) -> FiniteAlgebra:
    """Restriction of A to a subuniverse; raises ValueError if not closed.

    ``one`` names a different unit for the subset (weakening subalgebras of a
    relation algebra use the order as unit); it is checked to be two-sided.
    """
    elems = [A.index(e) for e in elements]
    pos = {e: i for i, e in enumerate(elems)}
    unit = A.one if one is None else A.index(one)
    for c in (A.bot, A.top, unit):
        if c not in pos:
            raise ValueError(f"constant {A.names[c]} missing from subuniverse")
    for s in elems:
        if int(A.neg[s]) not in pos:
            raise ValueError(f"~{A.names[s]} leaves the subuniverse")
        if A.comp[s, unit] != s or A.comp[unit, s] != s:
            raise ValueError(f"{A.names[unit]} is not a unit for {A.names[s]}")
        for t in elems:
            for tab in (A.join_table, A.meet_table, A.comp):
                if int(tab[s, t]) not in pos:
                    raise ValueError(f"subuniverse not closed at ({A.names[s]},{A.names[t]})")
    idx = np.array(elems)
    comp = [[pos[int(A.comp[s, t])] for t in elems] for s in elems]
    neg = [pos[int(A.neg[s])] for s in elems]
    return FiniteAlgebra(
        A.leq[np.ix_(idx, idx)], comp, neg, pos[A.bot], pos[A.top], pos[unit],
        names=[A.names[s] for s in elems], name=name or f"sub({A.name})",
    )


# ---------------------------------------------------- specific algebras


def cm_z7() -> FiniteAlgebra:
    """Complex algebra of Z7: subsets (bitmask index), sumset composition,
    1 = {0}, ~S = complement of -S."""
    n = 7
    full = (1 << n) - 1

    def elems(mask):
        return [i for i in range(n) if mask >> i & 1]

    def neg_set(mask):
        minus = sum(1 << ((-i) % n) for i in elems(mask))
        return full & ~minus

    m = 1 << n
    comp = np.zeros((m, m), dtype=np.int64)
    for s in range(m):
        es = elems(s)
        for t in range(m):
            comp[s, t] = sum({1 << ((i + j) % n) for i in es for j in elems(t)})
    masks = np.arange(m)
    leq = (masks[:, None] & ~masks[None, :]) == 0
    names = ["{" + ",".join(map(str, elems(s))) + "}" for s in range(m)]
    return FiniteAlgebra(
        leq, comp, [neg_set(s) for s in range(m)], 0, full, 1, names=names, name="Cm(Z7)"
    )


def cayley_representation(n=7):
    """S subset of Z_n maps to {(x, y) : y - x in S} over the discrete poset."""
    P = Poset.antichain(n)
    x, y = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    diff = (y - x) % n
    return P, [((s >> diff) & 1).astype(bool) for s in range(1 << n)]


POINT_ATOMS = ("id", "<", ">")
POINT_NAMES = ["∅", "id", "<", "≤", ">", "≥", "<∪>", "⊤"]


def order_type_configurations():
    """All 13 weak orderings of three labelled rational points (x, y, z)."""
    out = []
    for ranks in product(range(3), repeat=3):
        used = sorted(set(ranks))
        if used == list(range(len(used))):
            out.append(ranks)
    return out


def _point_relation(p, q):
    return "id" if p == q else ("<" if p < q else ">")


def point_atom_table():
    """compose(r1, r2) = realisable relations (x, z) given x r1 y and y r2 z."""
    table = {(a, b): set() for a in POINT_ATOMS for b in POINT_ATOMS}
    for x, y, z in order_type_configurations():
        table[_point_relation(x, y), _point_relation(y, z)].add(_point_relation(x, z))
    return table


def point_algebra() -> FiniteAlgebra:
    """The 8-element point algebra over (Q, <); element index = bitmask over
    (id, <, >).  Composition of atoms comes from the order-type oracle."""
    bit = {a: 1 << i for i, a in enumerate(POINT_ATOMS)}
    atoms_tab = point_atom_table()
    conv = {"id": "id", "<": ">", ">": "<"}
    m = 8

    def atoms(s):
        return [a for a in POINT_ATOMS if s & bit[a]]

    comp = [[sum({bit[c] for a in atoms(s) for b in atoms(t) for c in atoms_tab[a, b]})
             for t in range(m)] for s in range(m)]
    neg = [7 & ~sum(bit[conv[a]] for a in atoms(s)) for s in range(m)]
    masks = np.arange(m)
    leq = (masks[:, None] & ~masks[None, :]) == 0
    return FiniteAlgebra(leq, comp, neg, 0, 7, bit["id"], names=POINT_NAMES, name="P")


def point_subalgebras():
    """S4 = {∅,<,≤,⊤} and W6,1 = {∅,id,<,≤,<∪>,⊤} as subalgebras of P."""
    P = point_algebra()
    S4 = subalgebra(P, ["∅", "<", "≤", "⊤"], name="S4 in P", one="≤")
    W61 = subalgebra(P, ["∅", "id", "<", "≤", "<∪>", "⊤"], name="W6,1 in P")
    return S4, W61


def sugihara_indices(n):
    k = n // 2
    if n % 2:
        return list(range(-k, k + 1))
    return [i for i in range(-k, k + 1) if i != 0]


def sugihara(n) -> FiniteAlgebra:
    """Sugihara chain S_n on a_i (i as in sugihara_indices), ~a_i = a_-i.

    Product: the factor of larger absolute index wins; ties take the meet.
    The unit is a_0 (odd n) or a_1 (even n).
    """
    if n < 1:
        raise ValueError("n must be positive")
    idx = sugihara_indices(n)
    pos = {i: p for p, i in enumerate(idx)}

    def prod(i, j):
        if abs(i) > abs(j):
            return i
        if abs(j) > abs(i):
            return j
        return min(i, j)

    comp = [[pos[prod(i, j)] for j in idx] for i in idx]
    neg = [pos[-i] for i in idx]
    leq = np.triu(np.ones((n, n), dtype=bool))
    one = pos[0] if n % 2 else pos[1]
    return FiniteAlgebra(
        leq, comp, neg, 0, n - 1, one, names=[f"a{i}" for i in idx], name=f"S{n}"
    )


def hom_even_to_odd(n):
    """Surjection S_n -> S_(n-1) identifying a_1 and a_-1 (n even).

    Returns (S_n, S_(n-1), map); raises ValueError for odd n or a failed check.
    """
    if n % 2 or n < 2:
        raise ValueError(f"source chain must be even, got S{n}")
    src, dst = sugihara(n), sugihara(n - 1)
    dpos = {i: p for p, i in enumerate(sugihara_indices(n - 1))}
    h = [dpos[(abs(i) - 1) * (1 if i > 0 else -1)] for i in sugihara_indices(n)]
    rep = is_homomorphism(src, dst, h)
    if not rep.ok or len(set(h)) != dst.m:
        raise ValueError(f"S{n} -> S{n - 1} is not a surjective homomorphism:\n{rep.format()}")
    return src, dst, h


# ------------------------------------------------------------ discriminator


def discriminator_lemma_failures(P: Poset, unit=None, relations=None):
    """Relations R over P for which 1.(R;(R.~R)) or 1.(~R;(R.~R)) is nonempty.

    ``unit`` is the relation used for 1 (default: the diagonal, as in the
    diagonal setting); ``relations`` defaults to the weakening relations
    over P.  ~R is the complement of the converse.
    """
    n = len(P)
    rels = weakening_relations(P) if relations is None else np.asarray(relations, dtype=bool)
    one = np.eye(n, dtype=bool) if unit is None else np.asarray(unit, dtype=bool)
    neg = ~np.transpose(rels, (0, 2, 1))
    mix = (rels & neg).astype(np.int64)
    d1 = np.einsum("rij,rjk->rik", rels.astype(np.int64), mix) > 0
    d2 = np.einsum("rij,rjk->rik", neg.astype(np.int64), mix) > 0
    bad = ((d1 | d2) & one).any(axis=(1, 2))
    return [rels[i] for i in np.flatnonzero(bad)]
