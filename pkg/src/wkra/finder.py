"""Isomorph-free enumeration of finite algebras through their frames.

A finite algebra is fixed by its frame: a poset P of join-irreducibles, an
order-reversing involution ``hat``, the downset ``I`` below 1, and the ternary
relation R.  R is stored as ``D[b, c]``, the downset {a : R(a,b,c)}, which
must be monotone in b and c.  The unit law then reads

* b in I implies D(b, c) is inside the downset of c, c in I implies D(b, c)
  is inside the downset of b;
* every c has some e in I with c in D(e, c) and c in D(c, e).

Candidate tables are produced one (P, hat, I) family at a time by combining
monotone rows with numpy, so whole families are checked in batches.
"""

from __future__ import annotations

import hashlib
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations, product

import numpy as np

from .algebra import FiniteAlgebra
from .axioms import ASSOCIATIVITY, PHI2_ITEMS, PHI3_ITEMS, AxiomProfile, _parsed
from .frame import RelevanceFrame, algebra_to_frame, frame_to_algebra
from .models import Poset, all_posets
from .terms import axes_env, eval_qf, term_vars

DEFAULT_MAX_SIZE = 8


class EnumerationBoundExceeded(ValueError):
    pass


# ------------------------------------------------------------ canonical form


def _canonical_orders(leq):
    """All point orders giving the least leq matrix (as bytes)."""
    k = len(leq)
    sig = [(int(leq[:, p].sum()), int(leq[p].sum())) for p in range(k)]
    blocks = [[p for p in range(k) if sig[p] == g] for g in sorted(set(sig))]
    best, orders = None, []
    for choice in product(*(permutations(b) for b in blocks)):
        order = [p for block in choice for p in block]
        key = leq[np.ix_(order, order)].tobytes()
        if best is None or key < best:
            best, orders = key, [order]
        elif key == best:
            orders.append(order)
    return best if best is not None else b"", orders


def _relabel(order, hat, I, R):
    """Frame parts after renaming point order[i] to i."""
    order = np.asarray(order, dtype=np.int64)
    inv = np.empty_like(order)
    inv[order] = np.arange(len(order))
    return (
        inv[np.asarray(hat)[order]],
        np.asarray(I, dtype=bool)[order],
        np.asarray(R, dtype=bool)[np.ix_(order, order, order)],
    )


def frame_key(F: RelevanceFrame) -> bytes:
    """Isomorphism-invariant key of a frame."""
    leq_key, orders = _canonical_orders(np.asarray(F.leq))
    best = None
    for order in orders:
        h, i, r = _relabel(order, F.hat, F.I, F.R)
        key = h.astype(np.uint8).tobytes() + i.tobytes() + r.tobytes()
        if best is None or key < best:
            best = key
    return bytes([F.k]) + leq_key + (best or b"")


def canonical_form(A: FiniteAlgebra) -> bytes:
    """Isomorphism-invariant key; equal keys iff the algebras are isomorphic.

    The frame determines the algebra with bot, top and one fixed, so only
    point permutations are searched.
    """
    return bytes([min(A.m, 255)]) + frame_key(algebra_to_frame(A))


def key_digest(key: bytes) -> str:
    return hashlib.sha1(key).hexdigest()[:12]


# ------------------------------------------------------------- families


@dataclass
class Family:
    """One (P, hat, I) choice on a canonically ordered poset."""

    leq: np.ndarray
    hat: np.ndarray
    I: np.ndarray
    stabilizer: list
    downsets: list = field(default_factory=list)

    @property
    def k(self):
        return len(self.hat)

    @property
    def m(self):
        return len(self.downsets)

    def prefix(self) -> bytes:
        return (
            bytes([self.m, self.k])
            + self.leq.tobytes()
            + self.hat.astype(np.uint8).tobytes()
            + self.I.tobytes()
        )


def _hats(leq):
    k = len(leq)
    out = []
    for p in permutations(range(k)):
        if any(p[p[i]] != i for i in range(k)):
            continue
        if all(leq[p[b], p[a]] for a in range(k) for b in range(k) if leq[a, b]):
            out.append(np.array(p, dtype=np.int64))
    return out


def _sorted_downsets(leq):
    P = Poset(leq)
    return sorted(P.downsets(), key=lambda x: (bin(x).count("1"), x))


def families(max_size: int):
    """All families with at most ``max_size`` downsets, orbit representatives
    under poset automorphisms, in a fixed order."""
    out = []
    k = 0
    while True:
        posets = all_posets(k, max_size)
        if not posets:
            break
        for P in posets:
            leq_key, orders = _canonical_orders(P.leq)
            o = orders[0]
            leq = P.leq[np.ix_(o, o)].copy()
            _, autos = _canonical_orders(leq)
            autos = [np.array(a, dtype=np.int64) for a in autos]
            ds = _sorted_downsets(leq)
            for hat in _hats(leq):
                for I_mask in ds:
                    if k and I_mask == 0:
                        continue
                    I = np.array([bool(I_mask >> p & 1) for p in range(k)])
                    key = hat.astype(np.uint8).tobytes() + I.tobytes()
                    stab, minimal = [], True
                    for g in autos:
                        h2, i2, _ = _relabel(g, hat, I, np.zeros((k, k, k), bool))
                        k2 = h2.astype(np.uint8).tobytes() + i2.tobytes()
                        if k2 < key:
                            minimal = False
                            break
                        if k2 == key:
                            stab.append(g)
                    if minimal:
                        out.append(Family(leq, hat, I, stab, ds))
        k += 1
    return out


def _rows(fam: Family, b: int):
    """All monotone rows c -> D(b, c) within the unit upper bounds."""
    k, leq = fam.k, fam.leq
    down = [sum(1 << q for q in range(k) if leq[q, p]) for p in range(k)]
    full = (1 << k) - 1
    order = sorted(range(k), key=lambda p: bin(down[p]).count("1"))
    out = []
    row = [0] * k

    def rec(i):
        if i == k:
            out.append(tuple(row))
            return
        c = order[i]
        lo = 0
        for q in order[:i]:
            if leq[q, c]:
                lo |= row[q]
        hi = full
        if fam.I[b]:
            hi &= down[c]
        if fam.I[c]:
            hi &= down[b]
        for X in fam.downsets:
            if X & lo == lo and X & ~hi == 0:
                row[c] = X
                rec(i + 1)

    rec(0)
    rows = np.array(out, dtype=np.int64).reshape(-1, k)
    maxI = _maximal(fam.leq, np.flatnonzero(fam.I))
    if len(maxI) == 1 and len(rows):
        # with a single maximal unit point e the existence half of the unit
        # law is row-local: b in D(b, e), and D(e, c) contains c
        e = maxI[0]
        rows = rows[(rows[:, e] >> b & 1) == 1]
        if b == e:
            bit = 1 << np.arange(k)
            rows = rows[((rows & bit) != 0).all(axis=1)]
    return rows


def _maximal(leq, pts):
    return [p for p in pts if not any(q != p and leq[p, q] for q in pts)]


def family_tables(fam: Family, chunk: int = 200_000):
    """All D tables of a family as an (N, k, k) int array of point bitmasks,
    one representative per stabilizer orbit."""
    k = fam.k
    if k == 0:
        return np.zeros((1, 0, 0), dtype=np.int64)
    down = [sum(1 << q for q in range(k) if fam.leq[q, p]) for p in range(k)]
    order = sorted(range(k), key=lambda p: bin(down[p]).count("1"))
    rows = {b: _rows(fam, b) for b in range(k)}
    covers = {
        b: [q for q in range(k) if q != b and fam.leq[q, b]
            and not any(r not in (q, b) and fam.leq[q, r] and fam.leq[r, b] for r in range(k))]
        for b in range(k)
    }
    # compat[q, b][i, j]: row i of q is below row j of b everywhere
    compat = {}
    for b in range(k):
        for q in covers[b]:
            rq, rb = rows[q], rows[b]
            compat[q, b] = ((rq[:, None, :] & ~rb[None, :, :]) == 0).all(axis=2)
    partial = np.zeros((1, 0), dtype=np.int64)
    placed = []
    for b in order:
        ok = np.ones((len(partial), len(rows[b])), dtype=bool)
        for q in covers[b]:
            ok &= compat[q, b][partial[:, placed.index(q)]]
        i, j = np.nonzero(ok)
        partial = np.concatenate([partial[i], j[:, None]], axis=1)
        placed.append(b)
    D = np.empty((len(partial), k, k), dtype=np.int64)
    for col, b in enumerate(placed):
        D[:, b, :] = rows[b][partial[:, col]]
    # unit existence: each c lies in D(e, c) and D(c, e) for some e in I
    Ie = np.flatnonzero(fam.I)
    ar = np.arange(k)
    bit = 1 << ar
    left = ((D[:, Ie][:, :, ar] & bit) != 0).any(axis=1)
    right = ((D[:, ar][:, :, Ie] & bit[None, :, None]) != 0).any(axis=2)
    D = D[left.all(axis=1) & right.all(axis=1)]
    if len(fam.stabilizer) > 1 and len(D):
        D = _orbit_minimal(D, fam)
    return D


def tables_to_R(D, k):
    bit = 1 << np.arange(k)
    return (D[:, None, :, :] & bit[None, :, None, None]) != 0


def _R_bytes(R):
    N = len(R)
    return R.reshape(N, -1).astype(np.uint8)


def _lex_less(A, B):
    """Row-wise A < B lexicographically for equal-width uint8 matrices."""
    diff = A != B
    anyd = diff.any(axis=1)
    first = diff.argmax(axis=1)
    rows = np.arange(len(A))
    return anyd & (A[rows, first] < B[rows, first])


def _orbit_minimal(D, fam):
    k = fam.k
    R = tables_to_R(D, k)
    base = _R_bytes(R)
    keep = np.ones(len(D), dtype=bool)
    for g in fam.stabilizer:
        inv = np.empty_like(g)
        inv[g] = np.arange(k)
        Rg = R[:, g][:, :, g][:, :, :, g]
        keep &= ~_lex_less(_R_bytes(Rg), base)
    return D[keep]


# ------------------------------------------------------- batched algebra


class Batch:
    """Tables of many algebras of one family sharing order, neg and constants."""

    def __init__(self, fam: Family, D):
        k, ds = fam.k, fam.downsets
        m = len(ds)
        self.fam = fam
        self.D = D
        index = np.full(1 << k, -1, dtype=np.int64)
        for i, mask in enumerate(ds):
            index[mask] = i
        masks = np.array(ds, dtype=np.int64)
        self.masks = masks
        self.leq = (masks[:, None] & ~masks[None, :]) == 0
        hatbits = [np.flatnonzero([(mask >> p) & 1 for p in range(k)]) for mask in ds]
        hat = fam.hat
        negm = []
        for mask in ds:
            negm.append(sum(1 << a for a in range(k) if not (mask >> int(hat[a])) & 1))
        self.neg = index[np.array(negm, dtype=np.int64)] if k else np.zeros(1, np.int64)
        one_mask = sum(1 << a for a in range(k) if any(fam.I[e] and fam.leq[a, e] for e in range(k)))
        self.bot, self.top, self.one = 0, m - 1, int(index[one_mask]) if k else 0
        N = len(D)
        comp = np.zeros((N, m, m), dtype=np.int64)
        for s in range(m):
            for t in range(m):
                acc = np.zeros(N, dtype=np.int64)
                for b in hatbits[s]:
                    for c in hatbits[t]:
                        acc |= D[:, b, c]
                comp[:, s, t] = acc
        self.comp_masks = comp
        self.comp = index[comp] if k else np.zeros((N, 1, 1), np.int64)
        ref = FiniteAlgebra(self.leq, np.zeros((m, m), np.int64), self.neg, 0, m - 1, self.one)
        self.join_table = ref.join_table
        self.meet_table = ref.meet_table
        self.m = m

    def __len__(self):
        return len(self.D)

    @property
    def zero(self):
        return int(self.neg[self.one])

    def frame(self, i, name="") -> RelevanceFrame:
        fam = self.fam
        R = tables_to_R(self.D[i:i + 1], fam.k)[0]
        return RelevanceFrame(fam.leq, fam.hat, fam.I, R, name=name)

    def algebra(self, i, name="") -> FiniteAlgebra:
        return frame_to_algebra(self.frame(i), name=name)

    def key(self, i) -> bytes:
        R = tables_to_R(self.D[i:i + 1], self.fam.k)[0]
        return bytes([min(self.m, 255)]) + _family_frame_key(self.fam, R)


def _family_frame_key(fam, R):
    # fam.leq is already in canonical order, so only its automorphisms matter
    k = fam.k
    leq_key = fam.leq.tobytes()
    best = None
    for g in fam.stabilizer or [np.arange(k)]:
        h, i, r = _relabel(g, fam.hat, fam.I, R)
        key = h.astype(np.uint8).tobytes() + i.tobytes() + r.tobytes()
        if best is None or key < best:
            best = key
    return bytes([k]) + leq_key + best


class _BatchView:
    """Adapter so :func:`wkra.terms.eval_term` evaluates over a whole batch."""

    def __init__(self, batch, sel, nvars):
        self.b = batch
        self.leq = batch.leq
        self.neg = batch.neg
        self.join_table = batch.join_table
        self.meet_table = batch.meet_table
        self.bot, self.top, self.one = batch.bot, batch.top, batch.one
        self.zero = batch.zero
        self.m = batch.m
        self.comp = _BatchComp(batch.comp[sel], nvars)


class _BatchComp:
    def __init__(self, comp, nvars):
        self.comp = comp
        self.n = np.arange(len(comp)).reshape((-1,) + (1,) * nvars)

    def __getitem__(self, key):
        x, y = key
        return self.comp[self.n, x, y]


def batch_check(batch: Batch, text: str, sel=None, chunk_cells=4_000_000):
    """Boolean vector: which algebras of the batch satisfy the formula."""
    f = _parsed(text)
    variables = term_vars(f)
    nv = len(variables)
    sel = np.arange(len(batch)) if sel is None else np.asarray(sel)
    out = np.ones(len(sel), dtype=bool)
    step = max(1, chunk_cells // max(1, batch.m ** nv))
    env = {v: a[None] for v, a in axes_env(variables, batch.m).items()}
    for lo in range(0, len(sel), step):
        part = sel[lo:lo + step]
        view = _BatchView(batch, part, nv)
        truth = eval_qf(view, f, env)
        truth = np.broadcast_to(truth, (len(part),) + (batch.m,) * nv)
        out[lo:lo + step] = truth.reshape(len(part), -1).all(axis=1)
    return out


def batch_profile(batch: Batch, profile: AxiomProfile):
    """Which algebras of the batch satisfy ``profile`` (base always holds)."""
    ok = np.ones(len(batch), dtype=bool)
    if profile.diagonal and batch.meet_table[batch.one, batch.zero] != batch.bot:
        ok[:] = False
    checks = []
    if profile.assoc:
        checks.append(ASSOCIATIVITY[1])
    items = PHI3_ITEMS if profile.phi3 else PHI2_ITEMS if profile.phi2 else ()
    checks.extend(text for _, text in items)
    for text in checks:
        idx = np.flatnonzero(ok)
        if len(idx) == 0:
            break
        ok[idx] = batch_check(batch, text, idx)
    return ok


# ------------------------------------------------------------- enumerate


@dataclass(frozen=True)
class EnumerationTask:
    max_size: int
    profile: AxiomProfile = AxiomProfile()
    emit: str | None = None

    def __post_init__(self):
        if self.max_size < 1:
            raise ValueError("max_size must be at least 1")


def iter_batches(max_size: int, threads: int | None = None):
    """Yield one :class:`Batch` per family (all base algebras up to size)."""
    fams = families(max_size)

    def build(fam):
        return Batch(fam, family_tables(fam))

    threads = threads or 1
    if threads <= 1:
        for fam in fams:
            yield build(fam)
    else:
        with ThreadPoolExecutor(threads) as pool:
            yield from pool.map(build, fams)


def enumerate_algebras(task, threads: int | None = None, bound=None):
    """Canonical algebras of the task's profile, sorted by (size, key).

    Returns a list of ``(key, FiniteAlgebra)`` pairs.
    """
    if isinstance(task, int):
        task = EnumerationTask(task)
    bound = bound if bound is not None else int(os.environ.get("WKRA_MAX_SIZE", DEFAULT_MAX_SIZE))
    if task.max_size > bound:
        raise EnumerationBoundExceeded(f"max_size {task.max_size} exceeds the bound {bound}")
    threads = threads or default_threads()

    def work(batch):
        ok = batch_profile(batch, task.profile)
        return [(batch.key(i), batch, i) for i in np.flatnonzero(ok)]

    found = []
    for batch in iter_batches(task.max_size, threads):
        found.extend(work(batch))
    found.sort(key=lambda t: (t[0][0], t[0]))
    out = []
    for key, batch, i in found:
        A = batch.algebra(i, name=key_digest(key))
        out.append((key, A))
    if task.emit:
        from .io import dump_algebra

        os.makedirs(task.emit, exist_ok=True)
        for key, A in out:
            dump_algebra(A, os.path.join(task.emit, f"{key_digest(key)}.json"))
    return out


def count_algebras(task, threads: int | None = None, bound=None) -> dict:
    """Per-size counts without building the algebras.

    Families are orbit representatives and tables are orbit-minimal, so
    every isomorphism class is met exactly once.
    """
    if isinstance(task, int):
        task = EnumerationTask(task)
    bound = bound if bound is not None else int(os.environ.get("WKRA_MAX_SIZE", DEFAULT_MAX_SIZE))
    if task.max_size > bound:
        raise EnumerationBoundExceeded(f"max_size {task.max_size} exceeds the bound {bound}")
    counts = {}
    for batch in iter_batches(task.max_size, threads or default_threads()):
        n = int(batch_profile(batch, task.profile).sum())
        if n:
            counts[batch.m] = counts.get(batch.m, 0) + n
    return dict(sorted(counts.items()))


def default_threads() -> int:
    return max(1, len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else os.cpu_count() or 1)


def size_counts(found):
    counts = {}
    for key, A in found:
        counts[A.m] = counts.get(A.m, 0) + 1
    return dict(sorted(counts.items()))


def batch_frame_conditions(batch: Batch, level: int = 3):
    """Frame-condition verdicts for every frame of the batch."""
    from .axioms import frame_conditions_batch

    fam = batch.fam
    return frame_conditions_batch(fam.leq, fam.hat, fam.I, tables_to_R(batch.D, fam.k), level)
