"""Networks and representation games.

Frame side
    :class:`FrameNetwork` (one point per ordered node pair), the pebble game
    solved as a greatest fixpoint over canonical networks, and a bounded-round
    search of the literal game in which no node is ever forgotten.

Algebra side
    :class:`TermNetwork` (a set of elements per ordered node pair), the
    bounded-round game decided by memoised alternating search, and the
    sentences sigma_n emitted as text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, permutations, product

import numpy as np

from .algebra import FiniteAlgebra
from .frame import RelevanceFrame, r_min_all
from .terms import (Conn, Const, Quant, Rel, Var, comp, conj, disj, formula_size, join, neg,
                    show)

EXISTS = "∃"
FORALL = "∀"
INCONCLUSIVE = "inconclusive"


@dataclass
class GameVerdict:
    """Outcome of a game.

    ``certificate`` is a list of canonical networks (the surviving basis) when
    ∃ wins and a list of move records when ∀ wins.
    """

    winner: str
    certificate: list = field(default_factory=list)
    detail: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def exists_wins(self) -> bool:
        return self.winner == EXISTS

    def __str__(self):
        if self.winner == INCONCLUSIVE:
            return f"inconclusive ({self.detail})"
        return f"{self.winner} wins"


# ================================================================ frames


@dataclass(frozen=True)
class FrameNetwork:
    """Complete labelled graph; ``labels[x][y]`` is a frame point."""

    labels: tuple

    @classmethod
    def of(cls, labels):
        return cls(tuple(tuple(int(v) for v in row) for row in labels))

    @property
    def size(self) -> int:
        return len(self.labels)

    def label(self, x, y) -> int:
        return self.labels[x][y]

    def restrict(self, nodes) -> "FrameNetwork":
        return FrameNetwork(tuple(tuple(self.labels[x][y] for y in nodes) for x in nodes))

    def edges(self):
        return {v for row in self.labels for v in row}

    def canonical(self) -> "FrameNetwork":
        return FrameNetwork(canonical_labels(self.labels))

    def to_json(self, names=None):
        if names is None:
            return [list(row) for row in self.labels]
        return [[names[v] for v in row] for row in self.labels]


def canonical_labels(labels) -> tuple:
    """Least label matrix (row-major) over all node permutations."""
    n = len(labels)
    best = None
    for p in permutations(range(n)):
        cand = tuple(tuple(labels[p[i]][p[j]] for j in range(n)) for i in range(n))
        if best is None or cand < best:
            best = cand
    return best if best is not None else ()


def frame_consistent(N: FrameNetwork, F: RelevanceFrame, require_identity=True) -> bool:
    """Converse labels are hats, every triangle lies in R, diagonals lie in I."""
    lab = np.asarray(N.labels, dtype=np.int64).reshape(N.size, N.size)
    if N.size == 0:
        return True
    if (lab.min() < 0) or lab.max() >= F.k:
        return False
    if not (np.asarray(F.hat)[lab.T] == lab).all():
        return False
    if require_identity and not np.asarray(F.I)[np.diag(lab)].all():
        return False
    # R(l(x,y), l(x,z), l(z,y)) for all x, y, z
    xy = lab[:, None, :]
    xz = lab[:, :, None]
    zy = lab[None, :, :]
    return bool(np.asarray(F.R)[np.broadcast_arrays(xy, xz, zy)].all())


class _FrameData:
    """Per-frame lookups shared by the solvers."""

    def __init__(self, F: RelevanceFrame):
        self.F = F
        self.k = F.k
        self.R = np.asarray(F.R, dtype=bool)
        self.hat = [int(h) for h in F.hat]
        self.I = [bool(v) for v in F.I]
        self.diag = [e for e in range(self.k) if self.I[e] and self.hat[e] == e and self.R[e, e, e]]
        M = r_min_all(F)
        self.rmin = {a: [(int(b), int(c)) for b, c in np.argwhere(M[a])] for a in range(self.k)}

    def extensions(self, lab, fixed=None):
        """Consistent one-node extensions of a consistent label matrix.

        ``fixed`` maps an existing node x to the label required on (x, new).
        Yields the new label matrices.
        """
        n = len(lab)
        R, hat = self.R, self.hat
        fixed = fixed or {}
        choices = []
        for x in range(n):
            if x in fixed:
                choices.append([fixed[x]])
            else:
                choices.append(range(self.k))
        for col in product(*choices):
            # triangles among old nodes x, y and the new node z
            ok = True
            for x in range(n):
                cx = col[x]
                for y in range(n):
                    lxy, cy = lab[x][y], col[y]
                    # R(l(x,y), l(x,z), l(z,y)) ; R(l(x,z), l(x,y), l(y,z)) ; R(l(z,y), l(z,x), l(x,y))
                    if not (R[lxy, cx, hat[cy]] and R[cx, lxy, cy] and R[hat[cy], hat[cx], lxy]):
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                continue
            for d in self.diag:
                # triangles with the new node twice
                good = True
                for x in range(n):
                    cx, hx = col[x], hat[col[x]]
                    if not (R[cx, cx, d] and R[cx, lab[x][x], cx] and R[hx, d, hx]
                            and R[hx, hx, lab[x][x]] and R[d, hx, cx] and R[lab[x][x], cx, hx]):
                        good = False
                        break
                if good:
                    yield tuple(
                        tuple(lab[x]) + (col[x],) for x in range(n)
                    ) + (tuple(hat[c] for c in col) + (d,),)


def _subsets(n, size):
    return list(combinations(range(n), size))


def _restrict(lab, nodes):
    return tuple(tuple(lab[x][y] for y in nodes) for x in nodes)


def solve_pebble_game(F: RelevanceFrame, n: int, max_nodes: int | None = None) -> GameVerdict:
    """Decide the n-pebble frame game by a greatest fixpoint.

    ∃'s networks have at most ``max_nodes`` nodes (default ``n``).  Before each
    witness demand ∀ keeps a sub-network of at most ``max_nodes - 1`` nodes; the
    rest is forgotten.  Positions are the canonical consistent networks ∀ can
    keep.  A position dies when some demand on it has no response whose kept
    parts are all alive.  ∃ wins iff every point labels an edge of a
    consistent network whose kept parts are alive.
    """
    if n < 2:
        raise ValueError("at least two pebbles are needed")
    size = n if max_nodes is None else max_nodes
    keep = size - 1
    fd = _FrameData(F)

    # positions: canonical consistent networks with 1..keep nodes
    positions = {}
    frontier = [()]
    for s in range(1, keep + 1):
        nxt = set()
        for lab in frontier:
            for ext in fd.extensions(lab):
                nxt.add(canonical_labels(ext))
        frontier = sorted(nxt)
        for lab in frontier:
            positions[lab] = s

    def kept_parts(lab):
        """Canonical sub-networks ∀ may keep from a response network."""
        m = len(lab)
        if m <= keep:
            return [canonical_labels(lab)]
        return sorted({canonical_labels(_restrict(lab, S)) for S in _subsets(m, keep)})

    # demands[pos] = list of (x, y, b, c, options); options = list of part lists
    demands = {}
    for pos in positions:
        m = len(pos)
        dl = []
        for x in range(m):
            for y in range(m):
                for b, c in fd.rmin[pos[x][y]]:
                    if any(pos[x][w] == b and pos[w][y] == c for w in range(m)):
                        continue  # an existing node answers; the position is unchanged
                    opts = []
                    for ext in fd.extensions(pos, {x: b}):
                        if ext[m][y] != c:
                            continue
                        opts.append(kept_parts(ext))
                    dl.append((x, y, b, c, opts))
        demands[pos] = dl

    alive = set(positions)
    death = {}
    rank = 0
    changed = True
    while changed:
        changed = False
        rank += 1
        dead_now = []
        for pos in sorted(alive):
            for dem in demands[pos]:
                if not any(all(p in alive for p in opt) for opt in dem[4]):
                    dead_now.append((pos, dem))
                    break
        for pos, dem in dead_now:
            alive.discard(pos)
            death[pos] = (rank, dem)
            changed = True

    # initial responses: a one-node network with diagonal a, or a two-node
    # network with an edge labelled a
    initial = {}
    for a in range(fd.k):
        opts = []
        if a in fd.diag:
            opts.append(((a,),))
        for d in fd.diag:
            for ext in fd.extensions(((d,),), {0: a}):
                opts.append(ext)
        initial[a] = opts

    def init_ok(lab):
        return all(p in alive for p in kept_parts(lab))

    stats = {"positions": len(positions), "alive": len(alive), "max_nodes": size}
    losing = [a for a in range(fd.k) if not any(init_ok(o) for o in initial[a])]
    if not losing:
        basis = [FrameNetwork(p) for p in sorted(alive)]
        return GameVerdict(EXISTS, basis, stats=stats)
    a = losing[0]
    transcript = _pebble_transcript(fd, a, initial[a], kept_parts, death, alive)
    return GameVerdict(FORALL, transcript, detail=f"point {F.names[a]}", stats=stats)


def _pebble_transcript(fd, a, init_opts, kept_parts, death, alive):
    """A ∀-winning play following the deletion ranks."""
    names = fd.F.names
    moves = [{"move": "init", "point": names[a]}]
    if not init_opts:
        moves.append({"move": "stuck", "reason": "no consistent network carries the point"})
        return moves
    lab = init_opts[0]
    moves[-1]["network"] = FrameNetwork(lab).to_json(names)
    pos = min((p for p in kept_parts(lab) if p not in alive), key=lambda p: death[p][0])
    for _ in range(64):
        moves.append({"move": "keep", "network": FrameNetwork(pos).to_json(names)})
        _, (x, y, b, c, opts) = death[pos]
        rec = {"move": "witness", "x": x, "y": y, "points": [names[b], names[c]]}
        if not opts:
            rec["result"] = "no consistent response"
            moves.append(rec)
            return moves
        # follow the response whose worst kept part died first
        best = min(opts, key=lambda o: min(death[p][0] for p in o if p not in alive))
        pos = min((p for p in best if p not in alive), key=lambda p: death[p][0])
        moves.append(rec)
    return moves


def replay_certificate(F: RelevanceFrame, verdict: GameVerdict, n: int, max_nodes=None) -> bool:
    """Re-check a pebble-game certificate independently of the solver."""
    size = n if max_nodes is None else max_nodes
    keep = size - 1
    fd = _FrameData(F)
    if verdict.winner != EXISTS:
        last = verdict.certificate[-1] if verdict.certificate else {}
        return last.get("result") == "no consistent response" or last.get("move") == "stuck"
    basis = {N.labels for N in verdict.certificate}
    for lab in basis:
        if not frame_consistent(FrameNetwork(lab), F) or len(lab) > keep:
            return False

    def parts(lab):
        m = len(lab)
        if m <= keep:
            return [canonical_labels(lab)]
        return [canonical_labels(_restrict(lab, S)) for S in _subsets(m, keep)]

    for lab in basis:
        m = len(lab)
        for x, y in product(range(m), repeat=2):
            for b, c in fd.rmin[lab[x][y]]:
                if any(lab[x][w] == b and lab[w][y] == c for w in range(m)):
                    continue
                if not any(
                    ext[m][y] == c and all(p in basis for p in parts(ext))
                    for ext in fd.extensions(lab, {x: b})
                ):
                    return False
    for a in range(fd.k):
        opts = [((a,),)] if a in fd.diag else []
        for d in fd.diag:
            opts.extend(fd.extensions(((d,),), {0: a}))
        if not any(all(p in basis for p in parts(o)) for o in opts):
            return False
    return True


class _Budget(Exception):
    pass


class _LiteralGame:
    """Memoised bounded-round frame game without forgetting nodes."""

    def __init__(self, fd: _FrameData, limit: int):
        self.fd = fd
        self.memo = {}
        self.budget = limit

    def wins(self, lab, r) -> bool:
        if r == 0:
            return True
        key = (canonical_labels(lab), r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.budget -= 1
        if self.budget < 0:
            raise _Budget()
        fd, m = self.fd, len(lab)
        result = True
        for x, y in product(range(m), repeat=2):
            for b, c in fd.rmin[lab[x][y]]:
                if any(lab[x][w] == b and lab[w][y] == c for w in range(m)):
                    continue
                if not any(ext[m][y] == c and self.wins(ext, r - 1)
                           for ext in fd.extensions(lab, {x: b})):
                    result = False
                    break
            if not result:
                break
        self.memo[key] = result
        return result


def _starts(fd: _FrameData, a: int):
    """∃'s possible answers to the initial point a."""
    opts = [((a,),)] if a in fd.diag else []
    for d in fd.diag:
        opts.extend(fd.extensions(((d,),), {0: a}))
    return opts


def literal_frame_game(F: RelevanceFrame, rounds: int, limit: int = 2_000_000) -> GameVerdict:
    """∃ must survive ``rounds`` witness moves; networks keep every node."""
    fd = _FrameData(F)
    game = _LiteralGame(fd, limit)
    try:
        for a in range(fd.k):
            if not any(game.wins(o, rounds) for o in _starts(fd, a)):
                return GameVerdict(FORALL, [{"move": "init", "point": F.names[a]}],
                                   detail=f"point {F.names[a]}")
    except _Budget:
        return GameVerdict(INCONCLUSIVE, detail="search limit reached")
    return GameVerdict(EXISTS, stats={"memo": len(game.memo)})


# ================================================================ algebras


@dataclass(frozen=True)
class TermNetwork:
    """Nodes 0..n-1; ``labels[x][y]`` is a frozenset of element indices."""

    labels: tuple

    @classmethod
    def of(cls, labels):
        return cls(tuple(tuple(frozenset(int(v) for v in cell) for cell in row) for row in labels))

    @property
    def size(self):
        return len(self.labels)

    def well_formed(self, A: FiniteAlgebra) -> bool:
        n = self.size
        return all(
            A.top in self.labels[x][y] and (x != y or A.one in self.labels[x][x])
            for x in range(n) for y in range(n)
        )

    def to_json(self, A=None):
        def show(cell):
            return sorted(A.names[v] for v in cell) if A is not None else sorted(cell)
        return [[show(cell) for cell in row] for row in self.labels]


def term_consistent(N: TermNetwork, A: FiniteAlgebra) -> bool:
    """No t in the label of (x, y) has ~t in the label of (y, x)."""
    neg = A.neg
    for x in range(N.size):
        for y in range(N.size):
            back = {int(neg[t]) for t in N.labels[y][x]}
            if N.labels[x][y] & back:
                return False
    return True


def initial_networks(A: FiniteAlgebra, a: int, b: int):
    """The one-node and two-node networks answering the pair a, b."""
    top, one, nb = A.top, A.one, int(A.neg[b])
    n1 = TermNetwork.of([[{top, one, a, nb}]])
    n2 = TermNetwork.of([[{top, one}, {top, a}], [{top, nb}, {top, one}]])
    return n1, n2


# Ground networks inside the search are tuples of bitmask rows.

def _to_masks(N: TermNetwork):
    return tuple(tuple(sum(1 << v for v in cell) for cell in row) for row in N.labels)


def _from_masks(lab):
    return TermNetwork(tuple(
        tuple(frozenset(i for i in range(mask.bit_length()) if mask >> i & 1) for mask in row)
        for row in lab
    ))


def _plus(lab, x, y, t, top, one):
    """Add element t to (x, y); y == len(lab) adds a fresh node first."""
    n = len(lab)
    if y == n:
        rows = [list(row) + [1 << top] for row in lab]
        rows.append([1 << top] * n + [(1 << top) | (1 << one)])
    else:
        rows = [list(row) for row in lab]
    rows[x][y] |= 1 << t
    return tuple(tuple(r) for r in rows)


def _canon_masks(lab):
    n = len(lab)
    if n <= 1:
        return lab
    sig = [
        (lab[x][x], tuple(sorted(lab[x][y] for y in range(n) if y != x)),
         tuple(sorted(lab[y][x] for y in range(n) if y != x)))
        for x in range(n)
    ]
    groups = sorted(set(sig))
    blocks = [[x for x in range(n) if sig[x] == g] for g in groups]
    best = None
    for choice in product(*(permutations(b) for b in blocks)):
        p = [x for block in choice for x in block]
        cand = tuple(tuple(lab[p[i]][p[j]] for j in range(n)) for i in range(n))
        if best is None or cand < best:
            best = cand
    return best


class _Gamma:
    """Memoised alternating search of the conservative bounded-round game."""

    def __init__(self, A: FiniteAlgebra, limit: int, shortcut: bool):
        self.A = A
        self.m = A.m
        self.limit = limit
        self.nodes = 0
        self.memo = {}
        self.move_of = {}
        J, C = A.join_table, A.comp
        self.top, self.one = A.top, A.one
        self.neg = [int(v) for v in A.neg]
        self.leq = A.leq
        m = A.m
        # pairs (a, b), a <= b, with t <= a + b
        self.join_pairs = [
            [(a, b) for a in range(m) for b in range(a, m) if A.leq[t, J[a, b]]] for t in range(m)
        ]
        self.factors = [[(a, b) for a in range(m) for b in range(m) if C[a, b] == t] for t in range(m)]
        self.comp = [[int(C[a, b]) for b in range(m)] for a in range(m)]
        self.shortcut = None
        if shortcut:
            from .frame import algebra_to_frame

            F = algebra_to_frame(A)
            self.fd = _FrameData(F)
            self.lit = _LiteralGame(self.fd, limit)
            self.ji = list(A.irreducibles)
            self.shortcut = True

    # -- consistency --------------------------------------------------------
    def consistent(self, lab):
        n, neg = len(lab), self.neg
        for x in range(n):
            for y in range(n):
                fwd, back = lab[x][y], lab[y][x]
                t = back
                while t:
                    low = t & -t
                    if fwd >> neg[low.bit_length() - 1] & 1:
                        return False
                    t ^= low
        return True

    # -- moves --------------------------------------------------------------
    def moves(self, lab):
        """Yield (record, responses) for ∀'s non-null moves."""
        n, top, one, neg = len(lab), self.top, self.one, self.neg
        elems = lambda mask: [i for i in range(self.m) if mask >> i & 1]
        seen = set()
        # composition: a forced answer
        for x, y, z in product(range(n), repeat=3):
            for t in elems(lab[x][y]):
                for u in elems(lab[y][z]):
                    c = self.comp[t][u]
                    if lab[x][z] >> c & 1:
                        continue
                    new = _plus(lab, x, z, c, top, one)
                    if new in seen:
                        continue
                    seen.add(new)
                    yield ({"move": "composition", "x": x, "y": y, "z": z, "a": t, "b": u}, [new])
        # involution
        for x, y in product(range(n), repeat=2):
            for a in range(self.m):
                if lab[x][y] >> a & 1 or lab[y][x] >> neg[a] & 1:
                    continue
                yield ({"move": "involution", "x": x, "y": y, "a": a},
                       [_plus(lab, x, y, a, top, one), _plus(lab, y, x, neg[a], top, one)])
        # witness
        for x, y in product(range(n), repeat=2):
            for t in elems(lab[x][y]):
                for a, b in self.factors[t]:
                    if any(lab[x][z] >> a & 1 and lab[z][y] >> b & 1 for z in range(n)):
                        continue
                    resp = []
                    for z in range(n + 1):
                        first = _plus(lab, x, z, a, top, one)
                        resp.append(_plus(first, z, y, b, top, one))
                    yield ({"move": "witness", "x": x, "y": y, "t": t, "a": a, "b": b}, resp)
        # join
        for x, y in product(range(n), repeat=2):
            for t in elems(lab[x][y]):
                for a, b in self.join_pairs[t]:
                    if lab[x][y] >> a & 1 or lab[x][y] >> b & 1:
                        continue
                    yield ({"move": "join", "x": x, "y": y, "t": t, "a": a, "b": b},
                           [_plus(lab, x, y, a, top, one), _plus(lab, x, y, b, top, one)])

    # -- ∃ shortcut ------------------------------------------------------------
    def frame_labellings(self, lab):
        """Consistent frame networks p with p(x,y) below every label of (x,y)."""
        fd, n = self.fd, len(lab)
        leq = self.leq
        allowed = [[
            [p for p, e in enumerate(self.ji)
             if all(leq[e, t] for t in range(self.m) if lab[x][y] >> t & 1)]
            for y in range(n)] for x in range(n)]

        def grow(cur, j):
            if j == n:
                yield cur
                return
            for ext in fd.extensions(cur):
                if all(ext[x][j] in allowed[x][j] and ext[j][x] in allowed[j][x] for x in range(j + 1)):
                    yield from grow(ext, j + 1)

        yield from grow((), 0)

    def frame_wins(self, lab, r):
        for p in self.frame_labellings(lab):
            if self.lit.wins(p, r):
                return True
        return False

    # -- search -------------------------------------------------------------
    def wins(self, lab, r):
        if r == 0:
            return self.consistent(lab)
        key = (_canon_masks(lab), r)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.nodes += 1
        if self.nodes > self.limit:
            raise _Budget()
        if not self.consistent(lab):
            self.memo[key] = False
            return False
        if self.shortcut and self.frame_wins(lab, r):
            self.memo[key] = True
            return True
        result = self.wins(lab, r - 1)
        if not result:
            self.move_of[key] = None  # ∀ simply waits
        else:
            for rec, responses in self.moves(lab):
                if not any(self.wins(resp, r - 1) for resp in responses):
                    result = False
                    self.move_of[key] = (rec, responses)
                    break
        self.memo[key] = result
        return result


def decide_gamma(A: FiniteAlgebra, rounds: int, limit: int = 200_000,
                 shortcut: bool = True) -> GameVerdict:
    """Decide the conservative ``rounds``-round representation game.

    ∃ wins iff for every pair a, b with a not below b one of the two initial
    networks survives ``rounds`` further moves.  With ``shortcut`` a network
    is also accepted when some consistent frame labelling below its labels
    survives the literal frame game for the remaining rounds; ∃ can copy that
    strategy move by move.  Exceeding ``limit`` search nodes gives an
    inconclusive verdict.
    """
    g = _Gamma(A, limit, shortcut)
    cert = []
    try:
        for a in range(A.m):
            for b in range(A.m):
                if A.leq[a, b]:
                    continue
                n1, n2 = (_to_masks(N) for N in initial_networks(A, a, b))
                if g.wins(n1, rounds):
                    cert.append({"pair": [A.names[a], A.names[b]], "network": "one-node"})
                elif g.wins(n2, rounds):
                    cert.append({"pair": [A.names[a], A.names[b]], "network": "two-node"})
                else:
                    transcript = _gamma_transcript(g, A, a, b, (n1, n2), rounds)
                    return GameVerdict(FORALL, transcript,
                                       detail=f"pair {A.names[a]}, {A.names[b]}",
                                       stats={"nodes": g.nodes})
    except _Budget:
        return GameVerdict(INCONCLUSIVE, detail=f"search limit of {limit} nodes reached",
                           stats={"nodes": g.nodes})
    return GameVerdict(EXISTS, cert, stats={"nodes": g.nodes})


def _gamma_transcript(g, A, a, b, starts, rounds):
    """One play lost by ∃: she takes the first answer at every step."""
    start = starts[0] if g.consistent(starts[0]) or not g.consistent(starts[1]) else starts[1]
    moves = [{"move": "init", "a": A.names[a], "b": A.names[b],
              "network": _from_masks(start).to_json(A)}]
    lab, r = start, rounds
    while r > 0:
        key = (_canon_masks(lab), r)
        if key not in g.move_of:
            if not g.consistent(lab):
                break
            g.wins(lab, r)  # fills move_of for this node
        entry = g.move_of.get(key)
        if entry is None:
            r -= 1
            continue
        rec, responses = entry
        lab = responses[0]
        out = {k: (A.names[v] if k in ("a", "b", "t") else v) for k, v in rec.items()}
        out["network"] = _from_masks(lab).to_json(A)
        moves.append(out)
        r -= 1
    moves.append({"move": "end", "consistent": g.consistent(lab)})
    return moves


def replay_gamma_transcript(A: FiniteAlgebra, transcript) -> bool:
    """Check that each move is legal, each answer is allowed, and the play ends
    in an inconsistent network."""
    if not transcript or transcript[0].get("move") != "init":
        return False
    idx = {n: i for i, n in enumerate(A.names)}
    a, b = idx[transcript[0]["a"]], idx[transcript[0]["b"]]
    if A.leq[a, b]:
        return False
    N = TermNetwork.of([[{idx[v] for v in cell} for cell in row] for row in transcript[0]["network"]])
    n1, n2 = initial_networks(A, a, b)
    if N not in (n1, n2):
        return False
    lab = _to_masks(N)
    g = _Gamma(A, 10**9, shortcut=False)
    for rec in transcript[1:]:
        if rec["move"] == "end":
            return not g.consistent(lab)
        after = _to_masks(TermNetwork.of(
            [[{idx[v] for v in cell} for cell in row] for row in rec["network"]]))
        legal = False
        for mv, responses in g.moves(lab):
            if mv["move"] != rec["move"]:
                continue
            if all(mv[k] == (idx[rec[k]] if k in ("a", "b", "t") else rec[k])
                   for k in mv if k != "move"):
                legal = after in responses
                break
        if not legal:
            return False
        lab = after
    return False


# ================================================================ sentences


class SigmaTooLarge(ValueError):
    pass


class _Emitter:
    def __init__(self, limit):
        self.limit = limit
        self.size = 0
        self.count = 0

    def fresh(self):
        self.count += 1
        return Var(f"v{self.count}")

    def charge(self, f):
        self.size += formula_size(f)
        if self.size > self.limit:
            raise SigmaTooLarge(f"formula exceeds {self.limit} symbols")
        return f


def _tplus(lab, x, y, t):
    """Term-network version of adding t to (x, y); y == n adds a node."""
    n = len(lab)
    top, one = Const("top"), Const("1")
    if y == n:
        rows = [[list(c) for c in row] + [[top]] for row in lab]
        rows.append([[top] for _ in range(n)] + [[one, top]])
    else:
        rows = [[list(c) for c in row] for row in lab]
    if t not in rows[x][y]:
        rows[x][y].append(t)
    return tuple(tuple(tuple(c) for c in row) for row in rows)


def _phi(lab, n, em):
    size = len(lab)
    pairs = list(product(range(size), repeat=2))
    if n == 0:
        return em.charge(conj(*(
            Rel("!=", t, neg(u)) for x, y in pairs for t in lab[x][y] for u in lab[y][x]
        )))
    parts = []
    for x, y in pairs:
        for t in lab[x][y]:
            a, b = em.fresh(), em.fresh()
            body = disj(_phi(_tplus(lab, x, y, a), n - 1, em), _phi(_tplus(lab, x, y, b), n - 1, em))
            parts.append(Quant("forall", (a.name, b.name), Conn("->", (Rel("<=", t, join(a, b)), body))))
    for x, y in pairs:
        a = em.fresh()
        body = disj(_phi(_tplus(lab, x, y, a), n - 1, em), _phi(_tplus(lab, y, x, neg(a)), n - 1, em))
        parts.append(Quant("forall", (a.name,), body))
    for x, y, z in product(range(size), repeat=3):
        for t in lab[x][y]:
            for u in lab[y][z]:
                parts.append(_phi(_tplus(lab, x, z, comp(t, u)), n - 1, em))
    for x, y in pairs:
        for t in lab[x][y]:
            a, b = em.fresh(), em.fresh()
            options = []
            for z in range(size + 1):
                options.append(_phi(_tplus(_tplus(lab, x, z, a), z, y, b), n - 1, em))
            parts.append(Quant("forall", (a.name, b.name),
                               Conn("->", (Rel("=", t, comp(a, b)), disj(*options)))))
    return conj(*parts)


def sigma(n: int, limit: int = 200_000):
    """The sentence saying that ∃ survives ``n`` rounds, as a formula tree.

    Labels are kept as terms; the involution conjunct is emitted once per
    node pair since its body does not mention the chosen label.
    """
    em = _Emitter(limit)
    a, b = Var("a"), Var("b")
    top, one = Const("top"), Const("1")
    n1 = (((top, one, a, neg(b)),),)
    n2 = (((top, one), (top, a)), ((top, neg(b)), (top, one)))
    body = disj(_phi(n1, n, em), _phi(n2, n, em))
    return Quant("forall", ("a", "b"), Conn("->", (Rel("!<=", a, b), body)))


def emit_sigma(n: int, limit: int = 200_000) -> str:
    return show(sigma(n, limit))
