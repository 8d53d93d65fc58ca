"""Quasiequational theories, frame conditions and related identities.

Every check is exhaustive.  Algebra-level items are evaluated with numpy
broadcasting (one array axis per free variable); frame-level items index the
point relations directly.  Witnesses are the lexicographically least
violating assignment, variables ordered as listed for each item.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteAlgebra, _first, validate_algebra
from .frame import RelevanceFrame
from .report import AxiomReport
from .terms import axes_env, eval_qf, parse_formula, term_vars

# (label, formula text).  Implications are written with '->'.
PHI2_ITEMS = (
    ("phi2-1", "s.~s <= 0"),
    ("phi2-2=>", "s <= t -> (s;~t).1 <= 0"),
    ("phi2-2<=", "(s;~t).1 <= 0 -> s <= t"),
    ("phi2-3", "s <= t;u & s;t <= ~u -> s.1 <= 0"),
    ("phi2-4", "s <= t;u & u;s <= ~t -> s.1 <= 0"),
    ("phi2-5", "s <= t;u & (s.1.(t;v)) + (1.s.(~v;u)) <= 0 -> s.1 <= 0"),
)

PHI3_EXTRA = (
    ("phi3-1", "s;t <= ~u -> t;u <= ~s"),
    ("phi3-2", "s.(t;u) <= ((s;v).t);u + t;(u.~v)"),
    ("phi3-3", "1.(~s';s).(t;~t') <= 0 -> s;t <= (s.s');t + s;(t.t')"),
    ("phi3-4", "1.s.0 = bot -> (s.1);(t;u) <= ((s.1);t);u"),
    ("phi3-5", "1.u.0 = bot -> (s;t);(u.1) <= s;(t;(u.1))"),
)

PHI3_ITEMS = PHI2_ITEMS + PHI3_EXTRA

ASSOCIATIVITY = ("assoc", "(s;t);u = s;(t;u)")

_PARSED: dict[str, object] = {}


def _parsed(text):
    if text not in _PARSED:
        _PARSED[text] = parse_formula(text)
    return _PARSED[text]


def check_quasiequation(A: FiniteAlgebra, text: str, variables=None):
    """Return the least violating assignment of ``text`` in ``A``, or None."""
    f = _parsed(text)
    variables = list(variables or term_vars(f))
    truth = eval_qf(A, f, axes_env(variables, A.m))
    truth = np.broadcast_to(truth, (A.m,) * len(variables))
    w = _first(~truth)
    return None if w is None else dict(zip(variables, w))


def _check_items(A, items, subject):
    rep = AxiomReport(subject=subject, names=A.names)
    for label, text in items:
        w = check_quasiequation(A, text)
        rep.add(label, w is None, w, text)
    return rep


def check_phi2(A: FiniteAlgebra) -> AxiomReport:
    return _check_items(A, PHI2_ITEMS, f"phi2 {A.name}".strip())


def check_phi3(A: FiniteAlgebra) -> AxiomReport:
    return _check_items(A, PHI3_ITEMS, f"phi3 {A.name}".strip())


def check_associativity(A: FiniteAlgebra) -> AxiomReport:
    return _check_items(A, (ASSOCIATIVITY,), f"associativity {A.name}".strip())


def check_diagonal(A: FiniteAlgebra) -> bool:
    """1.0 = bot."""
    return A.meet(A.one, A.zero) == A.bot


def check_top_simple(A: FiniteAlgebra) -> bool:
    """top;s;top is top for every s != bot (and bot for s = bot)."""
    C = A.comp
    t = C[C[A.top, np.arange(A.m)], A.top]
    expect = np.full(A.m, A.top)
    expect[A.bot] = A.bot
    return bool((t == expect).all())


# ------------------------------------------------------- frame conditions


def r_min_batch(leq, R):
    """Componentwise-minimal triples for a stack of relations ``R[n, a, b, c]``."""
    le = np.asarray(leq, dtype=np.int64)
    below = np.einsum("nxyz,yb,zc->nxbc", R.astype(np.int64), le, le, optimize=True)
    return R & (below == 1)


def _frame_arrays(leq, hat, I, R):
    hat = np.asarray(hat)
    I = np.asarray(I, dtype=bool)
    fix = I & (hat == np.arange(len(hat)))  # I(d) and d = hat(d)
    return hat, fix, R, r_min_batch(leq, R)


# Each generator yields (label, variables, bad[n, ...], text) for a stack of
# relations sharing order, hat and I.

def _conds2(leq, hat, I, R):
    hat, fix, R, Rm = _frame_arrays(leq, hat, I, R)
    ar = np.arange(len(hat))
    # R[n, b, a, hat a] indexed (n, b, a)
    Rba = R[:, :, ar, hat]
    yield "fc2-1", ("a",), ~(fix[None, :, None] & Rba).any(axis=1), \
        "forall a exists b: I(b) & b=^b & R(b,a,^a)"
    # premise P(a,b) = I(a) & ^a=a & R(a,b,^b)
    P = fix[None, :, None] & Rba
    yield "fc2-2", ("a", "b"), P & ~R[:, ar[None, :], ar[:, None], ar[None, :]], \
        "I(a) & ^a=a & R(a,b,^b) -> R(b,a,b)"
    yield "fc2-3", ("a", "b"), P & ~R[:, hat[None, :], hat[None, :], ar[:, None]], \
        "I(a) & ^a=a & R(a,b,^b) -> R(^b,^b,a)"
    bad = fix[None, :, None, None] & Rm & (ar[None, None, :, None] != hat[None, None, None, :])
    yield "fc2-4", ("a", "b", "c"), bad, "I(a) & ^a=a & Rmin(a,b,c) -> b=^c"


def _conds3(leq, hat, I, R):
    hat, fix, R, Rm = _frame_arrays(leq, hat, I, R)
    ar = np.arange(len(hat))
    a, b, c = ar[:, None, None], ar[None, :, None], ar[None, None, :]
    yield "fc3-1", ("a", "b", "c"), Rm & ~R[:, b, a, hat[c]], "Rmin(a,b,c) -> R(b,a,^c)"
    yield "fc3-2", ("a", "b", "c"), R[:, a, hat[b], hat[c]] & ~R[:, b, hat[c], hat[a]], \
        "R(a,^b,^c) -> R(b,^c,^a)"
    # E[n, b, c] = exists d: fix(d) & R(d,^b,b) & R(d,c,^c)
    E = (fix[None, :, None, None] & R[:, a, hat[ar][None, :, None], ar[None, :, None]]
         & R[:, a, ar[None, None, :], hat[ar][None, None, :]]).any(axis=1)
    yield "fc3-3", ("a", "b", "c"), Rm & ~E[:, None, :, :], \
        "Rmin(a,b,c) -> exists d: d=^d & I(d) & R(d,^b,b) & R(d,c,^c)"
    # axes (n, a, b, c, d)
    a4, b4, c4, d4 = (ar.reshape([-1 if i == j else 1 for j in range(4)]) for i in range(4))
    Rm4 = Rm[..., None]
    fixd = fix[d4][None]
    bad4 = fixd & R[:, a4, d4, a4] & Rm4 & ~R[:, b4, d4, b4]
    yield "fc3-4", ("a", "b", "c", "d"), bad4, \
        "d=^d & I(d) & R(a,d,a) & Rmin(a,b,c) -> R(b,d,b)"
    bad5 = fixd & R[:, a4, a4, d4] & Rm4 & ~R[:, c4, c4, d4]
    yield "fc3-5", ("a", "b", "c", "d"), bad5, \
        "d=^d & I(d) & R(a,a,d) & Rmin(a,b,c) -> R(c,c,d)"


def frame_conditions_batch(leq, hat, I, R, level=3, chunk=20_000):
    """Which frames of the stack ``R[n, a, b, c]`` meet the conditions
    (``level`` 2 or 3; level 3 includes level 2)."""
    R = np.asarray(R, dtype=bool)
    out = np.ones(len(R), dtype=bool)
    gens = (_conds2, _conds3) if level == 3 else (_conds2,)
    for lo in range(0, len(R), chunk):
        part = R[lo:lo + chunk]
        ok = out[lo:lo + chunk]
        for gen in gens:
            for _, _, bad, _ in gen(leq, hat, I, part):
                ok &= ~bad.reshape(len(part), -1).any(axis=1)
    return out


def _run_frame(F, gen, subject):
    names = list(F.names) if getattr(F, "names", None) is not None else None
    rep = AxiomReport(subject=subject, names=names)
    for label, variables, bad, text in gen(F.leq, F.hat, F.I, np.asarray(F.R, dtype=bool)[None]):
        w = _first(bad[0])
        rep.add(label, w is None, w and dict(zip(variables, w)), text)
    return rep


def check_frame_conditions_2(F: RelevanceFrame) -> AxiomReport:
    return _run_frame(F, _conds2, f"frame conditions 2 {F.name}".strip())


def check_frame_conditions_3(F: RelevanceFrame) -> AxiomReport:
    rep = check_frame_conditions_2(F)
    rep.subject = f"frame conditions 3 {F.name}".strip()
    return rep.extend(_run_frame(F, _conds3, ""))


# --------------------------------------------------------------- profiles


@dataclass(frozen=True)
class AxiomProfile:
    base: bool = True
    phi2: bool = False
    phi3: bool = False
    assoc: bool = False
    diagonal: bool = False

    def __post_init__(self):
        if self.phi3 and not self.phi2:
            object.__setattr__(self, "phi2", True)

    @classmethod
    def parse(cls, text: str) -> "AxiomProfile":
        """'base', 'wkra2', 'wkra3', 'assoc', 'diagonal', 'all', joined by '+'."""
        flags = {}
        for part in text.lower().split("+"):
            part = part.strip()
            if part == "base":
                pass
            elif part == "wkra2":
                flags["phi2"] = True
            elif part == "wkra3":
                flags["phi3"] = True
            elif part == "assoc":
                flags["assoc"] = True
            elif part == "diagonal":
                flags["diagonal"] = True
            elif part == "all":
                flags.update(phi3=True, assoc=True, diagonal=True)
            else:
                raise ValueError(f"unknown profile component {part!r}")
        return cls(**flags)

    def __str__(self):
        parts = ["wkra3" if self.phi3 else "wkra2" if self.phi2 else "base"]
        if self.assoc:
            parts.append("assoc")
        if self.diagonal:
            parts.append("diagonal")
        return "+".join(parts)


def check_profile(A: FiniteAlgebra, profile: AxiomProfile, base=True) -> AxiomReport:
    """All checks selected by ``profile``.  ``base=False`` skips revalidation."""
    rep = AxiomReport(subject=f"{profile} {A.name}".strip(), names=A.names)
    if base:
        v = validate_algebra(A)
        rep.extend(v)
        if not v.ok:
            return rep
    if profile.phi3:
        rep.extend(check_phi3(A))
    elif profile.phi2:
        rep.extend(check_phi2(A))
    if profile.assoc:
        rep.extend(check_associativity(A))
    if profile.diagonal:
        ok = check_diagonal(A)
        rep.add("diagonal", ok, None if ok else {}, "1.0 = bot")
    return rep


def satisfies(A: FiniteAlgebra, profile: AxiomProfile, base=True) -> bool:
    """Short-circuiting boolean version of :func:`check_profile`."""
    if base and not validate_algebra(A).ok:
        return False
    if profile.diagonal and not check_diagonal(A):
        return False
    if profile.assoc and check_quasiequation(A, ASSOCIATIVITY[1]) is not None:
        return False
    items = PHI3_ITEMS if profile.phi3 else PHI2_ITEMS if profile.phi2 else ()
    return all(check_quasiequation(A, text) is None for _, text in items)
