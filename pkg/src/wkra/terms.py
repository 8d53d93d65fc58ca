"""A small term and formula language over the signature (+, ., ;, ~, bot, top, 1, 0).

Used to state the quasiequations checked by :mod:`wkra.axioms` and to emit
and re-read the game formulas of :mod:`wkra.games`.

Concrete syntax (loosest to tightest)::

    formula  :=  'forall' VAR+ '.' formula  |  'exists' VAR+ '.' formula
              |  disj ['->' formula]
    disj     :=  conj ('|' conj)*
    conj     :=  lit ('&' lit)*
    lit      :=  '!' lit  |  'true' | 'false'  |  term REL term  |  '(' formula ')'
    REL      :=  '<=' | '!<=' | '=' | '!='
    term     :=  prod ('+' prod)*
    prod     :=  comp ('.' comp)*
    comp     :=  neg (';' neg)*
    neg      :=  '~' neg  |  VAR  |  'bot' | 'top' | '1' | '0'  |  '(' term ')'
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

# ------------------------------------------------------------------ AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str  # bot, top, 1, 0


@dataclass(frozen=True)
class Op:
    op: str  # '+', '.', ';', '~'
    args: tuple


@dataclass(frozen=True)
class Rel:
    rel: str  # '<=', '!<=', '=', '!='
    left: object
    right: object


@dataclass(frozen=True)
class Conn:
    conn: str  # '&', '|', '->', '!'
    args: tuple


@dataclass(frozen=True)
class Quant:
    q: str  # 'forall', 'exists'
    vars: tuple
    body: object


TRUE = Conn("&", ())
FALSE = Conn("|", ())


def join(*ts):
    return ts[0] if len(ts) == 1 else Op("+", tuple(ts))


def meet(*ts):
    return ts[0] if len(ts) == 1 else Op(".", tuple(ts))


def comp(s, t):
    return Op(";", (s, t))


def neg(s):
    return Op("~", (s,))


def conj(*fs):
    fs = tuple(f for f in fs if f != TRUE)
    if any(f == FALSE for f in fs):
        return FALSE
    return fs[0] if len(fs) == 1 else Conn("&", fs)


def disj(*fs):
    fs = tuple(f for f in fs if f != FALSE)
    if any(f == TRUE for f in fs):
        return TRUE
    return fs[0] if len(fs) == 1 else Conn("|", fs)


# --------------------------------------------------------------- printer

_TERM_PREC = {"+": 1, ".": 2, ";": 3, "~": 4}


def show_term(t, parent=0) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return t.name
    prec = _TERM_PREC[t.op]
    if t.op == "~":
        s = "~" + show_term(t.args[0], prec)
    else:
        # children of the same binary operator are bracketed except the first,
        # which fixes left association on re-parse
        parts = [show_term(t.args[0], prec)]
        parts += [show_term(a, prec + 0.5) for a in t.args[1:]]
        s = t.op.join(parts)
    return f"({s})" if prec < parent else s


def show(f, parent=0) -> str:
    if isinstance(f, Rel):
        return f"{show_term(f.left)} {f.rel} {show_term(f.right)}"
    if isinstance(f, Quant):
        s = f"{f.q} {' '.join(f.vars)}. {show(f.body)}"
        return f"({s})" if parent > 0 else s
    if f == TRUE:
        return "true"
    if f == FALSE:
        return "false"
    c = f.conn
    if c == "!":
        return "!" + show(f.args[0], 4)
    prec = {"->": 1, "|": 2, "&": 3}[c]
    sep = {"->": " -> ", "|": " | ", "&": " & "}[c]
    s = sep.join(show(a, prec + 1 if (c == "->" and i == 0) or c != "->" else prec)
                 for i, a in enumerate(f.args))
    return f"({s})" if prec < parent or (c == "->" and parent > 0) else s


# ---------------------------------------------------------------- parser

_TOKEN = re.compile(
    r"\s*(?:(forall|exists|true|false|bot|top)\b|(!<=|<=|!=|->|[()+.;~=!&|])|([A-Za-z_][A-Za-z0-9_']*)|([01])\b)"
)


class ParseError(ValueError):
    pass


def _tokens(text):
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {text[pos:pos + 20]!r}")
        kw, sym, ident, digit = mt.groups()
        if kw:
            out.append(("kw", kw))
        elif sym:
            out.append(("sym", sym))
        elif ident:
            out.append(("var", ident))
        else:
            out.append(("kw", digit))
        pos = mt.end()
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.peek()
        if tok[0] is None or (value is not None and tok[1] != value):
            raise ParseError(f"expected {value!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def formula(self):
        kind, val = self.peek()
        if val in ("forall", "exists"):
            self.take()
            names = []
            while self.peek()[0] == "var":
                names.append(self.take()[1])
            if not names:
                raise ParseError(f"{val} needs at least one variable")
            self.take(".")
            return Quant(val, tuple(names), self.formula())
        left = self.disj()
        if self.peek()[1] == "->":
            self.take()
            return Conn("->", (left, self.formula()))
        return left

    def disj(self):
        parts = [self.conj()]
        while self.peek()[1] == "|":
            self.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Conn("|", tuple(parts))

    def conj(self):
        parts = [self.lit()]
        while self.peek()[1] == "&":
            self.take()
            parts.append(self.lit())
        return parts[0] if len(parts) == 1 else Conn("&", tuple(parts))

    def lit(self):
        kind, val = self.peek()
        if val == "!":
            self.take()
            return Conn("!", (self.lit(),))
        if val == "true":
            self.take()
            return TRUE
        if val == "false":
            self.take()
            return FALSE
        if val == "(":
            save = self.i
            try:
                self.take("(")
                f = self.formula()
                self.take(")")
                if self.peek()[1] in ("<=", "!<=", "=", "!=", "+", ".", ";"):
                    raise ParseError("parenthesised term")
                return f
            except ParseError:
                self.i = save
        left = self.term()
        rel = self.take()[1]
        if rel not in ("<=", "!<=", "=", "!="):
            raise ParseError(f"expected a relation, got {rel!r}")
        return Rel(rel, left, self.term())

    def term(self):
        parts = [self.prod()]
        while self.peek()[1] == "+":
            self.take()
            parts.append(self.prod())
        return _left_assoc("+", parts)

    def prod(self):
        parts = [self.comp()]
        while self.peek()[1] == ".":
            self.take()
            parts.append(self.comp())
        return _left_assoc(".", parts)

    def comp(self):
        parts = [self.neg()]
        while self.peek()[1] == ";":
            self.take()
            parts.append(self.neg())
        return _left_assoc(";", parts)

    def neg(self):
        kind, val = self.peek()
        if val == "~":
            self.take()
            return Op("~", (self.neg(),))
        if val == "(":
            self.take()
            t = self.term()
            self.take(")")
            return t
        if kind == "var":
            self.take()
            return Var(val)
        if val in ("bot", "top", "1", "0"):
            self.take()
            return Const(val)
        raise ParseError(f"unexpected token {val!r}")


def _left_assoc(op, parts):
    t = parts[0]
    for p in parts[1:]:
        t = Op(op, (t, p))
    return t


def parse_formula(text):
    p = _Parser(text)
    f = p.formula()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input: {p.toks[p.i:]}")
    return f


def parse_term(text):
    p = _Parser(text)
    t = p.term()
    if p.i != len(p.toks):
        raise ParseError(f"trailing input: {p.toks[p.i:]}")
    return t


def normalize(f):
    """Flatten nested n-ary operators so printed-and-parsed formulas compare equal."""
    if isinstance(f, (Var, Const)):
        return f
    if isinstance(f, Op):
        args = tuple(normalize(a) for a in f.args)
        return Op(f.op, args)
    if isinstance(f, Rel):
        return Rel(f.rel, normalize(f.left), normalize(f.right))
    if isinstance(f, Quant):
        return Quant(f.q, f.vars, normalize(f.body))
    args = tuple(normalize(a) for a in f.args)
    if f.conn in ("&", "|"):
        flat = []
        for a in args:
            if isinstance(a, Conn) and a.conn == f.conn:
                flat.extend(a.args)
            else:
                flat.append(a)
        return Conn(f.conn, tuple(flat))
    return Conn(f.conn, args)


def _binarize(t):
    """n-ary term operators to left-nested binary ones."""
    if isinstance(t, (Var, Const)):
        return t
    args = [_binarize(a) for a in t.args]
    if t.op == "~":
        return Op("~", tuple(args))
    return _left_assoc(t.op, args)


def canonical(f):
    """Normal form used to compare a formula with its re-parsed printout."""
    if isinstance(f, (Var, Const, Op)):
        return _binarize(f)
    if isinstance(f, Rel):
        return Rel(f.rel, _binarize(f.left), _binarize(f.right))
    if isinstance(f, Quant):
        return Quant(f.q, f.vars, canonical(f.body))
    return normalize(Conn(f.conn, tuple(canonical(a) for a in f.args)))


# ------------------------------------------------------------ evaluation


def term_vars(t, acc=None):
    acc = [] if acc is None else acc
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    elif isinstance(t, Op):
        for a in t.args:
            term_vars(a, acc)
    elif isinstance(t, Rel):
        term_vars(t.left, acc)
        term_vars(t.right, acc)
    elif isinstance(t, Conn):
        for a in t.args:
            term_vars(a, acc)
    elif isinstance(t, Quant):
        inner = term_vars(t.body, [])
        acc.extend(v for v in inner if v not in t.vars and v not in acc)
    return acc


def _const(A, name):
    return {"bot": A.bot, "top": A.top, "1": A.one, "0": A.zero}[name]


def eval_term(A, t, env):
    """Evaluate a term; env values may be ints or broadcastable int arrays."""
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return _const(A, t.name)
    vals = [eval_term(A, a, env) for a in t.args]
    if t.op == "~":
        return A.neg[vals[0]]
    table = {"+": A.join_table, ".": A.meet_table, ";": A.comp}[t.op]
    out = vals[0]
    for v in vals[1:]:
        out = table[out, v]
    return out


def eval_qf(A, f, env):
    """Vectorised evaluation of a quantifier-free formula."""
    if isinstance(f, Rel):
        x, y = eval_term(A, f.left, env), eval_term(A, f.right, env)
        if f.rel == "<=":
            return A.leq[x, y]
        if f.rel == "!<=":
            return ~A.leq[x, y]
        if f.rel == "=":
            return np.equal(x, y)
        return np.not_equal(x, y)
    if isinstance(f, Quant):
        raise ValueError("quantifier in a quantifier-free position")
    if f.conn == "!":
        return ~eval_qf(A, f.args[0], env)
    if f.conn == "->":
        return ~eval_qf(A, f.args[0], env) | eval_qf(A, f.args[1], env)
    vals = [eval_qf(A, a, env) for a in f.args]
    if f.conn == "&":
        out = np.bool_(True)
        for v in vals:
            out = out & v
        return out
    out = np.bool_(False)
    for v in vals:
        out = out | v
    return out


def axes_env(variables, m):
    """One broadcast axis per variable, in the given order."""
    k = len(variables)
    env = {}
    for i, v in enumerate(variables):
        shape = [1] * k
        shape[i] = m
        env[v] = np.arange(m).reshape(shape)
    return env


def holds(A, f, env=None) -> bool:
    """Brute-force truth value of a closed formula (quantifiers by enumeration)."""
    env = {} if env is None else dict(env)
    if isinstance(f, Quant):
        inner = f.body
        # evaluate the block of variables together when the body is
        # quantifier free; otherwise recurse one assignment at a time
        if _quantifier_free(inner):
            sub = axes_env(f.vars, A.m)
            vals = eval_qf(A, inner, {**env, **sub})
            vals = np.broadcast_to(vals, (A.m,) * len(f.vars))
            return bool(vals.all() if f.q == "forall" else vals.any())
        from itertools import product

        results = (
            holds(A, inner, {**env, **dict(zip(f.vars, vals))})
            for vals in product(range(A.m), repeat=len(f.vars))
        )
        return all(results) if f.q == "forall" else any(results)
    if isinstance(f, Rel):
        return bool(eval_qf(A, f, env))
    if f.conn == "!":
        return not holds(A, f.args[0], env)
    if f.conn == "->":
        return (not holds(A, f.args[0], env)) or holds(A, f.args[1], env)
    if f.conn == "&":
        return all(holds(A, a, env) for a in f.args)
    return any(holds(A, a, env) for a in f.args)


def _quantifier_free(f):
    if isinstance(f, Quant):
        return False
    if isinstance(f, Conn):
        return all(_quantifier_free(a) for a in f.args)
    return True


def formula_size(f) -> int:
    if isinstance(f, (Var, Const)):
        return 1
    if isinstance(f, Op):
        return 1 + sum(formula_size(a) for a in f.args)
    if isinstance(f, Rel):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, Quant):
        return 1 + formula_size(f.body)
    return 1 + sum(formula_size(a) for a in f.args)
