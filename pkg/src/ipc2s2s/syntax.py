"""Formulas of second-order intuitionistic propositional logic.

Concrete syntax (ASCII)::

    bot            falsity
    p, q1, x_y     propositions
    ~A             sugar for A -> bot
    A /\\ B         conjunction      (left associative)
    A \\/ B         disjunction      (left associative)
    A -> B         implication      (right associative)
    A <-> B        sugar for (A -> B) /\\ (B -> A), non-associative
    forall p. A    extends as far right as possible
    exists p. A

Precedence, tightest first: ``~``, ``/\\``, ``\\/``, ``->``, ``<->``.
Negation and bi-implication never appear in the tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

__all__ = [
    "Formula", "Bottom", "Var", "Implies", "And", "Or", "Forall", "Exists",
    "BOT", "TOP", "neg", "iff", "conj",
    "ParseError", "parse_formula", "format_formula", "dump_ast",
    "free_vars", "all_names", "fresh_name", "substitute", "alpha_key",
    "alpha_equiv", "desugar", "is_core", "is_quantifier_free", "size",
    "propositions_in_order", "is_identifier",
]

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
KEYWORDS = frozenset({"bot", "forall", "exists"})


def is_identifier(name: str) -> bool:
    return bool(_IDENT_RE.fullmatch(name)) and name not in KEYWORDS


class Formula:
    """Base class of the formula tree.  Instances are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self) -> str:
        return "Bottom"


@dataclass(frozen=True, repr=False)
class Var(Formula):
    name: str

    def __post_init__(self):
        if not is_identifier(self.name):
            raise ValueError(f"invalid proposition name {self.name!r}")

    def __repr__(self) -> str:
        return f"Var({self.name})"


@dataclass(frozen=True, repr=False)
class Implies(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Implies({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self) -> str:
        return f"Or({self.left!r}, {self.right!r})"


@dataclass(frozen=True, repr=False)
class Forall(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        if not is_identifier(self.var):
            raise ValueError(f"invalid binder name {self.var!r}")

    def __repr__(self) -> str:
        return f"Forall({self.var}, {self.body!r})"


@dataclass(frozen=True, repr=False)
class Exists(Formula):
    var: str
    body: Formula

    def __post_init__(self):
        if not is_identifier(self.var):
            raise ValueError(f"invalid binder name {self.var!r}")

    def __repr__(self) -> str:
        return f"Exists({self.var}, {self.body!r})"


BOT = Bottom()
TOP = Implies(BOT, BOT)

_BINARY = (Implies, And, Or)
_QUANT = (Forall, Exists)


def neg(phi: Formula) -> Formula:
    return Implies(phi, BOT)


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


def conj(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``bot -> bot``."""
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TOP if result is None else result


def dump_ast(phi: Formula) -> str:
    return repr(phi)


# ---------------------------------------------------------------------------
# Parsing

class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: Iterable[str] = ()):
        self.line = line
        self.column = column
        self.expected = tuple(sorted(set(expected)))
        detail = f"{line}:{column}: {message}"
        if self.expected:
            detail += "; expected one of: " + ", ".join(self.expected)
        super().__init__(detail)


_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op><->|->|/\\|\\/|~|\(|\)|\.)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
""", re.VERBOSE)

_EOF = "end of input"
_IDENT = "identifier"


@dataclass(frozen=True)
class _Token:
    kind: str       # operator text, keyword, _IDENT or _EOF
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind == "ident":
            kind = chunk if chunk in KEYWORDS else _IDENT
            tokens.append(_Token(kind, chunk, line, pos - line_start + 1))
        elif kind == "op":
            tokens.append(_Token(chunk, chunk, line, pos - line_start + 1))
        else:
            # whitespace: keep line accounting
            for i, ch in enumerate(chunk):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
        pos = m.end()
    tokens.append(_Token(_EOF, "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.expected: set[str] = set()

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def accept(self, kind: str) -> _Token | None:
        if self.tok.kind == kind:
            t = self.tok
            self.pos += 1
            self.expected = set()
            return t
        self.expected.add(kind)
        return None

    def expect(self, kind: str) -> _Token:
        t = self.accept(kind)
        if t is None:
            self.fail()
        return t

    def fail(self):
        t = self.tok
        what = "end of input" if t.kind == _EOF else f"token {t.text!r}"
        raise ParseError(f"unexpected {what}", t.line, t.column, self.expected)

    def parse(self) -> Formula:
        f = self.iff()
        self.expect(_EOF)
        return f

    def iff(self) -> Formula:
        left = self.impl()
        if self.accept("<->"):
            right = self.impl()
            return iff(left, right)
        return left

    def impl(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.accept("\\/"):
            left = Or(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.accept("/\\"):
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        if self.accept("~"):
            return neg(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        if self.accept("bot"):
            return BOT
        t = self.accept(_IDENT)
        if t is not None:
            return Var(t.text)
        if self.accept("("):
            f = self.iff()
            self.expect(")")
            return f
        for kw, cls in (("forall", Forall), ("exists", Exists)):
            if self.accept(kw):
                name = self.expect(_IDENT).text
                self.expect(".")
                return cls(name, self.iff())
        self.fail()


def parse_formula(text: str) -> Formula:
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC = {Implies: 1, Or: 2, And: 3}
_SYM = {Implies: "->", Or: "\\/", And: "/\\"}


def format_formula(phi: Formula) -> str:
    """Canonical text with minimal parentheses; ``parse_formula`` inverts it exactly."""
    return "".join(_fmt(phi, True))


def _prec(f: Formula) -> int:
    if isinstance(f, _BINARY):
        return _PREC[type(f)]
    if isinstance(f, _QUANT):
        return 0
    return 4


def _fmt(f: Formula, tail: bool) -> Iterator[str]:
    # `tail`: f runs to the end of the enclosing unparenthesized region,
    # so a quantifier may appear bare.
    if isinstance(f, Bottom):
        yield "bot"
    elif isinstance(f, Var):
        yield f.name
    elif isinstance(f, _QUANT):
        if not tail:
            yield "("
        yield "forall " if isinstance(f, Forall) else "exists "
        yield f.var
        yield ". "
        yield from _fmt(f.body, True)
        if not tail:
            yield ")"
    else:
        p = _PREC[type(f)]
        right_assoc = isinstance(f, Implies)
        lp, rp = _prec(f.left), _prec(f.right)
        wrap_l = lp < p or (lp == p and right_assoc)
        wrap_r = 0 < rp < p or (rp == p and not right_assoc)
        yield from _wrapped(f.left, wrap_l, False)
        yield f" {_SYM[type(f)]} "
        yield from _wrapped(f.right, wrap_r, tail)


def _wrapped(f: Formula, wrap: bool, tail: bool) -> Iterator[str]:
    if wrap:
        yield "("
        yield from _fmt(f, True)
        yield ")"
    else:
        yield from _fmt(f, tail)


# ---------------------------------------------------------------------------
# Variables and substitution

@lru_cache(maxsize=1 << 16)
def free_vars(phi: Formula) -> frozenset[str]:
    if isinstance(phi, Var):
        return frozenset((phi.name,))
    if isinstance(phi, Bottom):
        return frozenset()
    if isinstance(phi, _QUANT):
        return free_vars(phi.body) - {phi.var}
    return free_vars(phi.left) | free_vars(phi.right)


@lru_cache(maxsize=1 << 16)
def all_names(phi: Formula) -> frozenset[str]:
    """Every proposition name occurring in ``phi``, free or bound."""
    if isinstance(phi, Var):
        return frozenset((phi.name,))
    if isinstance(phi, Bottom):
        return frozenset()
    if isinstance(phi, _QUANT):
        return all_names(phi.body) | {phi.var}
    return all_names(phi.left) | all_names(phi.right)


def fresh_name(base: str, avoid: Iterable[str], start: int = 1) -> str:
    """``base`` with trailing digits replaced by the smallest unused suffix >= start."""
    avoid = set(avoid)
    stem = base.rstrip("0123456789") or base
    i = start
    while f"{stem}{i}" in avoid:
        i += 1
    return f"{stem}{i}"


def substitute(phi: Formula, p: str, psi: Formula) -> Formula:
    """Capture-avoiding ``phi[p := psi]``."""
    fv_psi = free_vars(psi)

    def go(f: Formula) -> Formula:
        if isinstance(f, Var):
            return psi if f.name == p else f
        if isinstance(f, Bottom):
            return f
        if isinstance(f, _QUANT):
            if f.var == p or p not in free_vars(f.body):
                return f
            var, body = f.var, f.body
            if var in fv_psi:
                new = fresh_name(var, fv_psi | free_vars(body) | {p})
                body = substitute(body, var, Var(new))
                var = new
            return type(f)(var, go(body))
        return type(f)(go(f.left), go(f.right))

    return go(phi)


def alpha_key(phi: Formula, _env: tuple[str, ...] = ()) -> tuple:
    """Nameless, hashable normal form: equal keys iff alpha-equivalent."""
    if isinstance(phi, Var):
        # innermost binder wins
        for depth in range(len(_env) - 1, -1, -1):
            if _env[depth] == phi.name:
                return ("b", depth)
        return ("v", phi.name)
    if isinstance(phi, Bottom):
        return ("bot",)
    if isinstance(phi, _QUANT):
        return (type(phi).__name__, alpha_key(phi.body, _env + (phi.var,)))
    return (type(phi).__name__, alpha_key(phi.left, _env), alpha_key(phi.right, _env))


def alpha_equiv(a: Formula, b: Formula) -> bool:
    return a == b or alpha_key(a) == alpha_key(b)


# ---------------------------------------------------------------------------
# Inspection

def size(phi: Formula) -> int:
    """Number of nodes in the tree."""
    if isinstance(phi, (Var, Bottom)):
        return 1
    if isinstance(phi, _QUANT):
        return 1 + size(phi.body)
    return 1 + size(phi.left) + size(phi.right)


def is_core(phi: Formula) -> bool:
    """True iff only Var, Bottom, Implies and Forall occur."""
    if isinstance(phi, (Var, Bottom)):
        return True
    if isinstance(phi, Implies):
        return is_core(phi.left) and is_core(phi.right)
    if isinstance(phi, Forall):
        return is_core(phi.body)
    return False


def is_quantifier_free(phi: Formula) -> bool:
    if isinstance(phi, (Var, Bottom)):
        return True
    if isinstance(phi, _QUANT):
        return False
    return is_quantifier_free(phi.left) and is_quantifier_free(phi.right)


def propositions_in_order(phi: Formula) -> list[str]:
    """Free propositions in order of first free occurrence (left to right)."""
    seen: list[str] = []

    def go(f: Formula, bound: frozenset[str]):
        if isinstance(f, Var):
            if f.name not in bound and f.name not in seen:
                seen.append(f.name)
        elif isinstance(f, _QUANT):
            go(f.body, bound | {f.var})
        elif isinstance(f, _BINARY):
            go(f.left, bound)
            go(f.right, bound)

    go(phi, frozenset())
    return seen


# ---------------------------------------------------------------------------
# Desugaring to the {->, forall} core

def desugar(phi: Formula, bottom_as_forall: bool = False) -> Formula:
    """Rewrite /\\, \\/ and exists through their second-order definitions.

    Bottom stays primitive unless ``bottom_as_forall`` is set, in which case
    it becomes ``forall p0. p0``.  Introduced binders are named ``p<k>`` with
    the smallest ``k >= 0`` not occurring anywhere in the rewritten operands.
    """

    def fresh(*parts: Formula, extra: Iterable[str] = ()) -> str:
        avoid = set(extra)
        for part in parts:
            avoid |= all_names(part)
        return fresh_name("p", avoid, start=0)

    def go(f: Formula) -> Formula:
        if isinstance(f, Var):
            return f
        if isinstance(f, Bottom):
            if bottom_as_forall:
                return Forall("p0", Var("p0"))
            return f
        if isinstance(f, Implies):
            return Implies(go(f.left), go(f.right))
        if isinstance(f, Forall):
            return Forall(f.var, go(f.body))
        if isinstance(f, Or):
            a, b = go(f.left), go(f.right)
            p = Var(fresh(a, b))
            return Forall(p.name, Implies(Implies(a, p), Implies(Implies(b, p), p)))
        if isinstance(f, And):
            a, b = go(f.left), go(f.right)
            p = Var(fresh(a, b))
            return Forall(p.name, Implies(Implies(a, Implies(b, p)), p))
        if isinstance(f, Exists):
            body = go(f.body)
            p = Var(fresh(body, extra=(f.var,)))
            return Forall(p.name, Implies(Forall(f.var, Implies(body, p)), p))
        raise TypeError(f"not a formula: {f!r}")

    return go(phi)
