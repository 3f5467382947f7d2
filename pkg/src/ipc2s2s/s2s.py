"""Monadic second-order formulas over the infinite binary tree, and the
translation of IPC2 into them.

Nodes are finite 0/1 words; ``S0``/``S1`` append a letter and ``Leq`` is
the prefix order.  Node variables are lowercase, set variables start with
an uppercase letter.  Open subsets of (0,1) are represented by node sets
``S`` standing for their closed complements ``R(S)``.

Helper predicates are wrapped in :class:`Macro` nodes.  A macro is
semantically transparent (``emit`` and the scope analysis look straight
through it) but remembers which helper produced the subtree, which is what
:func:`rational_mode` rewrites.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .syntax import Bottom, Forall, Formula, Implies, Var, propositions_in_order

__all__ = [
    "Term", "Eps", "NodeVar", "S0", "S1",
    "S2SFormula", "Leq", "Eq", "In", "Subset", "Not", "And", "Or", "SImplies", "Iff",
    "Forall1", "Exists1", "Forall2", "Exists2", "Macro",
    "HELPERS", "HelperError", "TranslationError", "build_helper", "translate", "wrap_truth",
    "rational_mode", "emit", "free_set_vars", "free_node_vars", "set_names", "rename_set",
    "macro_count", "iter_macros", "conj",
]

_SET_NAME = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
_NODE_NAME = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


class HelperError(ValueError):
    pass


class TranslationError(ValueError):
    pass


def _set_name(name: str) -> str:
    if not isinstance(name, str) or not _SET_NAME.match(name):
        raise ValueError(f"set variables start with an uppercase letter: {name!r}")
    return name


def _node_name(name: str) -> str:
    if not isinstance(name, str) or not _NODE_NAME.match(name) or name == "eps":
        raise ValueError(f"node variables are lowercase identifiers other than eps: {name!r}")
    return name


# ---------------------------------------------------------------------------
# terms

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Eps(Term):
    pass


@dataclass(frozen=True)
class NodeVar(Term):
    name: str

    def __post_init__(self):
        _node_name(self.name)


@dataclass(frozen=True)
class S0(Term):
    arg: Term


@dataclass(frozen=True)
class S1(Term):
    arg: Term


EPS = Eps()


# ---------------------------------------------------------------------------
# formulas

class S2SFormula:
    __slots__ = ()

    def __str__(self) -> str:
        return emit(self)


@dataclass(frozen=True)
class Leq(S2SFormula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Eq(S2SFormula):
    left: Term
    right: Term


@dataclass(frozen=True)
class In(S2SFormula):
    term: Term
    set: str

    def __post_init__(self):
        _set_name(self.set)


@dataclass(frozen=True)
class Subset(S2SFormula):
    left: str
    right: str

    def __post_init__(self):
        _set_name(self.left)
        _set_name(self.right)


@dataclass(frozen=True)
class Not(S2SFormula):
    body: S2SFormula


@dataclass(frozen=True)
class And(S2SFormula):
    left: S2SFormula
    right: S2SFormula


@dataclass(frozen=True)
class Or(S2SFormula):
    left: S2SFormula
    right: S2SFormula


@dataclass(frozen=True)
class SImplies(S2SFormula):
    left: S2SFormula
    right: S2SFormula


@dataclass(frozen=True)
class Iff(S2SFormula):
    left: S2SFormula
    right: S2SFormula


@dataclass(frozen=True)
class Forall1(S2SFormula):
    var: str
    body: S2SFormula

    def __post_init__(self):
        _node_name(self.var)


@dataclass(frozen=True)
class Exists1(S2SFormula):
    var: str
    body: S2SFormula

    def __post_init__(self):
        _node_name(self.var)


@dataclass(frozen=True)
class Forall2(S2SFormula):
    var: str
    body: S2SFormula

    def __post_init__(self):
        _set_name(self.var)


@dataclass(frozen=True)
class Exists2(S2SFormula):
    var: str
    body: S2SFormula

    def __post_init__(self):
        _set_name(self.var)


@dataclass(frozen=True)
class Macro(S2SFormula):
    """A helper instance ``name(args)`` together with its expansion."""

    name: str
    args: tuple[str, ...]
    expansion: S2SFormula


_BINARY = (And, Or, SImplies, Iff)
_BINDERS = (Forall1, Exists1, Forall2, Exists2)


def conj(*parts: S2SFormula) -> S2SFormula:
    """Left-nested conjunction of one or more formulas."""
    if not parts:
        raise ValueError("empty conjunction")
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


# ---------------------------------------------------------------------------
# scope analysis

def _term_vars(t: Term, out: set[str]) -> None:
    while isinstance(t, (S0, S1)):
        t = t.arg
    if isinstance(t, NodeVar):
        out.add(t.name)


def _free(f: S2SFormula, sets: bool) -> frozenset[str]:
    out: set[str] = set()
    stack: list[tuple[S2SFormula, frozenset[str]]] = [(f, frozenset())]
    while stack:
        g, bound = stack.pop()
        t = type(g)
        if t is Macro:
            stack.append((g.expansion, bound))
        elif t in _BINARY:
            stack.append((g.left, bound))
            stack.append((g.right, bound))
        elif t is Not:
            stack.append((g.body, bound))
        elif t in _BINDERS:
            if (t in (Forall2, Exists2)) == sets:
                stack.append((g.body, bound | {g.var}))
            else:
                stack.append((g.body, bound))
        else:
            here: set[str] = set()
            if sets:
                if t is In:
                    here.add(g.set)
                elif t is Subset:
                    here.update((g.left, g.right))
            elif t in (Leq, Eq):
                _term_vars(g.left, here)
                _term_vars(g.right, here)
            elif t is In:
                _term_vars(g.term, here)
            out |= here - bound
    return frozenset(out)


def free_set_vars(f: S2SFormula) -> frozenset[str]:
    return _free(f, sets=True)


def free_node_vars(f: S2SFormula) -> frozenset[str]:
    return _free(f, sets=False)


def set_names(f: S2SFormula) -> frozenset[str]:
    """Every set-variable name occurring in ``f``, free or bound."""
    out: set[str] = set()
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        t = type(g)
        if t is Macro:
            stack.append(g.expansion)
        elif t in _BINARY:
            stack.extend((g.left, g.right))
        elif t is Not:
            stack.append(g.body)
        elif t in _BINDERS:
            if t in (Forall2, Exists2):
                out.add(g.var)
            stack.append(g.body)
        elif t is In:
            out.add(g.set)
        elif t is Subset:
            out.update((g.left, g.right))
    return frozenset(out)


def _fresh(base: str, avoid: set[str] | frozenset[str]) -> str:
    if base not in avoid:
        return base
    for i in itertools.count(1):
        if f"{base}{i}" not in avoid:
            return f"{base}{i}"
    raise AssertionError("unreachable")


def rename_set(f: S2SFormula, old: str, new: str) -> S2SFormula:
    """Replace free occurrences of set variable ``old`` by ``new``.

    ``new`` must not be bound anywhere in ``f`` (callers pick it fresh
    against :func:`set_names`), so no renaming of binders is needed.
    """
    _set_name(new)
    if new != old and new in set_names(f) - free_set_vars(f):
        raise ValueError(f"{new} is bound inside the formula")

    def go(g: S2SFormula) -> S2SFormula:
        t = type(g)
        if t is In:
            return In(g.term, new) if g.set == old else g
        if t is Subset:
            if old not in (g.left, g.right):
                return g
            return Subset(new if g.left == old else g.left, new if g.right == old else g.right)
        if t is Macro:
            return Macro(g.name, tuple(new if a == old else a for a in g.args), go(g.expansion))
        if t in _BINARY:
            return t(go(g.left), go(g.right))
        if t is Not:
            return Not(go(g.body))
        if t in (Forall2, Exists2) and g.var == old:
            return g
        if t in _BINDERS:
            return t(g.var, go(g.body))
        return g

    return go(f)


def iter_macros(f: S2SFormula) -> Iterator[Macro]:
    stack = [f]
    while stack:
        g = stack.pop()
        t = type(g)
        if t is Macro:
            yield g
            stack.append(g.expansion)
        elif t in _BINARY:
            stack.extend((g.right, g.left))
        elif t is Not or t in _BINDERS:
            stack.append(g.body)


def macro_count(f: S2SFormula, name: str) -> int:
    return sum(1 for m in iter_macros(f) if m.name == name)


# ---------------------------------------------------------------------------
# helper predicates

x, y, z = NodeVar("x"), NodeVar("y"), NodeVar("z")


def _forall_ge(var: str, lower: Term, body: S2SFormula) -> S2SFormula:
    return Forall1(var, SImplies(Leq(lower, NodeVar(var)), body))


def _path(X: str) -> S2SFormula:
    linear = Forall1("x", Forall1("y", SImplies(And(In(x, X), In(y, X)), Or(Leq(x, y), Leq(y, x)))))
    grows = Forall1("x", SImplies(In(x, X), Or(In(S0(x), X), In(S1(x), X))))
    return conj(linear, grows, In(EPS, X))


def _u(X: str) -> S2SFormula:
    zeros = Forall1("x", SImplies(In(x, X), Exists1("z", And(Leq(x, z), In(S0(z), X)))))
    one = Exists1("x", In(S1(x), X))
    return conj(build_helper("Path", [X]), zeros, one)


def _uq(X: str) -> S2SFormula:
    # X = u 1 0^omega: it takes a 1-step at some y and only 0-steps afterwards
    tail = _forall_ge("z", S1(y), SImplies(In(z, X), In(S0(z), X)))
    return And(build_helper("Path", [X]), Exists1("y", And(In(S1(y), X), tail)))


def _closed(S: str) -> S2SFormula:
    X = _fresh("X", {S})
    Y = _fresh("Y", {S, X})
    # antecedent: X is a path u 0 1^omega, with y = u the node before its last 0-step
    last_zero = Exists1("y", And(In(S0(y), X), _forall_ge("z", S0(y), Not(In(S0(z), X)))))
    antecedent = And(build_helper("Path", [X]), last_zero)
    companion = conj(
        build_helper("Path", [Y]),
        In(y, Y),
        In(y, X),
        In(S0(y), X),
        _forall_ge("z", S0(y), SImplies(In(z, X), In(S1(z), X))),
        In(S1(y), Y),
        _forall_ge("z", S1(y), SImplies(In(z, Y), In(S0(z), Y))),
    )
    consequent = Exists2(Y, And(Subset(Y, S), Exists1("y", companion)))
    return Forall2(X, SImplies(Subset(X, S), SImplies(antecedent, consequent)))


def _cl_belong(X: str, S: str) -> S2SFormula:
    return conj(build_helper("U", [X]), build_helper("Closed", [S]), Subset(X, S))


def _closed_subset(S: str, T: str) -> S2SFormula:
    X = _fresh("X", {S, T})
    return Forall2(X, SImplies(build_helper("ClBelong", [X, S]), build_helper("ClBelong", [X, T])))


def _min_of(X: str, body: S2SFormula) -> S2SFormula:
    if X not in free_set_vars(body):
        raise HelperError(f"MinOf body does not mention its distinguished variable {X}")
    avoid = set(set_names(body)) | {X}
    Y = _fresh("Y", avoid)
    Z = _fresh("Z", avoid | {Y})
    inner = Forall2(Z, SImplies(And(build_helper("U", [Z]), build_helper("ClBelong", [Z, X])),
                                build_helper("ClBelong", [Z, Y])))
    minimal = Forall2(Y, SImplies(And(build_helper("Closed", [Y]), rename_set(body, X, Y)), inner))
    return conj(body, build_helper("Closed", [X]), minimal)


_ARITY = {"Path": 1, "U": 1, "UQ": 1, "Closed": 1, "ClBelong": 2, "ClosedSubset": 2, "MinOf": 1}
_BUILDERS = {"Path": _path, "U": _u, "UQ": _uq, "Closed": _closed,
             "ClBelong": _cl_belong, "ClosedSubset": _closed_subset}
HELPERS = tuple(_ARITY)


def build_helper(name: str, args: Sequence[str], body: S2SFormula | None = None) -> Macro:
    """Instantiate a helper predicate on the given set-variable names.

    ``MinOf`` additionally takes ``body``, a formula in which ``args[0]``
    is free; the result holds of exactly the least closed set meeting it.
    """
    if name not in _ARITY:
        raise HelperError(f"unknown helper {name!r}; expected one of {', '.join(HELPERS)}")
    args = tuple(args)
    if len(args) != _ARITY[name]:
        raise HelperError(f"{name} takes {_ARITY[name]} set argument(s), got {len(args)}")
    for a in args:
        _set_name(a)
    if name == "MinOf":
        if body is None:
            raise HelperError("MinOf needs a body")
        return Macro(name, args, _min_of(args[0], body))
    if body is not None:
        raise HelperError(f"{name} takes no body")
    return Macro(name, args, _BUILDERS[name](*args))


# ---------------------------------------------------------------------------
# translation

class _Names:
    def __init__(self):
        self.aux = itertools.count(1)
        self.w = itertools.count(1)


def translate(phi: Formula) -> S2SFormula:
    """``phi*`` with free set variables ``T`` and ``T1..Tn``.

    ``phi`` must use only variables, ``bot``, implication and ``forall``;
    its free propositions get ``T1..Tn`` in order of first occurrence.
    """
    props = propositions_in_order(phi)
    env = {p: f"T{i}" for i, p in enumerate(props, 1)}
    return _tr(phi, "T", env, _Names())


def _next_index(env: dict[str, str]) -> int:
    return 1 + max((int(v[1:]) for v in env.values()), default=0)


def _tr(f: Formula, target: str, env: dict[str, str], names: _Names) -> S2SFormula:
    t = type(f)
    if t is Bottom:
        return Forall1("x", In(x, target))
    if t is Var:
        Y = "Y"
        return Forall2(Y, SImplies(build_helper("U", [Y]),
                                   Iff(build_helper("ClBelong", [Y, target]),
                                       build_helper("ClBelong", [Y, env[f.name]]))))
    if t is Implies:
        a1, a2 = f"Taux{next(names.aux)}", f"Taux{next(names.aux)}"
        left = _tr(f.left, a1, env, names)
        right = _tr(f.right, a2, env, names)
        X = "X"
        cover = Forall2(X, SImplies(conj(build_helper("U", [X]), Not(build_helper("ClBelong", [X, a1])),
                                         build_helper("ClBelong", [X, a2])),
                                    build_helper("ClBelong", [X, target])))
        hat = Exists2(a1, Exists2(a2, conj(build_helper("Closed", [target]), left, right, cover)))
        return build_helper("MinOf", [target], hat)
    if t is Forall:
        W = f"W{next(names.w)}"
        Tn = f"T{_next_index(env)}"
        body = _tr(f.body, W, {**env, f.var: Tn}, names)
        Y = "Y"
        covered = Forall2(Y, SImplies(And(build_helper("U", [Y]), build_helper("ClBelong", [Y, W])),
                                      build_helper("ClBelong", [Y, target])))
        guarded = SImplies(conj(build_helper("Closed", [W]), build_helper("Closed", [Tn]), body), covered)
        hat = And(build_helper("Closed", [target]), Forall2(W, Forall2(Tn, guarded)))
        return build_helper("MinOf", [target], hat)
    raise TranslationError(f"translate expects only variables, bot, -> and forall; found {type(f).__name__}")


def wrap_truth(phistar: S2SFormula, n: int = 0) -> S2SFormula:
    """Closed sentence stating that the translated formula denotes all of (0,1).

    For ``n > 0`` the parameters ``T1..Tn`` are universally quantified over
    closed sets as well.
    """
    allowed = {"T"} | {f"T{i}" for i in range(1, n + 1)}
    stray = free_set_vars(phistar) - allowed
    if stray or free_node_vars(phistar):
        names = sorted(stray | free_node_vars(phistar))
        raise TranslationError(f"unexpected free variables {', '.join(names)}")
    body = Forall2("T", Forall2("X", SImplies(
        conj(build_helper("Closed", ["T"]), phistar, build_helper("U", ["X"])),
        Not(build_helper("ClBelong", ["X", "T"])))))
    if n == 0:
        return body
    guards = conj(*(build_helper("Closed", [f"T{i}"]) for i in range(1, n + 1)))
    out: S2SFormula = SImplies(guards, body)
    for i in range(n, 0, -1):
        out = Forall2(f"T{i}", out)
    return out


def rational_mode(phistar: S2SFormula) -> S2SFormula:
    """Replace every ``U`` helper instance by ``UQ`` on the same argument."""
    def go(g: S2SFormula) -> S2SFormula:
        t = type(g)
        if t is Macro:
            if g.name == "U":
                return build_helper("UQ", g.args)
            new = go(g.expansion)
            return g if new is g.expansion else Macro(g.name, g.args, new)
        if t in _BINARY:
            a, b = go(g.left), go(g.right)
            return g if (a is g.left and b is g.right) else t(a, b)
        if t is Not:
            b = go(g.body)
            return g if b is g.body else Not(b)
        if t in _BINDERS:
            b = go(g.body)
            return g if b is g.body else t(g.var, b)
        return g

    return go(phistar)


# ---------------------------------------------------------------------------
# emission

_HEADS = {And: "and", Or: "or", SImplies: "implies", Iff: "iff",
          Forall1: "forall1", Exists1: "exists1", Forall2: "forall2", Exists2: "exists2"}


def _emit_term(t: Term, out: list[str]) -> None:
    if type(t) is Eps:
        out.append("eps")
    elif type(t) is NodeVar:
        out.append(t.name)
    else:
        out.append("(s0 " if type(t) is S0 else "(s1 ")
        _emit_term(t.arg, out)
        out.append(")")


def emit(f: S2SFormula, expand_subset: bool = False) -> str:
    """Canonical s-expression text; macros are emitted as their expansion."""
    out: list[str] = []
    stack: list = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, str):
            out.append(g)
            continue
        t = type(g)
        if t is Macro:
            stack.append(g.expansion)
        elif t in _BINARY:
            stack.extend((")", g.right, " ", g.left))
            out.append(f"({_HEADS[t]} ")
        elif t in _BINDERS:
            stack.extend((")", g.body))
            out.append(f"({_HEADS[t]} {g.var} ")
        elif t is Not:
            stack.extend((")", g.body))
            out.append("(not ")
        elif t is In:
            out.append("(in ")
            _emit_term(g.term, out)
            out.append(f" {g.set})")
        elif t in (Leq, Eq):
            out.append("(leq " if t is Leq else "(eq ")
            _emit_term(g.left, out)
            out.append(" ")
            _emit_term(g.right, out)
            out.append(")")
        elif t is Subset:
            if expand_subset:
                out.append(f"(forall1 x (implies (in x {g.left}) (in x {g.right})))")
            else:
                out.append(f"(subset {g.left} {g.right})")
        else:
            raise TypeError(f"not an S2S formula: {g!r}")
    return "".join(out)
