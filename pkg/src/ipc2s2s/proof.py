"""Checker for natural-deduction derivations in sequent style.

A derivation is an explicit tree of :class:`ProofTree` nodes; nothing is
searched for.  Contexts are multisets compared up to alpha-equivalence.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterator

from .syntax import (
    And, Bottom, Exists, Forall, Formula, Implies, Or, Var,
    alpha_equiv, alpha_key, format_formula, free_vars, parse_formula, substitute,
)

__all__ = [
    "Rule", "Variant", "Sequent", "ProofTree", "Verdict", "SideConditionError",
    "ProofFormatError", "check_proof", "cd_instance", "proof_from_json",
    "proof_to_json", "iter_nodes", "RULE_ARITY", "RULE_FAMILY",
]


class Rule(str, enum.Enum):
    AXIOM = "Axiom"
    AND_I = "AndI"
    AND_E_L = "AndE-L"
    AND_E_R = "AndE-R"
    OR_I_L = "OrI-L"
    OR_I_R = "OrI-R"
    OR_E = "OrE"
    IMPL_I = "ImplI"
    IMPL_E = "ImplE"
    BOT_E = "BotE"
    FORALL_I = "ForallI"
    FORALL_E = "ForallE"
    EXISTS_I = "ExistsI"
    EXISTS_E = "ExistsE"
    CD_AXIOM = "CD-Axiom"


RULE_ARITY = {
    Rule.AXIOM: 0, Rule.CD_AXIOM: 0,
    Rule.AND_I: 2, Rule.AND_E_L: 1, Rule.AND_E_R: 1,
    Rule.OR_I_L: 1, Rule.OR_I_R: 1, Rule.OR_E: 3,
    Rule.IMPL_I: 1, Rule.IMPL_E: 2, Rule.BOT_E: 1,
    Rule.FORALL_I: 1, Rule.FORALL_E: 1, Rule.EXISTS_I: 1, Rule.EXISTS_E: 2,
}

# Rules in the same family differ only in which side they pick.
RULE_FAMILY = {
    Rule.AXIOM: "axiom", Rule.CD_AXIOM: "cd",
    Rule.AND_I: "and-i", Rule.AND_E_L: "and-e", Rule.AND_E_R: "and-e",
    Rule.OR_I_L: "or-i", Rule.OR_I_R: "or-i", Rule.OR_E: "or-e",
    Rule.IMPL_I: "impl-i", Rule.IMPL_E: "impl-e", Rule.BOT_E: "bot-e",
    Rule.FORALL_I: "forall-i", Rule.FORALL_E: "forall-e",
    Rule.EXISTS_I: "exists-i", Rule.EXISTS_E: "exists-e",
}

_QUANTIFIER_RULES = {Rule.FORALL_I, Rule.FORALL_E, Rule.EXISTS_I, Rule.EXISTS_E}


class Variant(str, enum.Enum):
    IPC2 = "ipc2"
    IPC2_MINUS = "ipc2-minus"
    IPC2_CD = "ipc2-cd"
    IPC = "ipc"


@dataclass(frozen=True)
class Sequent:
    context: tuple[Formula, ...]
    goal: Formula

    def __post_init__(self):
        object.__setattr__(self, "context", tuple(self.context))

    def __str__(self) -> str:
        ctx = ", ".join(format_formula(f) for f in self.context)
        return f"{ctx} |- {format_formula(self.goal)}" if ctx else f"|- {format_formula(self.goal)}"


@dataclass(frozen=True)
class ProofTree:
    rule: Rule
    conclusion: Sequent
    premises: tuple["ProofTree", ...] = ()
    witness_formula: Formula | None = None
    witness_var: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule(self.rule))
        object.__setattr__(self, "premises", tuple(self.premises))


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    path: tuple[int, ...] = ()
    reason: str | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.accepted

    def __str__(self) -> str:
        if self.accepted:
            return "accepted"
        where = "/".join(map(str, self.path)) or "root"
        return f"rejected at {where}: {self.reason}: {self.message}"


class SideConditionError(ValueError):
    pass


class ProofFormatError(ValueError):
    pass


class _Reject(Exception):
    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason
        self.message = message


def cd_instance(phi: Formula, psi: Formula, p: str) -> Formula:
    """``forall p (phi \\/ psi) -> (phi \\/ forall p psi)``; ``p`` must not be free in ``phi``."""
    if p in free_vars(phi):
        raise SideConditionError(f"{p} occurs free in {format_formula(phi)}")
    return Implies(Forall(p, Or(phi, psi)), Or(phi, Forall(p, psi)))


def iter_nodes(tree: ProofTree, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], ProofTree]]:
    """Pre-order traversal yielding ``(path, node)``."""
    yield path, tree
    for i, sub in enumerate(tree.premises):
        yield from iter_nodes(sub, path + (i,))


def check_proof(tree: ProofTree, variant: Variant | str = Variant.IPC2) -> Verdict:
    variant = Variant(variant)
    for path, node in iter_nodes(tree):
        try:
            _check_node(node, variant)
        except _Reject as r:
            return Verdict(False, path, r.reason, r.message)
    return Verdict(True)


# ---------------------------------------------------------------------------

def _ctx(ctx) -> Counter:
    return Counter(alpha_key(f) for f in ctx)


def _same_ctx(a, b) -> bool:
    return _ctx(a) == _ctx(b)


def _goal(node: ProofTree, cls: type, what: str):
    g = node.conclusion.goal
    if not isinstance(g, cls):
        raise _Reject("goal-mismatch", f"conclusion must be {what}, got {format_formula(g)}")
    return g


def _require(cond: bool, reason: str, message: str):
    if not cond:
        raise _Reject(reason, message)


def _match(a: Formula, b: Formula, reason: str = "goal-mismatch"):
    if not alpha_equiv(a, b):
        raise _Reject(reason, f"expected {format_formula(b)}, got {format_formula(a)}")


def _premise_ctx_equal(node: ProofTree, indices=None):
    gamma = node.conclusion.context
    for i, prem in enumerate(node.premises):
        if indices is not None and i not in indices:
            continue
        _require(_same_ctx(prem.conclusion.context, gamma), "context-mismatch",
                 f"premise {i} context differs from the conclusion context")


def _premise_ctx_extended(node: ProofTree, i: int, extra: Formula):
    gamma = node.conclusion.context
    expected = _ctx(gamma)
    expected[alpha_key(extra)] += 1
    _require(_ctx(node.premises[i].conclusion.context) == expected, "context-mismatch",
             f"premise {i} context must be the conclusion context plus {format_formula(extra)}")


def _ctx_free(ctx) -> frozenset[str]:
    out = frozenset()
    for f in ctx:
        out |= free_vars(f)
    return out


def _check_node(node: ProofTree, variant: Variant):
    rule = node.rule
    if rule in _QUANTIFIER_RULES and variant is Variant.IPC:
        raise _Reject("variant-forbids-rule", f"{rule.value} is not a rule of {variant.value}")
    if rule is Rule.CD_AXIOM and variant is not Variant.IPC2_CD:
        raise _Reject("variant-forbids-rule", f"CD-Axiom is only available in {Variant.IPC2_CD.value}")
    arity = RULE_ARITY[rule]
    _require(len(node.premises) == arity, "wrong-arity",
             f"{rule.value} takes {arity} premise(s), got {len(node.premises)}")

    gamma = node.conclusion.context
    goal = node.conclusion.goal
    prem = [p.conclusion for p in node.premises]

    if rule is Rule.AXIOM:
        _require(any(alpha_equiv(f, goal) for f in gamma), "context-mismatch",
                 f"{format_formula(goal)} is not in the context")

    elif rule is Rule.CD_AXIOM:
        _check_cd(goal)

    elif rule is Rule.AND_I:
        g = _goal(node, And, "a conjunction")
        _premise_ctx_equal(node)
        _match(prem[0].goal, g.left)
        _match(prem[1].goal, g.right)

    elif rule in (Rule.AND_E_L, Rule.AND_E_R):
        _premise_ctx_equal(node)
        major = prem[0].goal
        _require(isinstance(major, And), "goal-mismatch", "premise must conclude a conjunction")
        _match(goal, major.left if rule is Rule.AND_E_L else major.right)

    elif rule in (Rule.OR_I_L, Rule.OR_I_R):
        g = _goal(node, Or, "a disjunction")
        _premise_ctx_equal(node)
        _match(prem[0].goal, g.left if rule is Rule.OR_I_L else g.right)

    elif rule is Rule.OR_E:
        _premise_ctx_equal(node, indices={0})
        major = prem[0].goal
        _require(isinstance(major, Or), "goal-mismatch", "first premise must conclude a disjunction")
        _premise_ctx_extended(node, 1, major.left)
        _premise_ctx_extended(node, 2, major.right)
        _match(prem[1].goal, goal)
        _match(prem[2].goal, goal)

    elif rule is Rule.IMPL_I:
        g = _goal(node, Implies, "an implication")
        _premise_ctx_extended(node, 0, g.left)
        _match(prem[0].goal, g.right)

    elif rule is Rule.IMPL_E:
        _premise_ctx_equal(node)
        major = prem[0].goal
        _require(isinstance(major, Implies), "goal-mismatch", "first premise must conclude an implication")
        _match(prem[1].goal, major.left)
        _match(goal, major.right)

    elif rule is Rule.BOT_E:
        _premise_ctx_equal(node)
        _require(isinstance(prem[0].goal, Bottom), "goal-mismatch", "premise must conclude bot")

    elif rule is Rule.FORALL_I:
        g = _goal(node, Forall, "a universal formula")
        _premise_ctx_equal(node)
        p = node.witness_var or g.var
        _require(p not in _ctx_free(gamma), "eigenvariable-violation",
                 f"eigenvariable {p} occurs free in the context")
        if p != g.var:
            _require(p not in free_vars(g), "eigenvariable-violation",
                     f"eigenvariable {p} occurs free in the conclusion")
        _match(Forall(p, prem[0].goal), g)

    elif rule is Rule.FORALL_E:
        _premise_ctx_equal(node)
        major = prem[0].goal
        _require(isinstance(major, Forall), "goal-mismatch", "premise must conclude a universal formula")
        psi = _witness(node, variant)
        _match(goal, substitute(major.body, major.var, psi), "bad-substitution")

    elif rule is Rule.EXISTS_I:
        g = _goal(node, Exists, "an existential formula")
        _premise_ctx_equal(node)
        psi = _witness(node, variant)
        _match(prem[0].goal, substitute(g.body, g.var, psi), "bad-substitution")

    elif rule is Rule.EXISTS_E:
        _premise_ctx_equal(node, indices={0})
        major = prem[0].goal
        _require(isinstance(major, Exists), "goal-mismatch", "first premise must conclude an existential formula")
        p = node.witness_var or major.var
        _require(p not in _ctx_free(gamma), "eigenvariable-violation",
                 f"eigenvariable {p} occurs free in the context")
        _require(p not in free_vars(goal), "eigenvariable-violation",
                 f"eigenvariable {p} occurs free in the conclusion")
        if p != major.var:
            _require(p not in free_vars(major), "eigenvariable-violation",
                     f"eigenvariable {p} occurs free in {format_formula(major)}")
        hyp = substitute(major.body, major.var, Var(p))
        _premise_ctx_extended(node, 1, hyp)
        _match(prem[1].goal, goal)

    else:  # pragma: no cover - Rule is closed
        raise _Reject("unknown-rule", rule.value)


def _witness(node: ProofTree, variant: Variant) -> Formula:
    psi = node.witness_formula
    _require(psi is not None, "bad-substitution", f"{node.rule.value} needs a witness formula")
    if variant is Variant.IPC2_MINUS:
        _require(isinstance(psi, (Var, Bottom)), "non-atomic-witness",
                 f"{variant.value} only instantiates atoms, got {format_formula(psi)}")
    return psi


def _check_cd(goal: Formula):
    bad = _Reject("bad-substitution", f"{format_formula(goal)} is not an instance of the CD scheme")
    if not (isinstance(goal, Implies) and isinstance(goal.left, Forall)
            and isinstance(goal.left.body, Or)):
        raise bad
    p = goal.left.var
    phi, psi = goal.left.body.left, goal.left.body.right
    try:
        expected = cd_instance(phi, psi, p)
    except SideConditionError as e:
        raise _Reject("eigenvariable-violation", str(e)) from None
    if not alpha_equiv(goal, expected):
        raise bad


# ---------------------------------------------------------------------------
# JSON

def proof_from_json(data: Any) -> ProofTree:
    """Build a tree from the decoded JSON object (or a JSON string)."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise ProofFormatError(f"invalid JSON: {e}") from None
    return _node_from_json(data, ())


def _node_from_json(data: Any, path: tuple[int, ...]) -> ProofTree:
    where = "/".join(map(str, path)) or "root"
    if not isinstance(data, dict):
        raise ProofFormatError(f"{where}: node must be an object")
    try:
        rule = Rule(data["rule"])
        concl = data["conclusion"]
        context = tuple(parse_formula(s) for s in concl["context"])
        goal = parse_formula(concl["goal"])
        premises = data.get("premises", [])
        if not isinstance(premises, list):
            raise ProofFormatError(f"{where}: premises must be a list")
        wf = data.get("witnessFormula")
        wv = data.get("witnessVar")
    except ProofFormatError:
        raise
    except (KeyError, TypeError) as e:
        raise ProofFormatError(f"{where}: missing or malformed field {e}") from None
    except ValueError as e:
        raise ProofFormatError(f"{where}: {e}") from None
    try:
        witness = parse_formula(wf) if wf is not None else None
    except ValueError as e:
        raise ProofFormatError(f"{where}: witnessFormula: {e}") from None
    if wv is not None and not isinstance(wv, str):
        raise ProofFormatError(f"{where}: witnessVar must be a string")
    subs = tuple(_node_from_json(p, path + (i,)) for i, p in enumerate(premises))
    return ProofTree(rule, Sequent(context, goal), subs, witness, wv)


def proof_to_json(tree: ProofTree) -> dict:
    out: dict[str, Any] = {
        "rule": tree.rule.value,
        "conclusion": {
            "context": [format_formula(f) for f in tree.conclusion.context],
            "goal": format_formula(tree.conclusion.goal),
        },
    }
    if tree.witness_formula is not None:
        out["witnessFormula"] = format_formula(tree.witness_formula)
    if tree.witness_var is not None:
        out["witnessVar"] = tree.witness_var
    out["premises"] = [proof_to_json(p) for p in tree.premises]
    return out
