"""Hand-built derivations: the second-order definitions of bot, \\/, /\\ and exists.

Combinators below compute each node's conclusion from its premises, so each
tree reads bottom-up like one written out by hand.  Every
derivation here is accepted by :func:`ipc2s2s.proof.check_proof` under
``ipc2``; the suite is what the mutation and soundness checks run over.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .proof import ProofTree, Rule, Sequent, cd_instance, proof_from_json, proof_to_json
from .syntax import (
    BOT, And, Exists, Forall, Formula, Implies, Or, Var,
    alpha_key, all_names, fresh_name, substitute,
)

Ctx = tuple[Formula, ...]


def _ctx(t: ProofTree) -> Ctx:
    return t.conclusion.context


def _goal(t: ProofTree) -> Formula:
    return t.conclusion.goal


def _node(rule, ctx, goal, *premises, wf=None, wv=None) -> ProofTree:
    return ProofTree(rule, Sequent(ctx, goal), premises, wf, wv)


def _remove_one(ctx: Ctx, f: Formula) -> Ctx:
    key = alpha_key(f)
    for i, g in enumerate(ctx):
        if alpha_key(g) == key:
            return ctx[:i] + ctx[i + 1:]
    raise ValueError("hypothesis not in context")


def axiom(ctx: Ctx, f: Formula) -> ProofTree:
    return _node(Rule.AXIOM, ctx, f)


def and_i(a: ProofTree, b: ProofTree) -> ProofTree:
    return _node(Rule.AND_I, _ctx(a), And(_goal(a), _goal(b)), a, b)


def and_e_l(t: ProofTree) -> ProofTree:
    return _node(Rule.AND_E_L, _ctx(t), _goal(t).left, t)


def and_e_r(t: ProofTree) -> ProofTree:
    return _node(Rule.AND_E_R, _ctx(t), _goal(t).right, t)


def or_i_l(t: ProofTree, right: Formula) -> ProofTree:
    return _node(Rule.OR_I_L, _ctx(t), Or(_goal(t), right), t)


def or_i_r(t: ProofTree, left: Formula) -> ProofTree:
    return _node(Rule.OR_I_R, _ctx(t), Or(left, _goal(t)), t)


def or_e(major: ProofTree, left: ProofTree, right: ProofTree) -> ProofTree:
    return _node(Rule.OR_E, _ctx(major), _goal(left), major, left, right)


def impl_i(t: ProofTree, hyp: Formula) -> ProofTree:
    return _node(Rule.IMPL_I, _remove_one(_ctx(t), hyp), Implies(hyp, _goal(t)), t)


def impl_e(major: ProofTree, minor: ProofTree) -> ProofTree:
    return _node(Rule.IMPL_E, _ctx(major), _goal(major).right, major, minor)


def bot_e(t: ProofTree, goal: Formula) -> ProofTree:
    return _node(Rule.BOT_E, _ctx(t), goal, t)


def forall_i(t: ProofTree, p: str) -> ProofTree:
    return _node(Rule.FORALL_I, _ctx(t), Forall(p, _goal(t)), t, wv=p)


def forall_e(t: ProofTree, psi: Formula) -> ProofTree:
    g = _goal(t)
    return _node(Rule.FORALL_E, _ctx(t), substitute(g.body, g.var, psi), t, wf=psi)


def exists_i(t: ProofTree, target: Exists, psi: Formula) -> ProofTree:
    return _node(Rule.EXISTS_I, _ctx(t), target, t, wf=psi)


def exists_e(major: ProofTree, minor: ProofTree, p: str | None = None) -> ProofTree:
    p = p or _goal(major).var
    return _node(Rule.EXISTS_E, _ctx(major), _goal(minor), major, minor, wv=p)


def cd_axiom(ctx: Ctx, phi: Formula, psi: Formula, p: str) -> ProofTree:
    return _node(Rule.CD_AXIOM, ctx, cd_instance(phi, psi, p))


def _both_ways(forward: ProofTree, backward: ProofTree) -> ProofTree:
    return and_i(forward, backward)


def _fresh_p(*fs: Formula) -> str:
    names = set()
    for f in fs:
        names |= all_names(f)
    return "p" if "p" not in names else fresh_name("p", names)


# ---------------------------------------------------------------------------
# The four definitions, for arbitrary operands

def bot_equivalence() -> ProofTree:
    """|- bot <-> forall p. p"""
    p = Var("p")
    allp = Forall("p", p)
    fwd = impl_i(forall_i(bot_e(axiom((BOT,), BOT), p), "p"), BOT)
    bwd = impl_i(forall_e(axiom((allp,), allp), BOT), allp)
    return _both_ways(fwd, bwd)


def or_equivalence(phi: Formula, psi: Formula) -> ProofTree:
    """|- phi \\/ psi <-> forall p. (phi -> p) -> (psi -> p) -> p"""
    p = Var(_fresh_p(phi, psi))
    disj = Or(phi, psi)
    enc = Forall(p.name, Implies(Implies(phi, p), Implies(Implies(psi, p), p)))

    g2 = (disj, Implies(phi, p), Implies(psi, p))
    left = impl_e(axiom(g2 + (phi,), Implies(phi, p)), axiom(g2 + (phi,), phi))
    right = impl_e(axiom(g2 + (psi,), Implies(psi, p)), axiom(g2 + (psi,), psi))
    body = or_e(axiom(g2, disj), left, right)
    body = impl_i(impl_i(body, Implies(psi, p)), Implies(phi, p))
    fwd = impl_i(forall_i(body, p.name), disj)

    g = (enc,)
    inst = forall_e(axiom(g, enc), disj)
    inl = impl_i(or_i_l(axiom(g + (phi,), phi), psi), phi)
    inr = impl_i(or_i_r(axiom(g + (psi,), psi), phi), psi)
    bwd = impl_i(impl_e(impl_e(inst, inl), inr), enc)
    return _both_ways(fwd, bwd)


def and_equivalence(phi: Formula, psi: Formula) -> ProofTree:
    """|- phi /\\ psi <-> forall p. (phi -> psi -> p) -> p"""
    p = Var(_fresh_p(phi, psi))
    cj = And(phi, psi)
    enc = Forall(p.name, Implies(Implies(phi, Implies(psi, p)), p))

    g1 = (cj, Implies(phi, Implies(psi, p)))
    body = impl_e(impl_e(axiom(g1, Implies(phi, Implies(psi, p))), and_e_l(axiom(g1, cj))),
                  and_e_r(axiom(g1, cj)))
    fwd = impl_i(forall_i(impl_i(body, g1[1]), p.name), cj)

    g = (enc,)
    inst = forall_e(axiom(g, enc), cj)
    gg = g + (phi, psi)
    pair = impl_i(impl_i(and_i(axiom(gg, phi), axiom(gg, psi)), psi), phi)
    bwd = impl_i(impl_e(inst, pair), enc)
    return _both_ways(fwd, bwd)


def exists_equivalence(q: str, phi: Formula) -> ProofTree:
    """|- (exists q. phi) <-> forall p. (forall q. phi -> p) -> p"""
    ex = Exists(q, phi)
    p = Var(_fresh_p(ex, Var(q)))
    univ = Forall(q, Implies(phi, p))
    enc = Forall(p.name, Implies(univ, p))

    g1 = (ex, univ)
    minor = impl_e(forall_e(axiom(g1 + (phi,), univ), Var(q)), axiom(g1 + (phi,), phi))
    body = exists_e(axiom(g1, ex), minor, q)
    fwd = impl_i(forall_i(impl_i(body, univ), p.name), ex)

    g = (enc,)
    inst = forall_e(axiom(g, enc), ex)
    intro = exists_i(axiom(g + (phi,), phi), ex, Var(q))
    gen = forall_i(impl_i(intro, phi), q)
    bwd = impl_i(impl_e(inst, gen), enc)
    return _both_ways(fwd, bwd)


# ---------------------------------------------------------------------------
# A few smaller derivations

def identity(phi: Formula) -> ProofTree:
    return impl_i(axiom((phi,), phi), phi)


def k_combinator(a: Formula, b: Formula) -> ProofTree:
    """|- a -> b -> a"""
    return impl_i(impl_i(axiom((a, b), a), b), a)


def s_combinator(a: Formula, b: Formula, c: Formula) -> ProofTree:
    """|- (a -> b -> c) -> (a -> b) -> a -> c"""
    x, y = Implies(a, Implies(b, c)), Implies(a, b)
    g = (x, y, a)
    body = impl_e(impl_e(axiom(g, x), axiom(g, a)), impl_e(axiom(g, y), axiom(g, a)))
    return impl_i(impl_i(impl_i(body, a), y), x)


def polymorphic_identity() -> ProofTree:
    """|- forall p. p -> p"""
    return forall_i(identity(Var("p")), "p")


def forall_instance(phi: Formula) -> ProofTree:
    """|- (forall p. p) -> phi, through an instantiation with a compound witness."""
    allp = Forall("p", Var("p"))
    return impl_i(forall_e(axiom((allp,), allp), phi), allp)


def double_negation_intro(a: Formula) -> ProofTree:
    """|- a -> ~~a"""
    na = Implies(a, BOT)
    g = (a, na)
    return impl_i(impl_i(impl_e(axiom(g, na), axiom(g, a)), na), a)


def cd_example(a: Formula, b: Formula, p: str) -> ProofTree:
    """|- forall p (a \\/ b) -> a \\/ forall p b, read off the CD leaf after a detour."""
    inst = cd_instance(a, b, p)
    return impl_e(identity(inst), cd_axiom((), a, b, p))


A, B = Var("a"), Var("b")

DEFINABILITY = {
    "bot_def": bot_equivalence,
    "or_def": lambda: or_equivalence(A, B),
    "and_def": lambda: and_equivalence(A, B),
    "exists_def": lambda: exists_equivalence("q", Var("q")),
}

EXTRA = {
    "or_def_compound": lambda: or_equivalence(Implies(A, B), Forall("r", Var("r"))),
    "and_def_compound": lambda: and_equivalence(Or(A, B), Var("p")),
    "exists_def_param": lambda: exists_equivalence("q", Implies(Var("q"), A)),
    "identity": lambda: identity(A),
    "k": lambda: k_combinator(A, B),
    "s": lambda: s_combinator(A, B, Var("c")),
    "poly_identity": polymorphic_identity,
    "ex_falso_forall": lambda: forall_instance(Implies(A, B)),
    "dni": lambda: double_negation_intro(A),
}


def suite() -> dict[str, ProofTree]:
    """Every bundled derivation (all accepted under ipc2)."""
    return {name: build() for name, build in {**DEFINABILITY, **EXTRA}.items()}


def cd_suite() -> dict[str, ProofTree]:
    """Derivations that need the CD scheme (accepted only under ipc2-cd)."""
    return {"cd_atomic": cd_example(A, Var("p"), "p")}


def load_bundled() -> dict[str, ProofTree]:
    """Read the JSON copies shipped in ``ipc2s2s/data/proofs``."""
    out = {}
    root = resources.files("ipc2s2s") / "data" / "proofs"
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = proof_from_json(entry.read_text())
    return out


def write_bundled(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, tree in {**suite(), **cd_suite()}.items():
        path = directory / f"{name}.json"
        path.write_text(json.dumps(proof_to_json(tree), indent=1) + "\n")
        written.append(path)
    return written
