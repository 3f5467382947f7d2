"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict with its runtime budget;
the lines are printed at the end of the session (see ``conftest.py``).
Run on its own with ``python3 -m pytest tests/test_acceptance.py -v``.
"""

import contextlib
import time
from fractions import Fraction as F

import pytest

from corpus import (
    CLOSED_CORPUS, GRID, POSETS_3, boundary_points, chain, core_corpus_100, formulas_of_size,
    in_closed, structural_diff, valuations,
)
from ipc2s2s import proof_suite as ps
from ipc2s2s.interval import FULL, DyadicOpenSet, QuantifierPool, eval_sandwich
from ipc2s2s.kripke import KripkeFrame, eval_kripke
from ipc2s2s.proof import Variant, check_proof
from ipc2s2s.regular import (
    UltimatelyPeriodicPath as UPP, companion_node, decide_closed, delete_companion_branch,
    encode_closed_set, member_R, r_of, sat_U,
)
from ipc2s2s.s2s import emit, free_node_vars, free_set_vars, macro_count, rational_mode, translate, wrap_truth
from ipc2s2s.syntax import BOT, Implies, conj, desugar, free_vars, parse_formula, propositions_in_order
from ipc2s2s.topology import eval_topo

from test_proof import rule_mutants
from test_s2s import golden

RESULTS: list[str] = []


@contextlib.contextmanager
def criterion(number: int, title: str, budget: float):
    """Time the block, record a verdict line, and fail if the budget is exceeded."""
    info: dict = {}
    start = time.perf_counter()
    try:
        yield info
    except BaseException as e:
        elapsed = time.perf_counter() - start
        RESULTS.append(f"criterion {number} FAIL  {title} ({elapsed:.2f}s / {budget:g}s): {type(e).__name__}")
        raise
    elapsed = time.perf_counter() - start
    ok = elapsed < budget
    detail = info.get("detail", "")
    RESULTS.append(f"criterion {number} {'PASS' if ok else 'FAIL'}  {title} ({elapsed:.2f}s / {budget:g}s)"
                   + (f": {detail}" if detail else ""))
    assert ok, f"took {elapsed:.2f}s, budget {budget}s"


SUITE = ps.suite()


def test_criterion_1_definability_suite_and_mutations():
    with criterion(1, "definability derivations accepted, mutations rejected", 1.0) as info:
        names = ["bot_def", "or_def", "and_def", "exists_def",
                 "or_def_compound", "and_def_compound", "exists_def_param"]
        for name in names:
            assert check_proof(SUITE[name], Variant.IPC2), name
        rejected = 0
        for name in names:
            tree = SUITE[name]
            for path, rule, mutant in rule_mutants(tree):
                assert not check_proof(mutant, Variant.IPC2), (name, path, rule)
                rejected += 1
        assert rejected >= 20
        info["detail"] = f"{len(names)} derivations, {rejected} mutants rejected"


def test_criterion_2_soundness_on_principal_frames():
    with criterion(2, "suite sound on principal frames of posets with at most 3 elements", 30.0) as info:
        checked = 0
        for name, tree in SUITE.items():
            assert check_proof(tree, Variant.IPC2)
            claim = Implies(conj(tree.conclusion.context), tree.conclusion.goal)
            props = sorted(free_vars(claim))
            for poset in POSETS_3:
                frame = KripkeFrame.principal(poset)
                for v in valuations(poset, props):
                    assert eval_kripke(frame, v, claim) == frozenset(poset.elements), name
                    checked += 1
        info["detail"] = f"{len(SUITE)} derivations, {len(POSETS_3)} posets, {checked} evaluations"


def test_criterion_3_topological_and_kripke_semantics_agree():
    with criterion(3, "eval_topo = eval_kripke(principal), all formulas of size <= 7", 300.0) as info:
        cases = 0
        mismatches = []
        subsets = [(), ("p",), ("q",), ("p", "q")]
        # only the valuations of a formula's free propositions can change its value
        for poset in POSETS_3:
            frame = KripkeFrame.principal(poset)
            vals = {s: valuations(poset, s) for s in subsets}
            for n in range(1, 8):
                for f in formulas_of_size(n):
                    fv = free_vars(f)
                    group = vals[tuple(p for p in ("p", "q") if p in fv)]
                    for v in group:
                        if eval_topo(poset, v, f).members != eval_kripke(frame, v, f):
                            mismatches.append((poset, v, f))
                    cases += len(group)
        assert not mismatches, mismatches[:5]
        assert cases >= 10_000
        info["detail"] = f"{cases} cases"


def test_criterion_4_peirce_separates():
    with criterion(4, "Peirce non-top on the 2-chain, p -> p top everywhere", 10.0):
        c2 = chain(2)
        peirce = parse_formula("((p -> q) -> p) -> p")
        assert any(eval_topo(c2, v, peirce).mask != c2.full for v in valuations(c2, ("p", "q")))
        ident = parse_formula("p -> p")
        for poset in POSETS_3:
            for v in valuations(poset, ("p",)):
                assert eval_topo(poset, v, ident).mask == poset.full


def test_criterion_5_excluded_middle_refuted_over_the_interval():
    with criterion(5, "sandwich upper of desugared forall p. p \\/ ~p is not (0,1) at depth 2", 10.0) as info:
        phi = desugar(parse_formula("forall p. p \\/ ~p"))
        lower, upper = eval_sandwich(phi, {}, QuantifierPool.at_depth(2))
        assert upper != FULL
        assert F(1, 4) not in upper
        assert lower.issubset(upper)
        info["detail"] = f"upper = {upper}"


def test_criterion_6_translation():
    with criterion(6, "translation goldens, free-variable contract, rational mode", 5.0) as info:
        for name, text in [("bot", "bot"), ("p", "p"), ("p_implies_q", "p -> q"), ("forall_p_p", "forall p. p")]:
            assert emit(translate(desugar(parse_formula(text)))) + "\n" == golden(name), name
        assert emit(wrap_truth(translate(BOT), 0)) + "\n" == golden("wrapped_bot")
        corpus = core_corpus_100()
        assert len(corpus) == 100
        for phi in corpus:
            n = len(propositions_in_order(phi))
            star = translate(phi)
            assert free_set_vars(star) == {"T"} | {f"T{i}" for i in range(1, n + 1)}
            assert not free_node_vars(star)
        diffs_seen = 0
        for text in ("p", "p -> q", "forall p. p"):
            star = translate(desugar(parse_formula(text)))
            diffs = structural_diff(star, rational_mode(star), [])
            assert all((a.name, b.name, a.args) == ("U", "UQ", b.args) for a, b in diffs)
            assert len(diffs) == macro_count(star, "U")
            diffs_seen += len(diffs)
        info["detail"] = f"5 goldens, 100 formulas, {diffs_seen} U instances replaced"


def test_criterion_7_closed_set_corpus():
    with criterion(7, "closed-set encodings closed, mutants open, membership exact", 10.0) as info:
        assertions = 0
        for name, comps in CLOSED_CORPUS.items():
            S = encode_closed_set(comps)
            assert decide_closed(S), name
            assertions += 1
            for d in boundary_points(comps):
                assert not decide_closed(delete_companion_branch(S, companion_node(d))), (name, d)
                assertions += 1
            for q in GRID:
                assert member_R(S, q) == in_closed(comps, q), (name, q)
                assertions += 1
        assert assertions >= 500
        info["detail"] = f"{len(CLOSED_CORPUS)} sets, {assertions} assertions"


# (prefix, period) -> value of 0.prefix period period ..., computed by hand
R_OF_TABLE = [
    (("1", "0"), F(1, 2)), (("", "10"), F(2, 3)), (("", "01"), F(1, 3)), (("101", "0"), F(5, 8)),
    (("0", "1"), F(1, 2)), (("01", "0"), F(1, 4)), (("11", "0"), F(3, 4)), (("001", "0"), F(1, 8)),
    (("", "0011"), F(1, 5)), (("", "1100"), F(4, 5)), (("", "011"), F(3, 7)), (("", "001"), F(1, 7)),
    (("", "110"), F(6, 7)), (("1", "0011"), F(3, 5)), (("00", "1"), F(1, 4)), (("11", "01"), F(5, 6)),
    (("0", "011"), F(3, 14)), (("1011", "0"), F(11, 16)), (("", "1"), F(1)), (("", "0"), F(0)),
]


def test_criterion_8_numeric_kernels():
    with criterion(8, "r_of on 20 rationals, sat_U exclusion cases", 1.0):
        assert len(R_OF_TABLE) == 20
        for (u, v), value in R_OF_TABLE:
            assert r_of(UPP(u, v)) == value, (u, v)
        assert not sat_U(UPP("", "0"))
        for u in ("", "0", "1", "0110"):
            assert not sat_U(UPP(u, "1"))
            assert sat_U(UPP(u + "1", "0"))


MONOTONE_CORPUS = [
    "forall p. p", "forall p. p -> p", "forall p. p \\/ ~p", "forall p. ~~p -> p", "(forall p. p) -> q",
    "q -> forall p. p -> q", "forall p. ((p -> q) -> p) -> p", "~forall p. p \\/ ~p", "exists p. p",
    "forall p. (p -> q) \\/ (q -> p)", "q \\/ ~q", "q /\\ ~q", "forall p. (q -> p) -> ~q",
    "forall p. (p -> q) -> q", "exists p. ~p", "(forall p. p \\/ ~p) -> q", "forall p. p -> q",
    "forall p. p -> q -> p", "(forall p. p -> q) -> q", "~~q -> q",
]


def test_criterion_9_pool_monotonicity():
    with criterion(9, "sandwich bounds tighten with pool depth 1, 2, 3", 120.0) as info:
        assert len(MONOTONE_CORPUS) == 20
        v = {"q": DyadicOpenSet([(F(0), F(1, 2))])}
        pools = [QuantifierPool.at_depth(k) for k in (1, 2, 3)]
        for text in MONOTONE_CORPUS:
            phi = desugar(parse_formula(text))
            bounds = [eval_sandwich(phi, v, pool) for pool in pools]
            for lower, upper in bounds:
                assert lower.issubset(upper), text
            for (lo1, up1), (lo2, up2) in zip(bounds, bounds[1:]):
                assert up2.issubset(up1), text
                assert lo1.issubset(lo2), text
        info["detail"] = "20 formulas x depths 1, 2, 3"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
