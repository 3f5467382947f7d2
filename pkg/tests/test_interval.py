"""Open sets of (0,1) with dyadic endpoints, exact and approximate evaluation."""

import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import formulas
from ipc2s2s.interval import (
    EMPTY, FULL, DyadicOpenSet, IntervalError, QuantifierEncountered, QuantifierPool,
    UndersugaredInput, dyadic, eval_exact, eval_sandwich, impl_interior, set_intersect, set_union,
    valuation_from_json,
)
from ipc2s2s.syntax import Implies, Var, desugar, is_quantifier_free, parse_formula
from ipc2s2s.topology import UnboundProposition

P = parse_formula


def S(*pieces):
    return DyadicOpenSet([(F(lo), F(hi)) for lo, hi in pieces])


HALVES = S(("0", "1/2"), ("1/2", "1"))


# -- the algebra ----------------------------------------------------------------

def test_union_examples():
    assert set_union(S(("0", "1/2")), S(("1/2", "1"))).intervals == ((0, F(1, 2)), (F(1, 2), 1))
    assert set_union(S(("0", "1/2")), S(("1/4", "1"))) == FULL
    a = S(("1/8", "3/8"))
    assert set_union(EMPTY, a) == a


def test_intersection_examples():
    assert set_intersect(S(("0", "1/2")), S(("1/4", "1"))) == S(("1/4", "1/2"))
    assert set_intersect(HALVES, EMPTY) == EMPTY
    assert set_intersect(S(("0", "1/2")), S(("1/2", "1"))) == EMPTY


def test_implication_examples():
    assert impl_interior(FULL, EMPTY) == EMPTY
    assert impl_interior(HALVES, EMPTY) == EMPTY
    assert impl_interior(EMPTY, EMPTY) == FULL
    assert impl_interior(S(("0", "1/2")), EMPTY) == S(("1/2", "1"))
    # the complement (1/4,1) minus (1/2,3/4) meets b=(1/2,3/4) in a dense way
    assert impl_interior(S(("0", "1/4"), ("1/2", "3/4")), S(("1/2", "3/4"))) == S(("1/4", "1"))


def test_normalization():
    assert S(("1/4", "1/2"), ("1/8", "3/8")) == S(("1/8", "1/2"))
    assert S(("1/2", "1"), ("0", "1/2")).intervals == HALVES.intervals
    assert S(("0", "1/4"), ("1/4", "1/2"), ("1/8", "3/8")) == S(("0", "1/2"))
    assert str(HALVES) == "(0,1/2) U (1/2,1)"
    assert str(EMPTY) == "empty"


def test_construction_errors():
    with pytest.raises(IntervalError):
        DyadicOpenSet([(F(1, 3), F(1, 2))])
    with pytest.raises(IntervalError):
        DyadicOpenSet([(F(1, 2), F(1, 2))])
    with pytest.raises(IntervalError):
        DyadicOpenSet([(F(-1, 2), F(1, 2))])
    assert dyadic("3/8") == dyadic((3, 8)) == F(3, 8)


def test_membership():
    assert F(1, 2) not in HALVES
    assert F(1, 3) in HALVES
    assert 0 not in FULL and 1 not in FULL


def _dyadic_sets(k):
    n = 1 << k
    ends = st.integers(0, n)
    piece = st.tuples(ends, ends).filter(lambda t: t[0] < t[1]).map(lambda t: (F(t[0], n), F(t[1], n)))
    return st.lists(piece, max_size=4).map(DyadicOpenSet)


SETS = st.integers(1, 4).flatmap(_dyadic_sets)
PROBES = [F(i, 64) for i in range(1, 64)] + [F(1, 3)]


@given(SETS, SETS)
def test_union_and_intersection_pointwise(a, b):
    for x in PROBES:
        assert (x in set_union(a, b)) == (x in a or x in b)
        assert (x in set_intersect(a, b)) == (x in a and x in b)


@given(SETS)
def test_normalized_form(a):
    ivs = a.intervals
    assert list(ivs) == sorted(ivs)
    for (l1, h1), (l2, h2) in zip(ivs, ivs[1:]):
        assert h1 <= l2
    assert DyadicOpenSet(ivs) == a


@given(SETS, SETS, SETS)
def test_heyting_adjunction(a, b, c):
    # c ∩ a ⊆ b  iff  c ⊆ (a ⇒ b)
    assert (set_intersect(c, a) <= b) == (c <= impl_interior(a, b))


# -- exact evaluation -------------------------------------------------------------

def test_eval_exact_examples():
    assert eval_exact(P("~~p"), {"p": HALVES}) == FULL
    assert eval_exact(P("p \\/ ~p"), {"p": S(("0", "1/2"))}) == HALVES
    for v in (EMPTY, HALVES, S(("1/8", "5/8"))):
        assert eval_exact(P("p -> p"), {"p": v}) == FULL


def test_eval_exact_errors():
    with pytest.raises(QuantifierEncountered):
        eval_exact(P("forall p. p"), {})
    with pytest.raises(UnboundProposition):
        eval_exact(P("p -> q"), {"p": FULL})


# -- quantifier pools --------------------------------------------------------------

def _brute_force_pool_size(k):
    """Opens on the cells gap, point, gap, ..., point, gap of the grid-k partition."""
    cells = 2 * (1 << k) - 1
    count = 0
    for bits in itertools.product((0, 1), repeat=cells):
        points_ok = all(bits[i - 1] and bits[i + 1] for i in range(1, cells, 2) if bits[i])
        count += points_ok
    return count


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pool_sizes(k):
    assert len(QuantifierPool.at_depth(k)) == _brute_force_pool_size(k)
    assert [len(QuantifierPool.at_depth(i)) for i in (1, 2, 3)] == [5, 34, 1597]


def test_pool_contents():
    pool = set(QuantifierPool.at_depth(2).opens)
    assert EMPTY in pool and FULL in pool
    for d in (F(1, 4), F(1, 2), F(3, 4)):
        assert DyadicOpenSet([(0, d), (d, 1)]) in pool
    for a, b in itertools.product(pool, repeat=2):
        assert set_union(a, b) in pool
    with pytest.raises(ValueError):
        QuantifierPool.at_depth(0)


def test_pools_grow_with_depth():
    assert set(QuantifierPool.at_depth(1).opens) <= set(QuantifierPool.at_depth(2).opens)
    assert set(QuantifierPool.at_depth(2).opens) <= set(QuantifierPool.at_depth(3).opens)


# -- sandwich -----------------------------------------------------------------------

POOL2 = QuantifierPool.at_depth(2)
VALUES = [EMPTY, FULL, HALVES, S(("0", "1/2")), S(("1/4", "3/4")), S(("1/8", "1/4"), ("1/2", "1"))]


def test_sandwich_forall_p_p():
    assert eval_sandwich(P("forall p. p"), {}, POOL2) == (EMPTY, EMPTY)


def test_sandwich_refutes_excluded_middle():
    lower, upper = eval_sandwich(desugar(P("forall p. p \\/ ~p")), {}, POOL2)
    assert upper != FULL
    assert F(1, 4) not in upper
    assert upper <= S(("0", "1/4"), ("1/4", "1"))
    assert lower <= upper


def test_sandwich_rejects_sugar():
    with pytest.raises(UndersugaredInput):
        eval_sandwich(P("p \\/ q"), {"p": FULL, "q": FULL}, POOL2)


def _impl_fragment(draw_names=("p", "q")):
    return formulas(names=st.sampled_from(draw_names), max_leaves=6, core=True).filter(is_quantifier_free)


@given(_impl_fragment(), st.sampled_from(VALUES), st.sampled_from(VALUES))
def test_sandwich_is_exact_without_quantifiers(f, a, b):
    v = {"p": a, "q": b}
    lower, upper = eval_sandwich(f, v, POOL2)
    assert lower == upper == eval_exact(f, v)


@settings(max_examples=60, deadline=None)
@given(formulas(names=st.sampled_from(["p", "q"]), max_leaves=5).filter(is_quantifier_free),
       st.sampled_from(VALUES), st.sampled_from(VALUES))
def test_sandwich_brackets_exact_value_after_desugaring(f, a, b):
    v = {"p": a, "q": b}
    exact = eval_exact(f, v)
    lower, upper = eval_sandwich(desugar(f), v, POOL2)
    assert lower <= exact <= upper


@settings(max_examples=60, deadline=None)
@given(formulas(names=st.sampled_from(["p", "q"]), max_leaves=4, core=True),
       st.sampled_from(VALUES), st.sampled_from(VALUES))
def test_sandwich_lower_below_upper(f, a, b):
    lower, upper = eval_sandwich(f, {"p": a, "q": b}, POOL2)
    assert lower <= upper


def test_sandwich_upper_of_valid_formula_is_top():
    f = P("forall p. p -> p")
    assert eval_sandwich(f, {}, POOL2)[1] == FULL
    g = Implies(Var("q"), Var("q"))
    assert eval_sandwich(g, {"q": HALVES}, POOL2) == (FULL, FULL)


# -- JSON ------------------------------------------------------------------------------

def test_valuation_json():
    v = valuation_from_json('{"p": [[[0, 1], [1, 2]], [[1, 2], [1, 1]]], "q": []}')
    assert v == {"p": HALVES, "q": EMPTY}
    assert valuation_from_json({"p": [a.to_json()[0] for a in [HALVES]]})["p"] == S(("0", "1/2"))
    with pytest.raises(IntervalError):
        valuation_from_json('{"p": [[[1, 3], [1, 2]]]}')
    with pytest.raises(IntervalError):
        valuation_from_json("[1, 2]")
