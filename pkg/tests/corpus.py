"""Formula enumerators, strategies and fixed corpora shared by the tests."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from functools import lru_cache

from hypothesis import strategies as st

from ipc2s2s.s2s import Macro
from ipc2s2s.syntax import BOT, And, Exists, Forall, Formula, Implies, Or, Var
from ipc2s2s.topology import FinitePoset, _open_masks, small_posets

PROPS = ("p", "q")


@lru_cache(maxsize=None)
def formulas_of_size(n: int, props: tuple[str, ...] = PROPS, binders: tuple[str, ...] = PROPS,
                     core: bool = False) -> tuple[Formula, ...]:
    """Every formula with exactly ``n`` nodes.

    Atoms are the propositions and ``bot``; quantifiers bind names from
    ``binders``.  With ``core`` only implication and ``forall`` are used.
    """
    if n < 1:
        return ()
    if n == 1:
        return tuple(Var(p) for p in props) + (BOT,)
    out: list[Formula] = []
    quants = (Forall,) if core else (Forall, Exists)
    for q in quants:
        for v in binders:
            out.extend(q(v, b) for b in formulas_of_size(n - 1, props, binders, core))
    ops = (Implies,) if core else (Implies, And, Or)
    for i in range(1, n - 1):
        lefts = formulas_of_size(i, props, binders, core)
        rights = formulas_of_size(n - 1 - i, props, binders, core)
        for op in ops:
            out.extend(op(a, b) for a in lefts for b in rights)
    return tuple(out)


def formulas_up_to(n: int, **kw) -> list[Formula]:
    return [f for k in range(1, n + 1) for f in formulas_of_size(k, **kw)]


def _random_formula(rng: random.Random, n: int, props, binders, core: bool) -> Formula:
    """Uniform-ish random formula with exactly ``n`` nodes (rejection-free, by counts)."""
    if n == 1:
        return rng.choice([Var(p) for p in props] + [BOT])
    counts = [len(formulas_of_size(k, tuple(props), tuple(binders), core)) for k in range(n)]
    quants = (Forall,) if core else (Forall, Exists)
    ops = (Implies,) if core else (Implies, And, Or)
    weights = [len(quants) * len(binders) * counts[n - 1]]
    splits = list(range(1, n - 1))
    weights += [len(ops) * counts[i] * counts[n - 1 - i] for i in splits]
    pick = rng.choices(range(len(weights)), weights)[0]
    if pick == 0:
        return rng.choice(quants)(rng.choice(binders), _random_formula(rng, n - 1, props, binders, core))
    i = splits[pick - 1]
    return rng.choice(ops)(_random_formula(rng, i, props, binders, core),
                           _random_formula(rng, n - 1 - i, props, binders, core))


def sample_formulas(n: int, count: int, seed: int, props=PROPS, binders=PROPS, core=False) -> list[Formula]:
    rng = random.Random(seed)
    return [_random_formula(rng, n, props, binders, core) for _ in range(count)]


# -- hypothesis -------------------------------------------------------------

NAMES = st.sampled_from(["p", "q", "r", "p1", "q1"])


def formulas(names=NAMES, max_leaves: int = 12, core: bool = False):
    leaves = st.one_of(names.map(Var), st.just(BOT))

    def extend(children):
        parts = [st.builds(Implies, children, children), st.builds(Forall, names, children)]
        if not core:
            parts += [st.builds(And, children, children), st.builds(Or, children, children),
                      st.builds(Exists, names, children)]
        return st.one_of(*parts)

    return st.recursive(leaves, extend, max_leaves=max_leaves)


# -- finite semantics helpers -----------------------------------------------

POSETS_3 = small_posets(3)


def chain(n: int) -> FinitePoset:
    names = [f"c{i}" for i in range(n)]
    return FinitePoset(names, list(zip(names, names[1:])))


def valuations(poset: FinitePoset, props) -> list[dict[str, frozenset[str]]]:
    """Every assignment of upsets to ``props``."""
    opens = [poset.members(m) for m in _open_masks(poset)]
    return [dict(zip(props, combo)) for combo in itertools.product(opens, repeat=len(props))]


# -- closed subsets of (0,1) ------------------------------------------------

F = Fraction

CLOSED_CORPUS = {
    "empty": [],
    "point_half": [F(1, 2)],
    "point_3_8": [F(3, 8)],
    "one_interval": [(F(1, 4), F(1, 2))],
    "interval_and_point": [(F(1, 8), F(3, 8)), F(3, 4)],
    "two_intervals": [(F(1, 8), F(1, 4)), (F(5, 8), F(7, 8))],
    "three_intervals": [(F(1, 16), F(1, 8)), (F(3, 8), F(1, 2)), (F(3, 4), F(15, 16))],
    "near_edges": [(F(1, 64), F(1, 32)), (F(61, 64), F(63, 64))],
}

GRID = [F(i, 64) for i in range(1, 64)] + [F(1, 128), F(1, 3), F(2, 3), F(1, 5)]


def in_closed(comps, q: Fraction) -> bool:
    for c in comps:
        lo, hi = c if isinstance(c, tuple) else (c, c)
        if lo <= q <= hi:
            return True
    return False


def boundary_points(comps) -> list[Fraction]:
    """Every endpoint of every component, in order."""
    pts = set()
    for c in comps:
        lo, hi = c if isinstance(c, tuple) else (c, c)
        pts.update((lo, hi))
    return sorted(pts)


# -- translation helpers ----------------------------------------------------

def core_corpus_100() -> list[Formula]:
    """The first 100 core formulas over three propositions, by size."""
    out: list[Formula] = []
    for n in range(1, 5):
        out.extend(formulas_of_size(n, props=("p", "q", "r"), binders=("p", "q"), core=True))
    return out[:100]


def structural_diff(a, b, out: list) -> list:
    """Collect the pairs of differing subtrees, descending while the node kinds agree."""
    if a == b:
        return out
    if type(a) is Macro and type(b) is Macro and a.name == b.name:
        structural_diff(a.expansion, b.expansion, out)
    elif type(a) is type(b) and hasattr(a, "left"):
        structural_diff(a.left, b.left, out)
        structural_diff(a.right, b.right, out)
    elif type(a) is type(b) and hasattr(a, "body") and getattr(a, "var", None) == getattr(b, "var", None):
        structural_diff(a.body, b.body, out)
    else:
        out.append((a, b))
    return out
