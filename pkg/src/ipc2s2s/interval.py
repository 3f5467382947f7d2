"""Open subsets of (0,1) with dyadic endpoints.

Every set handled here is a finite union of open intervals whose endpoints
are multiples of ``2**-K`` for some ``K``.  At grid ``K`` the unit interval
splits into ``2*N - 1`` cells (``N = 2**K``)::

    cell 2i     the open gap  (i/N, (i+1)/N)     i = 0 .. N-1
    cell 2i+1   the point     (i+1)/N            i = 0 .. N-2

so a set built from such pieces is a bitmask and complement, union,
intersection and interior are exact bit operations.  The interior keeps
every gap and keeps a point only when both neighbouring gaps are present.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .syntax import And, Bottom, Formula, Implies, Or, Var, is_core, is_quantifier_free
from .topology import UnboundProposition

__all__ = [
    "DyadicOpenSet", "QuantifierPool", "IntervalError", "UndersugaredInput",
    "QuantifierEncountered", "dyadic", "dyadic_exponent", "set_union", "set_intersect",
    "impl_interior", "eval_exact", "eval_sandwich", "EMPTY", "FULL",
    "valuation_from_json", "format_fraction",
]


class IntervalError(ValueError):
    pass


class UndersugaredInput(ValueError):
    pass


class QuantifierEncountered(ValueError):
    pass


def dyadic_exponent(x: Fraction) -> int:
    d = x.denominator
    if d & (d - 1):
        raise IntervalError(f"{x} is not a dyadic rational")
    return d.bit_length() - 1


def dyadic(x: int | str | Fraction | tuple[int, int]) -> Fraction:
    """Parse ``x`` as an exact dyadic rational."""
    if isinstance(x, tuple):
        x = Fraction(*x)
    elif isinstance(x, float):
        raise IntervalError("floating point endpoints are not accepted")
    try:
        x = Fraction(x)
    except (ValueError, ZeroDivisionError) as e:
        raise IntervalError(str(e)) from None
    dyadic_exponent(x)
    return x


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Grid kernel

@dataclass(frozen=True)
class _Grid:
    k: int

    @property
    def n(self) -> int:
        return 1 << self.k

    @property
    def cells(self) -> int:
        return 2 * self.n - 1

    @property
    def full(self) -> int:
        return (1 << self.cells) - 1

    @property
    def gaps(self) -> int:
        return _even_bits(self.cells)

    def interval(self, lo: Fraction, hi: Fraction) -> int:
        a, b = lo * self.n, hi * self.n
        if a.denominator != 1 or b.denominator != 1:
            raise IntervalError(f"({lo}, {hi}) is finer than grid 2^-{self.k}")
        a, b = int(a), int(b)
        # cells 2a .. 2b-2
        return ((1 << (2 * b - 1)) - 1) ^ ((1 << (2 * a)) - 1)

    def encode(self, s: "DyadicOpenSet") -> int:
        m = 0
        for lo, hi in s.intervals:
            m |= self.interval(lo, hi)
        return m

    def interior(self, m: int) -> int:
        g = self.gaps
        return (m & g) | (m & ~g & (m << 1) & (m >> 1))

    def impl(self, a: int, b: int) -> int:
        return self.interior((self.full ^ a) | b)

    def decode(self, m: int) -> "DyadicOpenSet":
        out = []
        n = self.n
        i, cells = 0, self.cells
        while i < cells:
            if m >> i & 1:
                j = i
                while j + 1 < cells and m >> (j + 1) & 1:
                    j += 1
                if i % 2 or j % 2:
                    raise IntervalError("mask is not open")
                out.append((Fraction(i // 2, n), Fraction(j // 2 + 1, n)))
                i = j + 1
            else:
                i += 1
        return DyadicOpenSet._trusted(tuple(out))


@lru_cache(maxsize=None)
def _even_bits(width: int) -> int:
    m = 0
    for i in range(0, width, 2):
        m |= 1 << i
    return m


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DyadicOpenSet:
    """Normalized finite union of open intervals inside (0,1).

    Intervals are sorted and pairwise disjoint.  Two intervals may share an
    endpoint, which is then excluded from the set: ``(0,1/2) u (1/2,1)``.
    """

    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __init__(self, intervals: Iterable[Sequence[Any]] = ()):
        pieces = []
        for piece in intervals:
            lo, hi = (dyadic(x) for x in piece)
            if not (0 <= lo < hi <= 1):
                raise IntervalError(f"({lo}, {hi}) is not a nonempty interval inside (0,1)")
            pieces.append((lo, hi))
        if pieces:
            grid = _Grid(max(dyadic_exponent(x) for p in pieces for x in p))
            m = 0
            for lo, hi in pieces:
                m |= grid.interval(lo, hi)
            normalized = grid.decode(grid.interior(m)).intervals
        else:
            normalized = ()
        object.__setattr__(self, "intervals", normalized)

    @classmethod
    def _trusted(cls, intervals: tuple) -> "DyadicOpenSet":
        obj = object.__new__(cls)
        object.__setattr__(obj, "intervals", intervals)
        return obj

    @property
    def exponent(self) -> int:
        return max((dyadic_exponent(x) for p in self.intervals for x in p), default=0)

    def is_empty(self) -> bool:
        return not self.intervals

    def __contains__(self, x) -> bool:
        x = Fraction(x)
        return any(lo < x < hi for lo, hi in self.intervals)

    def issubset(self, other: "DyadicOpenSet") -> bool:
        return set_intersect(self, other) == self

    def __le__(self, other: "DyadicOpenSet") -> bool:
        return self.issubset(other)

    def __str__(self) -> str:
        if not self.intervals:
            return "empty"
        return " U ".join(f"({format_fraction(lo)},{format_fraction(hi)})" for lo, hi in self.intervals)

    def to_json(self) -> list:
        return [[[lo.numerator, lo.denominator], [hi.numerator, hi.denominator]]
                for lo, hi in self.intervals]


EMPTY = DyadicOpenSet()
FULL = DyadicOpenSet([(0, 1)])


def _grid_for(*sets: DyadicOpenSet, at_least: int = 0) -> _Grid:
    return _Grid(max([at_least] + [s.exponent for s in sets]))


def set_union(a: DyadicOpenSet, b: DyadicOpenSet) -> DyadicOpenSet:
    g = _grid_for(a, b)
    return g.decode(g.encode(a) | g.encode(b))


def set_intersect(a: DyadicOpenSet, b: DyadicOpenSet) -> DyadicOpenSet:
    g = _grid_for(a, b)
    return g.decode(g.encode(a) & g.encode(b))


def impl_interior(a: DyadicOpenSet, b: DyadicOpenSet) -> DyadicOpenSet:
    """``int(((0,1) minus a) u b)``."""
    g = _grid_for(a, b)
    return g.decode(g.impl(g.encode(a), g.encode(b)))


def eval_exact(phi: Formula, valuation: Mapping[str, DyadicOpenSet]) -> DyadicOpenSet:
    """Exact value of a quantifier-free formula in the opens of (0,1)."""
    if not is_quantifier_free(phi):
        raise QuantifierEncountered("eval_exact needs a quantifier-free formula")
    g = _grid_for(*valuation.values())
    env = {p: g.encode(s) for p, s in valuation.items()}

    def go(f: Formula) -> int:
        t = type(f)
        if t is Var:
            try:
                return env[f.name]
            except KeyError:
                raise UnboundProposition(f.name) from None
        if t is Bottom:
            return 0
        if t is And:
            return go(f.left) & go(f.right)
        if t is Or:
            return go(f.left) | go(f.right)
        if t is Implies:
            return g.impl(go(f.left), go(f.right))
        raise TypeError(f"not a formula: {f!r}")

    return g.decode(go(phi))


# ---------------------------------------------------------------------------
# Quantifier pools and two-sided approximation

def _open_masks_at(k: int) -> Iterator[int]:
    """Every open grid-``k`` mask, i.e. every union of intervals (i/2^k, j/2^k)."""
    n = 1 << k

    def rec(i: int, prev_gap: bool, acc: int):
        if i == n:
            yield acc
            return
        # gap i sits at cell 2i, the point before it at cell 2i-1
        yield from rec(i + 1, False, acc)
        with_gap = acc | 1 << (2 * i)
        yield from rec(i + 1, True, with_gap)
        if prev_gap:
            yield from rec(i + 1, True, with_gap | 1 << (2 * i - 1))

    return rec(0, False, 0)


@dataclass(frozen=True)
class QuantifierPool:
    """Finite stand-in for the opens of (0,1): every union of depth-``k`` elementary intervals.

    The punctured sets ``(0,d) u (d,1)`` for ``d`` of denominator at most
    ``2**k`` are added explicitly; they are already unions of elementary
    intervals, so this only documents that they are present.
    """

    depth: int
    opens: tuple[DyadicOpenSet, ...]

    @classmethod
    @lru_cache(maxsize=8)
    def at_depth(cls, k: int) -> "QuantifierPool":
        if k < 1:
            raise ValueError("pool depth must be positive")
        grid = _Grid(k)
        masks = set(_open_masks_at(k))
        for i in range(1, grid.n):
            d = Fraction(i, grid.n)
            masks.add(grid.encode(DyadicOpenSet([(0, d), (d, 1)])))
        return cls(k, tuple(grid.decode(m) for m in sorted(masks)))

    def __len__(self) -> int:
        return len(self.opens)


def eval_sandwich(phi: Formula, valuation: Mapping[str, DyadicOpenSet],
                  pool: QuantifierPool) -> tuple[DyadicOpenSet, DyadicOpenSet]:
    """``(lower, upper)`` with ``lower <= value of phi in (0,1) <= upper``.

    ``phi`` must use only variables, bot, implication and universal
    quantification.  Universal quantifiers are bounded above by
    intersecting over ``pool`` and below by the empty set.
    """
    if not is_core(phi):
        raise UndersugaredInput("eval_sandwich needs a desugared formula (->, forall, bot, variables)")
    g = _grid_for(*valuation.values(), at_least=pool.depth)
    pool_masks = tuple(g.encode(s) for s in pool.opens)
    names = sorted(valuation)
    slots = {p: i for i, p in enumerate(names)}
    env = [g.encode(valuation[p]) for p in names]
    lower, upper = _compile(phi, slots, len(env), g, pool_masks)
    return g.decode(lower(env)), g.decode(upper(env))


def _compile(f: Formula, slots: dict[str, int], depth: int, g: _Grid, pool: tuple[int, ...]):
    """Closures ``(lower, upper)`` over a slot-indexed environment list.

    A bound variable takes the slot ``depth``, one past every enclosing binder.
    """
    t = type(f)
    if t is Var:
        if f.name not in slots:
            raise UnboundProposition(f.name)
        i = slots[f.name]

        def var(env):
            return env[i]
        return var, var
    if t is Bottom:
        def zero(env):
            return 0
        return zero, zero
    if t is Implies:
        lo_a, up_a = _compile(f.left, slots, depth, g, pool)
        lo_b, up_b = _compile(f.right, slots, depth, g, pool)
        full, gaps = g.full, g.gaps

        def impl(a, b):
            m = (full ^ a) | b
            return (m & gaps) | (m & ~gaps & (m << 1) & (m >> 1))

        def lower(env):
            return impl(up_a(env), lo_b(env))

        def upper(env):
            return impl(lo_a(env), up_b(env))
        return lower, upper
    # Forall: the lower bound is always empty
    inner = dict(slots)
    inner[f.var] = depth
    _, up_body = _compile(f.body, inner, depth + 1, g, pool)
    full = g.full

    def lower_forall(env):
        return 0

    def upper_forall(env):
        env = env[:depth] + [0]
        acc = full
        for a in pool:
            env[depth] = a
            acc &= up_body(env)
            if not acc:
                return 0
        return g.interior(acc)
    return lower_forall, upper_forall


# ---------------------------------------------------------------------------

def valuation_from_json(data: Any) -> dict[str, DyadicOpenSet]:
    """``{prop: [[[l_num, l_den], [r_num, r_den]], ...]}``"""
    if isinstance(data, str):
        data = json.loads(data)
    if not isinstance(data, dict):
        raise IntervalError("valuation must be an object")
    out = {}
    for prop, pieces in data.items():
        try:
            out[prop] = DyadicOpenSet([(tuple(lo), tuple(hi)) for lo, hi in pieces])
        except (TypeError, ValueError) as e:
            raise IntervalError(f"value of {prop}: {e}") from None
    return out
