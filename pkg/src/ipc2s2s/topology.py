"""Finite Alexandrov topologies: the opens of a finite poset are its upsets.

Sets of elements are bitmasks internally (bit ``i`` is ``elements[i]``);
:class:`OpenSet` is the public wrapper.  Quantifiers range over every open,
so this is the principal algebraic semantics at finite scale.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping

from .syntax import And, Bottom, Exists, Forall, Formula, Implies, Or, Var

__all__ = [
    "FinitePoset", "OpenSet", "PosetError", "CarrierMismatch", "UnboundProposition",
    "BoundExceeded", "enumerate_opens", "heyting_impl", "interior", "eval_topo",
    "poset_from_json", "small_posets", "DEFAULT_BOUND",
]

DEFAULT_BOUND = 12


class PosetError(ValueError):
    pass


class CarrierMismatch(ValueError):
    pass


class UnboundProposition(KeyError):
    pass


class BoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class FinitePoset:
    """A finite partial order.

    ``leq`` may be any generating relation; it is closed reflexively and
    transitively on construction, and a cycle raises :class:`PosetError`.
    """

    elements: tuple[str, ...]
    leq: frozenset[tuple[str, str]]

    def __init__(self, elements: Iterable[str], leq: Iterable[tuple[str, str]] = ()):
        elements = tuple(elements)
        if len(set(elements)) != len(elements):
            raise PosetError("duplicate elements")
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        up = [1 << i for i in range(n)]
        for a, b in leq:
            if a not in index or b not in index:
                raise PosetError(f"order mentions unknown element in ({a}, {b})")
            up[index[a]] |= 1 << index[b]
        # transitive closure, Warshall style on rows
        for k in range(n):
            for i in range(n):
                if up[i] >> k & 1:
                    up[i] |= up[k]
        for i in range(n):
            for j in range(i + 1, n):
                if up[i] >> j & 1 and up[j] >> i & 1:
                    raise PosetError(f"{elements[i]} and {elements[j]} are mutually below each other")
        closed = frozenset((elements[i], elements[j]) for i in range(n) for j in range(n) if up[i] >> j & 1)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "leq", closed)

    @cached_property
    def index(self) -> dict[str, int]:
        return {e: i for i, e in enumerate(self.elements)}

    @cached_property
    def up(self) -> tuple[int, ...]:
        """``up[i]`` is the mask of elements >= element ``i``."""
        idx = self.index
        rows = [0] * len(self.elements)
        for a, b in self.leq:
            rows[idx[a]] |= 1 << idx[b]
        return tuple(rows)

    @cached_property
    def full(self) -> int:
        return (1 << len(self.elements)) - 1

    def le(self, a: str, b: str) -> bool:
        return (a, b) in self.leq

    def mask(self, members: Iterable[str]) -> int:
        m = 0
        for x in members:
            try:
                m |= 1 << self.index[x]
            except KeyError:
                raise PosetError(f"unknown element {x!r}") from None
        return m

    def members(self, mask: int) -> frozenset[str]:
        return frozenset(e for i, e in enumerate(self.elements) if mask >> i & 1)

    def is_upset(self, mask: int) -> bool:
        if len(self.elements) <= 10 and 0 <= mask <= self.full:
            return self._interior_table[mask] == mask
        return all(self.up[i] & ~mask == 0 for i in range(len(self.elements)) if mask >> i & 1)

    def interior(self, mask: int) -> int:
        """Largest upset contained in ``mask``."""
        if len(self.elements) <= 10:
            return self._interior_table[mask & self.full]
        return self._interior_scan(mask)

    def _interior_scan(self, mask: int) -> int:
        out = 0
        for i, row in enumerate(self.up):
            if row & ~mask == 0:
                out |= 1 << i
        return out

    @cached_property
    def _open_masks(self) -> tuple[int, ...]:
        """Every upset as a bitmask, ascending."""
        return tuple(m for m in range(self.full + 1) if self.is_upset(m))

    @cached_property
    def _interior_table(self) -> tuple[int, ...]:
        return tuple(self._interior_scan(m) for m in range(self.full + 1))

    def to_json(self) -> dict:
        pairs = sorted((a, b) for a, b in self.leq if a != b)
        return {"elements": list(self.elements), "leq": [list(p) for p in pairs]}


@dataclass(frozen=True)
class OpenSet:
    poset: FinitePoset
    mask: int

    def __post_init__(self):
        if not self.poset.is_upset(self.mask):
            raise PosetError(f"{sorted(self.members)} is not upward closed")

    @classmethod
    def of(cls, poset: FinitePoset, members: Iterable[str]) -> "OpenSet":
        return cls(poset, poset.mask(members))

    @property
    def members(self) -> frozenset[str]:
        return self.poset.members(self.mask)

    def __str__(self) -> str:
        return "{" + ", ".join(e for e in self.poset.elements if e in self.members) + "}"


_MISSING = object()


def _open_masks(poset: FinitePoset) -> tuple[int, ...]:
    return poset._open_masks


def enumerate_opens(poset: FinitePoset, bound: int = DEFAULT_BOUND) -> list[OpenSet]:
    """All upsets, ordered by their bitmask value."""
    if len(poset.elements) > bound:
        raise BoundExceeded(f"{len(poset.elements)} elements exceeds the bound {bound}")
    return [OpenSet(poset, m) for m in _open_masks(poset)]


def _same_carrier(*sets: OpenSet) -> FinitePoset:
    poset = sets[0].poset
    for s in sets[1:]:
        if s.poset != poset:
            raise CarrierMismatch("open sets live on different posets")
    return poset


def interior(poset: FinitePoset, members: Iterable[str]) -> OpenSet:
    return OpenSet(poset, poset.interior(poset.mask(members)))


def heyting_impl(a: OpenSet, b: OpenSet) -> OpenSet:
    """Relative pseudo-complement: the largest open ``c`` with ``c & a <= b``."""
    poset = _same_carrier(a, b)
    return OpenSet(poset, poset.interior((poset.full & ~a.mask) | b.mask))


def eval_topo(poset: FinitePoset, valuation: Mapping[str, Any], phi: Formula) -> OpenSet:
    """Value of ``phi`` with quantifiers over all opens of ``poset``.

    Valuation values may be :class:`OpenSet` instances on the same poset or
    iterables of element names (which must be upward closed).
    """
    env = _valuation_masks(poset, valuation)
    return OpenSet(poset, _eval(poset, _open_masks(poset), env, phi, ({}, body_scopes(phi))))


def _valuation_masks(poset: FinitePoset, valuation: Mapping[str, Any]) -> dict[str, int]:
    env = {}
    for p, val in valuation.items():
        if isinstance(val, OpenSet):
            if val.poset != poset:
                raise CarrierMismatch(f"value of {p} lives on a different poset")
            env[p] = val.mask
        else:
            m = poset.mask(val)
            if not poset.is_upset(m):
                raise PosetError(f"value of {p} is not upward closed")
            env[p] = m
    return env


_SCOPES: dict[int, tuple[Formula, dict[int, tuple[str, ...]]]] = {}


def body_scopes(phi: Formula) -> dict[int, tuple[str, ...]]:
    """Sorted free variables of every quantifier body in ``phi``, keyed by node identity.

    Valid while ``phi`` is alive; used to memoize bodies during one evaluation.
    Recent results are cached, holding ``phi`` so that its identity stays unique.
    """
    hit = _SCOPES.get(id(phi))
    if hit is not None and hit[0] is phi:
        return hit[1]
    out: dict[int, tuple[str, ...]] = {}

    def walk(f: Formula) -> frozenset[str]:
        t = type(f)
        if t is Var:
            return frozenset((f.name,))
        if t is Bottom:
            return frozenset()
        if t is Forall or t is Exists:
            inner = walk(f.body)
            out[id(f.body)] = tuple(sorted(inner))
            return inner - {f.var}
        return walk(f.left) | walk(f.right)

    walk(phi)
    if len(_SCOPES) >= 256:
        _SCOPES.clear()
    _SCOPES[id(phi)] = (phi, out)
    return out


def memo_key(body: Formula, names: tuple[str, ...], env: dict[str, int]) -> tuple:
    # bodies live as long as the formula being evaluated, so identity is a safe key
    if len(names) == 1:
        return (id(body), env.get(names[0]))
    return (id(body), *map(env.get, names))


def _eval(poset: FinitePoset, opens: tuple[int, ...], env: dict[str, int], f: Formula,
          memo: tuple[dict, dict]) -> int:
    t = type(f)
    if t is Var:
        try:
            return env[f.name]
        except KeyError:
            raise UnboundProposition(f.name) from None
    if t is Bottom:
        return 0
    if t is And:
        return _eval(poset, opens, env, f.left, memo) & _eval(poset, opens, env, f.right, memo)
    if t is Or:
        return _eval(poset, opens, env, f.left, memo) | _eval(poset, opens, env, f.right, memo)
    if t is Implies:
        a = _eval(poset, opens, env, f.left, memo)
        b = _eval(poset, opens, env, f.right, memo)
        return poset.interior((poset.full & ~a) | b)
    if t is Forall or t is Exists:
        body = f.body
        cache, scopes = memo
        names = scopes[id(body)]
        if f.var not in names:
            # vacuous binder; ``opens`` is never empty since it contains the empty set
            return _eval(poset, opens, env, body, memo)
        saved = env.get(f.var, _MISSING)

        def inst(a: int) -> int:
            env[f.var] = a
            key = memo_key(body, names, env)
            v = cache.get(key)
            if v is None:
                v = cache[key] = _eval(poset, opens, env, body, memo)
            return v

        try:
            if t is Forall:
                acc = poset.full
                for a in opens:
                    acc &= inst(a)
                    if not acc:
                        break
                # intersections of upsets are upsets; interior kept for fidelity
                return poset.interior(acc)
            acc = 0
            for a in opens:
                acc |= inst(a)
                if acc == poset.full:
                    break
            return acc
        finally:
            if saved is _MISSING:
                env.pop(f.var, None)
            else:
                env[f.var] = saved
    raise TypeError(f"not a formula: {f!r}")


def poset_from_json(data: Any) -> FinitePoset:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        return FinitePoset(data["elements"], [tuple(p) for p in data.get("leq", [])])
    except (KeyError, TypeError, ValueError) as e:
        raise PosetError(f"malformed poset: {e}") from None


def small_posets(max_size: int) -> list[FinitePoset]:
    """One representative of every isomorphism class of posets with 1..max_size elements."""
    out = []
    for n in range(1, max_size + 1):
        names = tuple(f"c{i}" for i in range(n))
        pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
        seen = set()
        for bits in range(1 << len(pairs)):
            rel = {pairs[k] for k in range(len(pairs)) if bits >> k & 1}
            if any((j, i) in rel for i, j in rel):
                continue
            if any((i, k) not in rel for i, j in rel for j2, k in rel if j == j2 and i != k):
                continue
            canon = min(
                tuple(sorted((perm[i], perm[j]) for i, j in rel))
                for perm in itertools.permutations(range(n))
            )
            if canon in seen:
                continue
            seen.add(canon)
            out.append(FinitePoset(names, [(names[i], names[j]) for i, j in canon]))
    return out
