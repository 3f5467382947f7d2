"""Second-order Kripke semantics over finite frames.

A frame is a finite poset of worlds together with, for every world ``c``, a
family ``D_c`` of upsets over which quantifiers at ``c`` range.  Forcing is
persistent: universal quantification at ``c`` looks at every ``c' >= c``
and every ``a`` in ``D_c'``; existential quantification at ``c`` picks
``a`` from ``D_c``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping

from .syntax import And, Bottom, Exists, Forall, Formula, Implies, Or, Var
from .topology import FinitePoset, PosetError, UnboundProposition, _open_masks, body_scopes, memo_key

__all__ = [
    "KripkeFrame", "FrameError", "ValuationError", "eval_kripke", "is_principal",
    "comprehension_closed", "frame_from_json",
]


class FrameError(ValueError):
    pass


class ValuationError(ValueError):
    pass


@dataclass(frozen=True)
class KripkeFrame:
    poset: FinitePoset
    domains: tuple[frozenset[int], ...]   # indexed like poset.elements, members are masks

    def __post_init__(self):
        P = self.poset
        if len(self.domains) != len(P.elements):
            raise FrameError("one domain per world required")
        for i, dom in enumerate(self.domains):
            for m in dom:
                if not P.is_upset(m):
                    raise FrameError(f"domain of {P.elements[i]} contains a set that is not upward closed: "
                                     f"{sorted(P.members(m))}")
        for i, row in enumerate(P.up):
            for j in range(len(P.elements)):
                if row >> j & 1 and not self.domains[i] <= self.domains[j]:
                    raise FrameError(f"domains must grow along the order: "
                                     f"D_{P.elements[i]} is not contained in D_{P.elements[j]}")

    @classmethod
    def build(cls, poset: FinitePoset, domains: Mapping[str, Iterable[Iterable[str]]]) -> "KripkeFrame":
        missing = set(poset.elements) - set(domains)
        if missing:
            raise FrameError(f"no domain for worlds {sorted(missing)}")
        doms = tuple(frozenset(poset.mask(x) for x in domains[w]) for w in poset.elements)
        return cls(poset, doms)

    @classmethod
    def principal(cls, poset: FinitePoset) -> "KripkeFrame":
        every = frozenset(_open_masks(poset))
        return cls(poset, tuple(every for _ in poset.elements))

    @classmethod
    def constant(cls, poset: FinitePoset, family: Iterable[Iterable[str]]) -> "KripkeFrame":
        dom = frozenset(poset.mask(x) for x in family)
        return cls(poset, tuple(dom for _ in poset.elements))

    @property
    def worlds(self) -> tuple[str, ...]:
        return self.poset.elements

    @cached_property
    def _all_domain_sets(self) -> tuple[int, ...]:
        out = set()
        for d in self.domains:
            out |= d
        return tuple(sorted(out))

    @cached_property
    def _holders(self) -> dict[int, int]:
        out = dict.fromkeys(self._all_domain_sets, 0)
        for j, dom in enumerate(self.domains):
            for a in dom:
                out[a] |= 1 << j
        return out

    @cached_property
    def _inhabited(self) -> int:
        """Worlds with a nonempty domain."""
        out = 0
        for j, dom in enumerate(self.domains):
            if dom:
                out |= 1 << j
        return out

    def domain(self, world: str) -> frozenset[frozenset[str]]:
        return frozenset(self.poset.members(m) for m in self.domains[self.poset.index[world]])


_MISSING = object()


def is_principal(frame: KripkeFrame) -> bool:
    every = frozenset(_open_masks(frame.poset))
    return all(d == every for d in frame.domains)


def eval_kripke(frame: KripkeFrame, valuation: Mapping[str, Iterable[str]], phi: Formula) -> frozenset[str]:
    """Set of worlds forcing ``phi``."""
    env = _masks(frame.poset, valuation)
    return frame.poset.members(_force(frame, env, phi, ({}, body_scopes(phi))))


def _masks(poset: FinitePoset, valuation: Mapping[str, Iterable[str]]) -> dict[str, int]:
    env = {}
    for p, worlds in valuation.items():
        try:
            m = poset.mask(worlds)
        except PosetError as e:
            raise ValuationError(f"value of {p}: {e}") from None
        if not poset.is_upset(m):
            raise ValuationError(f"value of {p} is not upward closed")
        env[p] = m
    return env


def _force(frame: KripkeFrame, env: dict[str, int], f: Formula, memo: tuple[dict, dict]) -> int:
    P = frame.poset
    t = type(f)
    if t is Var:
        try:
            return env[f.name]
        except KeyError:
            raise UnboundProposition(f.name) from None
    if t is Bottom:
        return 0
    if t is And:
        return _force(frame, env, f.left, memo) & _force(frame, env, f.right, memo)
    if t is Or:
        return _force(frame, env, f.left, memo) | _force(frame, env, f.right, memo)
    if t is Implies:
        a = _force(frame, env, f.left, memo)
        b = _force(frame, env, f.right, memo)
        # c forces a -> b iff every c' >= c in a is in b
        return P.interior(P.full & ~a | b)
    if t is Forall or t is Exists:
        body = f.body
        cache, scopes = memo
        names = scopes[id(body)]
        forall = t is Forall
        if f.var not in names:
            # vacuous binder: only whether the domain is inhabited matters
            v = _force(frame, env, body, memo)
            if forall:
                return P.interior(P.full & ~(~v & frame._inhabited))
            return v & frame._inhabited
        # holders[a]: worlds whose domain contains a
        holders = frame._holders
        full = P.full
        saved = env.get(f.var, _MISSING)
        acc = 0
        try:
            for a in frame._all_domain_sets:
                env[f.var] = a
                key = memo_key(body, names, env)
                v = cache.get(key)
                if v is None:
                    v = cache[key] = _force(frame, env, body, memo)
                acc |= (~v if forall else v) & holders[a]
                if acc == full:
                    break
        finally:
            if saved is _MISSING:
                env.pop(f.var, None)
            else:
                env[f.var] = saved
        if not forall:
            return acc
        # acc now marks worlds with a failing instance; keep worlds seeing none
        return P.interior(full & ~acc)
    raise TypeError(f"not a formula: {f!r}")


def comprehension_closed(frame: KripkeFrame, pool: Iterable[Formula],
                         valuations: Iterable[Mapping[str, Iterable[str]]]) -> bool:
    """Whether every ``{c' >= c : c' forces phi}`` lies in ``D_c``.

    Checked for each formula of ``pool``, each valuation of ``valuations``
    and each world ``c``.
    """
    P = frame.poset
    envs = [_masks(P, v) for v in valuations]
    for phi in pool:
        for env in envs:
            value = _force(frame, env, phi, ({}, body_scopes(phi)))
            for i, row in enumerate(P.up):
                if value & row not in frame.domains[i]:
                    return False
    return True


def frame_from_json(data: Any) -> KripkeFrame:
    if isinstance(data, str):
        data = json.loads(data)
    try:
        poset = FinitePoset(data["worlds"], [tuple(p) for p in data.get("leq", [])])
        doms = data["domains"]
        if doms == "principal":
            return KripkeFrame.principal(poset)
        if not isinstance(doms, dict):
            raise FrameError('"domains" must be "principal" or an object')
        return KripkeFrame.build(poset, doms)
    except FrameError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise FrameError(f"malformed frame: {e}") from None
