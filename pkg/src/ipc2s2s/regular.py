"""Regular node sets of the binary tree and ultimately periodic paths.

A node of the full binary tree is a finite word over ``{0,1}``; a set of
nodes is *regular* when some DFA accepts exactly its words.  Paths are the
node sets of infinite words ``u v v v ...``.  Everything here is exact:
rationals are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Iterator

__all__ = [
    "DFA", "DFAError", "UltimatelyPeriodicPath", "ClosedSetError", "dfa_ops",
    "path_subset", "sat_U", "sat_UQ", "r_of", "expansions", "decide_closed",
    "encode_closed_set", "member_R", "companion_node", "delete_companion_branch",
    "parse_intervals",
]


class DFAError(ValueError):
    pass


class ClosedSetError(ValueError):
    pass


@dataclass(frozen=True)
class DFA:
    """Complete DFA over ``{0,1}``; ``delta[q] == (on0, on1)``."""

    states: int
    start: int
    accepting: frozenset[int]
    delta: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "delta", tuple(tuple(row) for row in self.delta))
        n = self.states
        if n < 1:
            raise DFAError("a DFA needs at least one state")
        if not 0 <= self.start < n:
            raise DFAError("start state out of range")
        if any(not 0 <= q < n for q in self.accepting):
            raise DFAError("accepting state out of range")
        if len(self.delta) != n or any(len(row) != 2 or not all(0 <= t < n for t in row) for row in self.delta):
            raise DFAError("transition table must give two in-range successors for every state")

    # -- construction -------------------------------------------------------

    @classmethod
    def empty(cls) -> "DFA":
        return cls(1, 0, frozenset(), ((0, 0),))

    @classmethod
    def universal(cls) -> "DFA":
        return cls(1, 0, frozenset({0}), ((0, 0),))

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "DFA":
        """Accepts exactly the given finite set of words."""
        trie: list[list[int]] = [[-1, -1]]
        accept = set()
        for w in words:
            q = 0
            for c in w:
                b = _bit(c)
                if trie[q][b] < 0:
                    trie.append([-1, -1])
                    trie[q][b] = len(trie) - 1
                q = trie[q][b]
            accept.add(q)
        sink = len(trie)
        delta = [tuple(t if t >= 0 else sink for t in row) for row in trie] + [(sink, sink)]
        return cls(len(delta), 0, frozenset(accept), tuple(delta)).minimize()

    @classmethod
    def from_path(cls, path: "UltimatelyPeriodicPath") -> "DFA":
        """Accepts exactly the finite prefixes of ``u v^omega``."""
        word = path.prefix + path.period
        n = len(word)
        sink = n
        delta = []
        for i in range(n):
            row = [sink, sink]
            row[_bit(word[i])] = i + 1 if i + 1 < n else len(path.prefix)
            delta.append(tuple(row))
        delta.append((sink, sink))
        return cls(len(delta), 0, frozenset(range(n)), tuple(delta)).minimize()

    @classmethod
    def from_json(cls, data: Any) -> "DFA":
        try:
            if isinstance(data, str):
                data = json.loads(data)
            return cls(int(data["states"]), int(data["start"]), frozenset(int(q) for q in data["accepting"]),
                       tuple((int(a), int(b)) for a, b in data["delta"]))
        except (KeyError, TypeError, ValueError) as e:
            if isinstance(e, DFAError):
                raise
            raise DFAError(f"malformed DFA: {e}") from None

    def to_json(self) -> dict:
        return {"states": self.states, "start": self.start,
                "accepting": sorted(self.accepting), "delta": [list(r) for r in self.delta]}

    # -- queries ------------------------------------------------------------

    def step(self, q: int, c: str) -> int:
        return self.delta[q][_bit(c)]

    def run(self, word: str, q: int | None = None) -> int:
        q = self.start if q is None else q
        for c in word:
            q = self.delta[q][_bit(c)]
        return q

    def accepts(self, word: str) -> bool:
        return self.run(word) in self.accepting

    def reachable(self) -> list[int]:
        seen = {self.start}
        order = [self.start]
        queue = deque(order)
        while queue:
            q = queue.popleft()
            for t in self.delta[q]:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order

    def is_empty(self) -> bool:
        return not any(q in self.accepting for q in self.reachable())

    def words(self, max_len: int) -> Iterator[str]:
        """Accepted words up to ``max_len``, shortlex order."""
        layer = [("", self.start)]
        for _ in range(max_len + 1):
            nxt = []
            for w, q in layer:
                if q in self.accepting:
                    yield w
                nxt.append((w + "0", self.delta[q][0]))
                nxt.append((w + "1", self.delta[q][1]))
            layer = nxt

    # -- operations ---------------------------------------------------------

    def complement(self) -> "DFA":
        return DFA(self.states, self.start, frozenset(range(self.states)) - self.accepting, self.delta)

    def _product(self, other: "DFA", keep) -> "DFA":
        index = {(self.start, other.start): 0}
        pairs = [(self.start, other.start)]
        delta = []
        i = 0
        while i < len(pairs):
            p, q = pairs[i]
            row = []
            for b in (0, 1):
                t = (self.delta[p][b], other.delta[q][b])
                if t not in index:
                    index[t] = len(pairs)
                    pairs.append(t)
                row.append(index[t])
            delta.append(tuple(row))
            i += 1
        acc = frozenset(k for k, (p, q) in enumerate(pairs) if keep(p in self.accepting, q in other.accepting))
        return DFA(len(pairs), 0, acc, tuple(delta)).minimize()

    def union(self, other: "DFA") -> "DFA":
        return self._product(other, lambda a, b: a or b)

    def intersection(self, other: "DFA") -> "DFA":
        return self._product(other, lambda a, b: a and b)

    def difference(self, other: "DFA") -> "DFA":
        return self._product(other, lambda a, b: a and not b)

    def minimize(self) -> "DFA":
        """Canonical minimal DFA: reachable states, Moore refinement, BFS numbering."""
        reach = self.reachable()
        block = {q: int(q in self.accepting) for q in reach}
        while True:
            sig = {q: (block[q], block[self.delta[q][0]], block[self.delta[q][1]]) for q in reach}
            ids: dict = {}
            new = {q: ids.setdefault(sig[q], len(ids)) for q in reach}
            if len(ids) == len(set(block.values())):
                block = new
                break
            block = new
        # renumber blocks in BFS order from the start block
        start = block[self.start]
        rep = {}
        for q in reach:
            rep.setdefault(block[q], q)
        order = {start: 0}
        queue = deque([start])
        while queue:
            b = queue.popleft()
            for t in self.delta[rep[b]]:
                tb = block[t]
                if tb not in order:
                    order[tb] = len(order)
                    queue.append(tb)
        delta = [None] * len(order)
        acc = set()
        for b, k in order.items():
            q = rep[b]
            delta[k] = (order[block[self.delta[q][0]]], order[block[self.delta[q][1]]])
            if q in self.accepting:
                acc.add(k)
        return DFA(len(order), 0, frozenset(acc), tuple(delta))

    def equivalent(self, other: "DFA") -> bool:
        return self.minimize() == other.minimize()


def dfa_ops(a: DFA, b: DFA | None, op: str):
    """``op`` is one of union, intersection, complement, equivalence, emptiness."""
    if op == "union":
        return a.union(b)
    if op == "intersection":
        return a.intersection(b)
    if op == "complement":
        return a.complement()
    if op == "equivalence":
        return a.equivalent(b)
    if op == "emptiness":
        return a.is_empty()
    raise DFAError(f"unknown DFA operation {op!r}")


def _bit(c: str) -> int:
    if c == "0":
        return 0
    if c == "1":
        return 1
    raise DFAError(f"not a binary letter: {c!r}")


# ---------------------------------------------------------------------------
# Ultimately periodic paths

@dataclass(frozen=True)
class UltimatelyPeriodicPath:
    """The branch ``prefix period period ...``, kept in canonical form.

    The period is primitive and the prefix is as short as possible, so two
    instances are equal exactly when they denote the same branch.
    """

    prefix: str
    period: str

    def __post_init__(self):
        u, v = self.prefix, self.period
        if not v:
            raise ValueError("period must be nonempty")
        if set(u + v) - {"0", "1"}:
            raise ValueError("paths are words over 0 and 1")
        for d in range(1, len(v) + 1):
            if len(v) % d == 0 and v[:d] * (len(v) // d) == v:
                v = v[:d]
                break
        while u and u[-1] == v[-1]:
            u, v = u[:-1], v[-1] + v[:-1]
        object.__setattr__(self, "prefix", u)
        object.__setattr__(self, "period", v)

    def letter(self, i: int) -> str:
        u, v = self.prefix, self.period
        return u[i] if i < len(u) else v[(i - len(u)) % len(v)]

    def node(self, n: int) -> str:
        """The node of length ``n`` on this path."""
        return "".join(self.letter(i) for i in range(n))

    def __str__(self) -> str:
        return f"{self.prefix}({self.period})^w"


def sat_U(p: UltimatelyPeriodicPath) -> bool:
    """Infinitely many 0s and at least one 1: the path names a real in (0,1)."""
    return "0" in p.period and "1" in p.prefix + p.period


def sat_UQ(p: UltimatelyPeriodicPath) -> bool:
    """The path has the form ``u 1 0^omega``."""
    return p.period == "0" and p.prefix.endswith("1")


def r_of(p: UltimatelyPeriodicPath) -> Fraction:
    """Value of the binary expansion ``0.u v v v ...``."""
    u, v = p.prefix, p.period
    head = Fraction(int(u, 2) if u else 0, 1 << len(u))
    tail = Fraction(int(v, 2), ((1 << len(v)) - 1) << len(u))
    return head + tail


def expansions(q: Fraction) -> list[UltimatelyPeriodicPath]:
    """All binary expansions of ``q`` in [0,1]: two for dyadic points of (0,1), else one."""
    q = Fraction(q)
    if not 0 <= q <= 1:
        raise ValueError(f"{q} is outside [0,1]")
    if q == 1:
        return [UltimatelyPeriodicPath("", "1")]
    num, den = q.numerator, q.denominator
    digits = []
    seen: dict[int, int] = {}
    r = num
    while r not in seen:
        seen[r] = len(digits)
        r *= 2
        digits.append("1" if r >= den else "0")
        r %= den
    start = seen[r]
    main = UltimatelyPeriodicPath("".join(digits[:start]), "".join(digits[start:]))
    if main.period == "0" and main.prefix:
        u = main.prefix[:-1]
        return [main, UltimatelyPeriodicPath(u + "0", "1")]
    return [main]


def path_subset(p: UltimatelyPeriodicPath, S: DFA) -> bool:
    """Whether every node of the branch ``p`` is accepted by ``S``."""
    q = S.start
    if q not in S.accepting:
        return False
    for c in p.prefix:
        q = S.step(q, c)
        if q not in S.accepting:
            return False
    seen = set()
    while q not in seen:
        seen.add(q)
        for c in p.period:
            q = S.step(q, c)
            if q not in S.accepting:
                return False
    return True


def member_R(S: DFA, q: Fraction) -> bool:
    """Whether the rational ``q`` has a real-naming expansion lying inside ``S``."""
    return any(sat_U(p) and path_subset(p, S) for p in expansions(q))


# ---------------------------------------------------------------------------
# Closedness

def _orbit_accepting(S: DFA, q: int, letter: str) -> bool:
    seen = set()
    while q not in seen:
        if q not in S.accepting:
            return False
        seen.add(q)
        q = S.step(q, letter)
    return True


def _live_states(S: DFA) -> list[int]:
    """States reached by words all of whose prefixes are accepted."""
    if S.start not in S.accepting:
        return []
    seen = {S.start}
    queue = deque([S.start])
    while queue:
        q = queue.popleft()
        for t in S.delta[q]:
            if t in S.accepting and t not in seen:
                seen.add(t)
                queue.append(t)
    return sorted(seen)


def decide_closed(S: DFA) -> bool:
    """Whether each branch ``u 0 1^omega`` inside ``S`` has its twin ``u 1 0^omega`` inside ``S``."""
    for q in _live_states(S):
        triggered = _orbit_accepting(S, S.step(q, "0"), "1")
        if triggered and not _orbit_accepting(S, S.step(q, "1"), "0"):
            return False
    return True


Component = Fraction | tuple[Fraction, Fraction]


def _components(C: Iterable[Any]) -> list[tuple[Fraction, Fraction]]:
    out = []
    for comp in C:
        if isinstance(comp, (tuple, list)):
            lo, hi = (Fraction(x) for x in comp)
        else:
            lo = hi = Fraction(comp)
        for x in (lo, hi):
            if x.denominator & (x.denominator - 1):
                raise ClosedSetError(f"{x} is not dyadic")
            if not 0 < x < 1:
                raise ClosedSetError(f"{x} is not inside (0,1)")
        if lo > hi:
            raise ClosedSetError(f"[{lo}, {hi}] is empty")
        out.append((lo, hi))
    return out


def encode_closed_set(C: Iterable[Any]) -> DFA:
    """Nodes lying on some real-naming branch whose value is in ``C``.

    ``C`` is a finite union of closed dyadic intervals ``(lo, hi)`` and
    dyadic points.  With every endpoint a multiple of ``2**-K``, each node
    of length ``K`` spans a half-open cell ``[g, g + 2**-K)`` that ``C``
    meets in nothing, everything, or just ``{g}``; below that depth the
    three cases are absorbing modes (reject, accept, accept-leftmost-only).
    """
    comps = _components(C)
    if not comps:
        return DFA.empty()
    k = max(x.denominator.bit_length() - 1 for c in comps for x in c)
    n = 1 << k

    def cell_type(i: int) -> int:
        g, h = Fraction(i, n), Fraction(i + 1, n)
        if any(lo <= g and h <= hi for lo, hi in comps):
            return FULL
        if any(lo <= g <= hi for lo, hi in comps):
            return LEFT
        return EMPTY

    EMPTY, FULL, LEFT = 0, 1, 2
    # trie nodes of length < k are numbered heap-style from 3: node w -> 3 + (2^len(w) - 1 + int(w))
    trie_size = n - 1
    delta: list[tuple[int, int]] = [(EMPTY, EMPTY), (FULL, FULL), (LEFT, EMPTY)]
    accepting = {FULL, LEFT}
    types = [cell_type(i) for i in range(n)]

    def state(depth: int, idx: int) -> int:
        if depth == k:
            return types[idx]
        return 3 + (1 << depth) - 1 + idx

    live = [[False] * (1 << d) for d in range(k + 1)]
    live[k] = [t != EMPTY for t in types]
    for d in range(k - 1, -1, -1):
        for i in range(1 << d):
            live[d][i] = live[d + 1][2 * i] or live[d + 1][2 * i + 1]
    delta.extend([(0, 0)] * trie_size)
    for d in range(k):
        for i in range(1 << d):
            s = state(d, i)
            delta[s] = (state(d + 1, 2 * i), state(d + 1, 2 * i + 1))
            if live[d][i]:
                accepting.add(s)
    start = state(0, 0)
    return DFA(len(delta), start, frozenset(accepting), tuple(delta)).minimize()


def companion_node(d: Fraction) -> str:
    """The branching node ``u`` of a dyadic ``d = 0.u1000... = 0.u0111...``."""
    paths = expansions(Fraction(d))
    if len(paths) != 2:
        raise ClosedSetError(f"{d} is not a dyadic point of (0,1)")
    return paths[0].prefix[:-1]


def delete_companion_branch(S: DFA, u: str) -> DFA:
    """Remove the nodes ``u 1 0^k`` from ``S`` and add every node of ``u 0 1^omega``.

    Afterwards ``S`` contains the branch ``u 0 1^omega`` but not its twin
    ``u 1 0^omega``, so :func:`decide_closed` must reject it.  For sets
    whose boundary point already sits on the ``u 0 1^omega`` side (right
    endpoints of intervals) the addition changes nothing.
    """
    twin = DFA.from_path(UltimatelyPeriodicPath(u + "1", "0"))
    above = DFA.from_words(u[:i] for i in range(len(u) + 1))
    trigger = DFA.from_path(UltimatelyPeriodicPath(u + "0", "1"))
    return S.difference(twin.difference(above)).union(trigger)


def parse_intervals(spec: str) -> list[Component]:
    """``"1/4..1/2;3/4"`` -> ``[(1/4, 1/2), 3/4]``."""
    out: list[Component] = []
    for part in spec.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            if ".." in part:
                lo, hi = part.split("..", 1)
                out.append((Fraction(lo.strip()), Fraction(hi.strip())))
            else:
                out.append(Fraction(part))
        except (ValueError, ZeroDivisionError):
            raise ClosedSetError(f"cannot read {part!r} as a dyadic fraction or range") from None
    _components(out)
    return out
