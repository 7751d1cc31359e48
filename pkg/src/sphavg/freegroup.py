"""Freely reduced words over a free group, plus Stallings subgroup graphs.

Words are stored as tuples of signed generator indices: ``+i`` stands for
the i-th generator (indices start at 1) and ``-i`` for its inverse.
Generator display names live at the presentation layer only; see
`parse_word` / `format_word` for the text syntax used in chain files and
on the command line (``"ab'a"`` means a b^-1 a, ``"1"`` is the identity).
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence


class FormatError(ValueError):
    """Text input (word syntax, chain or action file) cannot be parsed."""


def _reduce_letters(letters: Iterable[int], rank: int) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if x == 0 or abs(x) > rank:
            raise ValueError(f"letter {x} out of range for rank {rank}")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


@dataclass(frozen=True)
class ReducedWord:
    """A freely reduced word; the empty letter tuple is the identity."""

    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        if _reduce_letters(self.letters, self.rank) != tuple(self.letters):
            raise ValueError("letters are not freely reduced; use reduce()")

    @staticmethod
    def identity(rank: int) -> "ReducedWord":
        return ReducedWord((), rank)

    @staticmethod
    def generator(i: int, rank: int) -> "ReducedWord":
        return ReducedWord((i,), rank)

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def inverse(self) -> "ReducedWord":
        return ReducedWord(tuple(-x for x in reversed(self.letters)), self.rank)

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return multiply(self, other)

    def __len__(self) -> int:
        return len(self.letters)


def reduce(letters: Sequence[int], rank: int) -> ReducedWord:
    """Freely reduce a raw signed-index sequence.

    >>> reduce([1, -1], 2).letters
    ()
    >>> reduce([1, 2, -2, 1], 2).letters
    (1, 1)
    """
    return ReducedWord(_reduce_letters(letters, rank), rank)


def multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    """Reduced product u*v; ranks must agree."""
    if u.rank != v.rank:
        raise ValueError(f"rank mismatch: {u.rank} != {v.rank}")
    out = list(u.letters)
    for x in v.letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return ReducedWord(tuple(out), u.rank)


def invert(w: ReducedWord) -> ReducedWord:
    return w.inverse()


def product(words: Iterable[ReducedWord], rank: int) -> ReducedWord:
    """Reduced product of a (possibly empty) sequence of words."""
    letters: list[int] = []
    for w in words:
        if w.rank != rank:
            raise ValueError("rank mismatch in product")
        for x in w.letters:
            if letters and letters[-1] == -x:
                letters.pop()
            else:
                letters.append(x)
    return ReducedWord(tuple(letters), rank)


def parse_word(text: str, generators: Sequence[str]) -> ReducedWord:
    """Parse word text such as ``"ab'a"``; ``"1"`` denotes the identity.

    Generator names must be distinct single characters; an apostrophe
    directly after a letter marks its inverse. The result is reduced.
    """
    rank = len(generators)
    index = {g: i + 1 for i, g in enumerate(generators)}
    if text == "1":
        return ReducedWord.identity(rank)
    letters: list[int] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch not in index:
            raise FormatError(f"unknown generator {ch!r} in word {text!r}")
        i += 1
        sign = 1
        if i < len(text) and text[i] == "'":
            sign = -1
            i += 1
        letters.append(sign * index[ch])
    return reduce(letters, rank)


def format_word(w: ReducedWord, generators: Sequence[str]) -> str:
    """Inverse of `parse_word`; the identity prints as ``"1"``."""
    if len(generators) != w.rank:
        raise ValueError("generator list does not match word rank")
    if w.is_identity:
        return "1"
    return "".join(
        generators[abs(x) - 1] + ("'" if x < 0 else "") for x in w.letters
    )


@dataclass(frozen=True)
class SubgroupGraph:
    """Folded based core graph of a finitely generated subgroup.

    Edges are ``(source, gen, target)`` triples; an edge is traversed
    forwards for letter ``+gen`` and backwards for ``-gen``. Vertices are
    canonically numbered by breadth-first order from the basepoint
    (following generator index order, out-edge before in-edge), so two
    graphs are isomorphic as based labeled graphs iff they are equal.
    """

    rank: int
    num_vertices: int
    basepoint: int
    edges: frozenset[tuple[int, int, int]]
    folded: bool

    def _maps(self) -> tuple[dict, dict]:
        out = {(s, g): t for (s, g, t) in self.edges}
        inc = {(g, t): s for (s, g, t) in self.edges}
        return out, inc

    def contains(self, w: ReducedWord) -> bool:
        """Membership test: trace w from the basepoint, accept iff the
        whole word traces and returns to the basepoint."""
        if w.rank != self.rank:
            raise ValueError("rank mismatch")
        out, inc = self._maps()
        cur = self.basepoint
        for x in w.letters:
            cur = out.get((cur, x)) if x > 0 else inc.get((-x, cur))
            if cur is None:
                return False
        return cur == self.basepoint

    def is_full(self) -> bool:
        """True iff the subgroup is the whole free group, decided by
        membership of every generator."""
        return all(
            self.contains(ReducedWord.generator(i, self.rank))
            for i in range(1, self.rank + 1)
        )


def fold(generators: Iterable[ReducedWord], rank: int) -> SubgroupGraph:
    """Fold the wedge of word loops into the subgroup's based core graph.

    The result is independent of the order of `generators` and of the
    folding schedule. The empty set gives the single-vertex graph of the
    trivial subgroup.
    """
    edges: set[tuple[int, int, int]] = set()
    count = 1
    for w in generators:
        if w.rank != rank:
            raise ValueError("rank mismatch in fold")
        n = len(w.letters)
        if n == 0:
            continue
        prev = 0
        for i, x in enumerate(w.letters):
            nxt = 0 if i == n - 1 else count
            if i != n - 1:
                count += 1
            if x > 0:
                edges.add((prev, x, nxt))
            else:
                edges.add((nxt, -x, prev))
            prev = nxt

    parent = list(range(count))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    while True:
        canon = {(find(s), g, find(t)) for (s, g, t) in edges}
        out: dict[tuple[int, int], int] = {}
        inc: dict[tuple[int, int], int] = {}
        merge = None
        for s, g, t in sorted(canon):
            if (s, g) in out and out[(s, g)] != t:
                merge = (out[(s, g)], t)
                break
            out[(s, g)] = t
            if (g, t) in inc and inc[(g, t)] != s:
                merge = (inc[(g, t)], s)
                break
            inc[(g, t)] = s
        edges = canon
        if merge is None:
            break
        a, b = find(merge[0]), find(merge[1])
        if a != b:
            parent[max(a, b)] = min(a, b)

    base = find(0)

    # core: drop dangling vertices (degree 1, loops count twice); the
    # basepoint may keep a spur and is never removed
    while True:
        deg: Counter = Counter()
        for s, g, t in edges:
            deg[s] += 1
            deg[t] += 1
        dead = {v for v, d in deg.items() if d == 1 and v != base}
        if not dead:
            break
        edges = {e for e in edges if e[0] not in dead and e[2] not in dead}

    out_map = {(s, g): t for (s, g, t) in edges}
    in_map = {(g, t): s for (s, g, t) in edges}
    order = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for g in range(1, rank + 1):
            for nb in (out_map.get((v, g)), in_map.get((g, v))):
                if nb is not None and nb not in order:
                    order[nb] = len(order)
                    queue.append(nb)
    relabeled = frozenset((order[s], g, order[t]) for (s, g, t) in edges)
    return SubgroupGraph(
        rank=rank,
        num_vertices=len(order),
        basepoint=0,
        edges=relabeled,
        folded=True,
    )
