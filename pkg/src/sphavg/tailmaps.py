"""Block-swap and tail-rewrite maps on finite symbol words.

Given a good-subgraph certificate (k, u, w, p, q, p*, q*), a word over
the vertex alphabet may contain occurrences of the two marker blocks
``u p w`` and ``u q w`` (length k+2). `block_swap` exchanges p and q
inside the n-th occurrence; `tail_rewrite` drops the first 2k symbols
and splices the matching starred path into the occurrence. On infinite
sequences these maps witness that synchronous and 2k-step tail
equivalence agree; here everything is finite, positions are 1-based, and
every out-of-range situation is an explicit error rather than a silent
truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .admissibility import GoodSubgraphCertificate
from .chain import MarkovSystem, StationaryDistribution
from .freegroup import ReducedWord, format_word, product

SymbolWord = tuple[str, ...]


class InsufficientOccurrencesError(ValueError):
    def __init__(self, needed: int, found: int):
        super().__init__(
            f"word contains {found} marker occurrence(s), {needed} required"
        )
        self.needed = needed
        self.found = found


class DegenerateWindowError(ValueError):
    pass


def marker_blocks(cert: GoodSubgraphCertificate) -> tuple[SymbolWord, SymbolWord]:
    return (
        (cert.u,) + cert.p + (cert.w,),
        (cert.u,) + cert.q + (cert.w,),
    )


def occurrences(s: Sequence[str], cert: GoodSubgraphCertificate) -> tuple[int, ...]:
    """1-based start positions of marker blocks, overlaps included."""
    s = tuple(s)
    upw, uqw = marker_blocks(cert)
    size = cert.k + 2
    return tuple(
        i + 1
        for i in range(len(s) - size + 1)
        if s[i : i + size] == upw or s[i : i + size] == uqw
    )


def occurrence_time(s: Sequence[str], cert: GoodSubgraphCertificate, n: int) -> int:
    """Start position of the n-th marker occurrence, scanning left to
    right; raises `InsufficientOccurrencesError` when there are fewer."""
    if n < 1:
        raise ValueError("occurrence index must be >= 1")
    occ = occurrences(s, cert)
    if len(occ) < n:
        raise InsufficientOccurrencesError(n, len(occ))
    return occ[n - 1]


def block_swap(
    s: Sequence[str], cert: GoodSubgraphCertificate, n: int
) -> SymbolWord:
    """Replace p by q (or q by p) inside the n-th marker occurrence; all
    other positions and the total length are unchanged."""
    s = tuple(s)
    k = cert.k
    t = occurrence_time(s, cert, n)
    upw, _ = marker_blocks(cert)
    inner = cert.q if s[t - 1 : t + k + 1] == upw else cert.p
    return s[:t] + inner + s[t + k :]


def tail_rewrite(
    s: Sequence[str], cert: GoodSubgraphCertificate, n: int
) -> SymbolWord:
    """Drop the first 2k symbols and splice the starred partner into the
    n-th occurrence: a word carrying ``u q w`` there (the swapped image
    of ``u p w``) receives p*, and one carrying ``u p w`` receives q*.
    Requires the occurrence to start after position 2k."""
    s = tuple(s)
    k = cert.k
    t = occurrence_time(s, cert, n)
    if t <= 2 * k:
        raise DegenerateWindowError(
            f"occurrence at position {t} does not clear the 2k = {2 * k} prefix"
        )
    upw, _ = marker_blocks(cert)
    star = cert.q_star if s[t - 1 : t + k + 1] == upw else cert.p_star
    return s[2 * k : t + k] + star + s[t:]


def swap_then_rewrite(
    s: Sequence[str], cert: GoodSubgraphCertificate, n: int
) -> SymbolWord:
    """The composite rewrite-after-swap, written directly in terms of the
    original word: the occurrence block is replaced by q p* q (when it
    read ``u p w``) or p q* p (when it read ``u q w``), after dropping
    the 2k-symbol prefix."""
    s = tuple(s)
    k = cert.k
    t = occurrence_time(s, cert, n)
    if t <= 2 * k:
        raise DegenerateWindowError(
            f"occurrence at position {t} does not clear the 2k = {2 * k} prefix"
        )
    upw, _ = marker_blocks(cert)
    if s[t - 1 : t + k + 1] == upw:
        middle = cert.q + cert.p_star + cert.q
    else:
        middle = cert.p + cert.q_star + cert.p
    return s[2 * k : t] + middle + s[t + k :]


def shift(s: Sequence[str], j: int = 1) -> SymbolWord:
    """Drop the first j symbols."""
    if j < 0 or j > len(s):
        raise ValueError(f"cannot shift {j} symbols off a word of length {len(s)}")
    return tuple(s)[j:]


@dataclass(frozen=True)
class ShiftedPair:
    """Two words agreeing with an index shift: left[shift + i] = right[i]
    for every stored position i >= agree_from (1-based)."""

    left: SymbolWord
    right: SymbolWord
    shift: int
    agree_from: int

    def check(self) -> None:
        if self.agree_from < 1:
            raise ValueError("agreement index must be >= 1")
        for i in range(self.agree_from, len(self.right) + 1):
            j = self.shift + i
            if 1 <= j <= len(self.left) and self.left[j - 1] != self.right[i - 1]:
                raise ValueError(
                    f"pair disagrees at position {i}: "
                    f"{self.left[j - 1]!r} != {self.right[i - 1]!r}"
                )


def tail_cocycle(pair: ShiftedPair, m: MarkovSystem) -> ReducedWord:
    """Group-valued discrepancy of a shifted pair: the label product of
    left[1 .. agree_from + shift] times the inverse label product of
    right[1 .. agree_from]. Independent of enlarging agree_from within
    the stored words."""
    pair.check()
    n, p = pair.agree_from, pair.shift
    if n + p < 0:
        raise ValueError("agreement prefix of the left word has negative length")
    if n + p > len(pair.left) or n > len(pair.right):
        raise ValueError("agreement index falls outside the stored words")
    left = product((m.label_of(v) for v in pair.left[: n + p]), m.rank)
    right = product((m.label_of(v) for v in pair.right[:n]), m.rank)
    return left * right.inverse()


def word_distance(s: Sequence[str], t: Sequence[str]) -> Fraction:
    """1/n where n is the first position at which the words differ.

    Words that agree on their whole stored overlap get distance 0, the
    finite-truncation reading of equality.
    """
    s, t = tuple(s), tuple(t)
    for i in range(min(len(s), len(t))):
        if s[i] != t[i]:
            return Fraction(1, i + 1)
    return Fraction(0)


def weight_ratio_bound(
    m: MarkovSystem, cert: GoodSubgraphCertificate
) -> Fraction:
    """Explicit constant C >= 1 bounding how much a block swap or a
    rewrite can change a cylinder mass.

    The swap changes exactly the k+1 entries through the block
    (connectors included), so its ratio is the weight of one block over
    the other; the rewrite additionally drops 2k head entries and
    inserts 2k block entries, each pair off by at most the extreme entry
    ratio of the matrix.
    """
    def block_weight(inner: tuple[str, ...]) -> Fraction:
        return m.path_weight((cert.u,) + inner + (cert.w,))

    wp = block_weight(cert.p)
    wq = block_weight(cert.q)
    swap_ratio = max(wp / wq, wq / wp)
    positive = [e for row in m.matrix for e in row if e > 0]
    extreme = max(positive) / min(positive)
    return swap_ratio * extreme ** (2 * cert.k)


@dataclass(frozen=True)
class TailCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class TailMapsReport:
    """Outcome of the finite tail-map identities on one word."""

    word_length: int
    occurrence_index: int
    position: int
    case: str
    ratio_bound: str
    checks: tuple[TailCheck, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed_checks(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "word_length": self.word_length,
            "occurrence_index": self.occurrence_index,
            "position": self.position,
            "case": self.case,
            "ratio_bound": self.ratio_bound,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail}
                for c in self.checks
            ],
        }


def check_tail_maps(
    m: MarkovSystem,
    cert: GoodSubgraphCertificate,
    s: Sequence[str],
    n: int,
    nu: Optional[StationaryDistribution] = None,
) -> TailMapsReport:
    """Run the exact finite-word identities at the n-th occurrence.

    Checked, with exact arithmetic throughout: stability of the
    occurrence position under the swap, the swap being an involution,
    the two metric bounds (swap distance at most 1/t, rewrite distance
    from the 2k-shifted swap at most 1/(t-k)), equality of the two
    cocycle values, and both cylinder-mass ratios lying within the
    precomputed bound.
    """
    s = tuple(s)
    k = cert.k
    if nu is None:
        nu = m.stationary_distribution()
    t = occurrence_time(s, cert, n)
    if t <= 2 * k:
        raise DegenerateWindowError(
            f"occurrence at position {t} does not clear the 2k = {2 * k} prefix"
        )
    upw, _ = marker_blocks(cert)
    case = "upw" if s[t - 1 : t + k + 1] == upw else "uqw"
    ws = block_swap(s, cert, n)
    rw = swap_then_rewrite(s, cert, n)
    shifted = shift(ws, 2 * k)
    bound = weight_ratio_bound(m, cert)
    checks: list[TailCheck] = []

    stable = occurrences(ws, cert)[: n] == occurrences(s, cert)[: n]
    checks.append(
        TailCheck(
            "occurrence_stable",
            stable,
            f"occurrence positions around index {n} preserved by the swap",
        )
    )

    back = block_swap(ws, cert, n)
    checks.append(
        TailCheck(
            "swap_involution",
            back == s,
            "swapping the same occurrence twice restores the word",
        )
    )

    d_swap = word_distance(s, ws)
    checks.append(
        TailCheck(
            "swap_distance",
            d_swap <= Fraction(1, t),
            f"d(word, swapped) = {d_swap} <= 1/{t}",
        )
    )

    d_rw = word_distance(rw, shifted)
    checks.append(
        TailCheck(
            "rewrite_distance",
            d_rw <= Fraction(1, t - k),
            f"d(rewrite, shifted swap) = {d_rw} <= 1/{t - k}",
        )
    )

    a_left = tail_cocycle(ShiftedPair(rw, ws, 0, t + 1), m)
    a_right = tail_cocycle(ShiftedPair(shifted, s, -2 * k, t + k + 1), m)
    checks.append(
        TailCheck(
            "cocycle_equal",
            a_left == a_right,
            f"{format_word(a_left, m.generators)} vs "
            f"{format_word(a_right, m.generators)}",
        )
    )

    mass = m.cylinder_measure(s, nu)
    if mass == 0:
        checks.append(
            TailCheck("swap_weight_ratio", False, "word is not a directed path")
        )
        checks.append(
            TailCheck("rewrite_weight_ratio", False, "word is not a directed path")
        )
    else:
        r_swap = m.cylinder_measure(ws, nu) / mass
        checks.append(
            TailCheck(
                "swap_weight_ratio",
                1 / bound <= r_swap <= bound,
                f"mass ratio {r_swap} within [1/{bound}, {bound}]",
            )
        )
        r_rw = m.cylinder_measure(rw, nu) / mass
        checks.append(
            TailCheck(
                "rewrite_weight_ratio",
                1 / bound <= r_rw <= bound,
                f"mass ratio {r_rw} within [1/{bound}, {bound}]",
            )
        )

    return TailMapsReport(
        word_length=len(s),
        occurrence_index=n,
        position=t,
        case=case,
        ratio_bound=str(bound),
        checks=tuple(checks),
    )


def eligible_occurrence(
    s: Sequence[str], cert: GoodSubgraphCertificate
) -> Optional[int]:
    """Smallest occurrence index whose position clears the 2k prefix."""
    for i, t in enumerate(occurrences(s, cert), start=1):
        if t > 2 * cert.k:
            return i
    return None


def sample_word(
    m: MarkovSystem,
    cert: GoodSubgraphCertificate,
    rng,
    length: Optional[int] = None,
) -> SymbolWord:
    """Random directed path guaranteed to carry a marker block.

    A random walk on the edge graph is routed to the block entry vertex,
    one of the two blocks is emitted, and the walk continues to the
    requested length. Requires a strongly connected system; `rng` is any
    generator with an ``integers(n)`` method.
    """
    k = cert.k
    n = len(m.vertices)
    eadj = m.edge_successors()
    if any(not adj for adj in eadj):
        raise ValueError("every vertex needs an outgoing edge")
    target = length if length is not None else 8 * k + 40
    ui = m.index(cert.u)

    # distance-to-u table over the edge graph
    dist = [None] * n
    dist[ui] = 0
    queue = [ui]
    while queue:
        nxt = []
        for x in queue:
            for y in range(n):
                if x in eadj[y] and dist[y] is None:
                    dist[y] = dist[x] + 1
                    nxt.append(y)
        queue = nxt
    if any(d is None for d in dist):
        raise ValueError("block entry vertex is not reachable from everywhere")

    walk = [int(rng.integers(n))]
    prefix = 2 * k + 1 + int(rng.integers(10))
    while len(walk) < prefix:
        adj = eadj[walk[-1]]
        walk.append(adj[int(rng.integers(len(adj)))])
    while walk[-1] != ui:
        walk.append(min(y for y in eadj[walk[-1]] if dist[y] == dist[walk[-1]] - 1))
    inner = cert.p if int(rng.integers(2)) == 0 else cert.q
    walk.extend(m.index(x) for x in inner)
    walk.append(m.index(cert.w))
    while len(walk) < target:
        adj = eadj[walk[-1]]
        walk.append(adj[int(rng.integers(len(adj)))])
    return tuple(m.vertices[i] for i in walk)
