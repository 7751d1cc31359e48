"""Admissibility of a labeled Markov system.

A system is admissible of order k when its edge graph is strongly
connected, contains a good subgraph of order k (the six-piece pattern
checked by `validate_certificate`), and some vertex's loop-label
subgroup is the whole free group.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .chain import MarkovSystem, strongly_connected_components
from .freegroup import ReducedWord, fold, format_word, product


@dataclass(frozen=True)
class GoodSubgraphCertificate:
    """Witness (k, u, w, p, q, p*, q*): the four paths have length k,
    the concatenations upw, uqw, pq*p, qp*q are directed paths, and the
    starred paths carry the inverse labels of their partners."""

    k: int
    u: str
    w: str
    p: tuple[str, ...]
    q: tuple[str, ...]
    p_star: tuple[str, ...]
    q_star: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "u": self.u,
            "w": self.w,
            "p": list(self.p),
            "q": list(self.q),
            "p_star": list(self.p_star),
            "q_star": list(self.q_star),
        }

    @staticmethod
    def from_dict(data: Mapping) -> "GoodSubgraphCertificate":
        return GoodSubgraphCertificate(
            k=int(data["k"]),
            u=str(data["u"]),
            w=str(data["w"]),
            p=tuple(str(x) for x in data["p"]),
            q=tuple(str(x) for x in data["q"]),
            p_star=tuple(str(x) for x in data["p_star"]),
            q_star=tuple(str(x) for x in data["q_star"]),
        )


@dataclass(frozen=True)
class AdmissibilityReport:
    strongly_connected: bool
    order: Optional[int]
    certificate: Optional[GoodSubgraphCertificate]
    full_gamma_vertex: Optional[str]
    gamma_generators: Optional[tuple[ReducedWord, ...]]

    @property
    def admissible(self) -> bool:
        return (
            self.strongly_connected
            and self.certificate is not None
            and self.full_gamma_vertex is not None
        )

    def to_dict(self, generators: Sequence[str]) -> dict:
        return {
            "admissible": self.admissible,
            "strongly_connected": self.strongly_connected,
            "order": self.order,
            "certificate": None
            if self.certificate is None
            else self.certificate.to_dict(),
            "full_gamma_vertex": self.full_gamma_vertex,
            "gamma_generators": None
            if self.gamma_generators is None
            else [format_word(w, generators) for w in self.gamma_generators],
        }


def is_strongly_connected(m: MarkovSystem) -> bool:
    n = len(m.vertices)
    return len(strongly_connected_components(n, m.edge_successors())) == 1


def _bfs_tree(n: int, adj: Sequence[Sequence[int]], root: int) -> list[int]:
    """Parent array of a breadth-first tree from root, -1 off-tree."""
    parent = [-1] * n
    parent[root] = root
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if parent[w] == -1:
                parent[w] = v
                queue.append(w)
    return parent


def loop_subgroup_walks(
    m: MarkovSystem, v: str
) -> list[tuple[tuple[str, ...], ReducedWord]]:
    """Closed walks generating the loop-label subgroup at v.

    For each vertex x fix a shortest walk from v to x and a shortest walk
    from x back to v; every edge (x, y) then contributes the closed walk
    "in to x, step to y, out from y". Returned pairs are the full closed
    walk and its label word (labels of all vertices except the final
    return to v). Covers only the strongly connected component of v.
    """
    n = len(m.vertices)
    vi = m.index(v)
    eadj = m.edge_successors()
    comps = strongly_connected_components(n, eadj)
    comp = next(set(c) for c in comps if vi in c)
    if len(comp) == 1 and vi not in eadj[vi]:
        raise ValueError(f"vertex {v!r} lies on no directed cycle")
    adj = [[w for w in eadj[x] if w in comp] if x in comp else [] for x in range(n)]
    radj = [[] for _ in range(n)]
    for x in comp:
        for y in adj[x]:
            radj[y].append(x)
    into = _bfs_tree(n, adj, vi)  # walk v -> x read off by parents
    outof = _bfs_tree(n, radj, vi)  # walk x -> v, tree grown backwards

    def walk_in(x: int) -> list[int]:
        path = [x]
        while path[-1] != vi:
            path.append(into[path[-1]])
        return path[::-1]

    def walk_out(x: int) -> list[int]:
        path = [x]
        while path[-1] != vi:
            path.append(outof[path[-1]])
        return path

    results: list[tuple[tuple[str, ...], ReducedWord]] = []
    seen: set[ReducedWord] = set()
    for x in sorted(comp):
        for y in adj[x]:
            closed = walk_in(x) + walk_out(y)
            names = tuple(m.vertices[i] for i in closed)
            word = m.path_label(names[:-1])
            if word.is_identity or word in seen:
                continue
            seen.add(word)
            results.append((names, word))
    return results


def loop_subgroup_generators(m: MarkovSystem, v: str) -> tuple[ReducedWord, ...]:
    """Finite generating set for the subgroup of labels of directed
    closed walks at v (identity labels dropped)."""
    return tuple(word for _, word in loop_subgroup_walks(m, v))


def loop_subgroup_is_full(m: MarkovSystem, v: str) -> bool:
    return fold(loop_subgroup_generators(m, v), m.rank).is_full()


def _paths_of_length(
    m: MarkovSystem, k: int
) -> tuple[list[tuple[int, ...]], list[ReducedWord]]:
    """All directed paths on k vertices, in lexicographic index order,
    with their label words."""
    eadj = m.edge_successors()
    paths = [(i,) for i in range(len(m.vertices))]
    for _ in range(k - 1):
        paths = [p + (y,) for p in paths for y in eadj[p[-1]]]
    labels = [
        product((m.labels[i] for i in p), m.rank) for p in paths
    ]
    return paths, labels


def find_good_subgraph(m: MarkovSystem, k: int) -> Optional[GoodSubgraphCertificate]:
    """Exhaustive scan for an order-k certificate.

    Scan order (documented, deterministic): endpoints u then w in vertex
    order, candidate paths in lexicographic vertex order. Candidates are
    screened in three passes: first pairs with p != q whose path vertices
    avoid u and w (such certificates keep occurrence positions stable
    under block swaps), then any pair with p != q, then everything.
    """
    if k < 1:
        raise ValueError("order k must be at least 1")
    n = len(m.vertices)
    eadj = [set(adj) for adj in m.edge_successors()]
    paths, labels = _paths_of_length(m, k)
    by_label: dict[ReducedWord, list[int]] = {}
    for i, lbl in enumerate(labels):
        by_label.setdefault(lbl, []).append(i)

    def scan(tier: int) -> Optional[GoodSubgraphCertificate]:
        for u in range(n):
            for w in range(n):
                ok = [
                    i
                    for i, p in enumerate(paths)
                    if p[0] in eadj[u] and w in eadj[p[-1]]
                ]
                for pi in ok:
                    p = paths[pi]
                    if tier == 1 and (u in p or w in p):
                        continue
                    stars_p = by_label.get(labels[pi].inverse(), [])
                    if not stars_p:
                        continue
                    for qi in ok:
                        q = paths[qi]
                        if tier <= 2 and qi == pi:
                            continue
                        if tier == 1 and (u in q or w in q):
                            continue
                        stars_q = by_label.get(labels[qi].inverse(), [])
                        for si in stars_q:
                            q_star = paths[si]
                            if q_star[0] not in eadj[p[-1]]:
                                continue
                            if p[0] not in eadj[q_star[-1]]:
                                continue
                            for ti in stars_p:
                                p_star = paths[ti]
                                if p_star[0] not in eadj[q[-1]]:
                                    continue
                                if q[0] not in eadj[p_star[-1]]:
                                    continue
                                name = m.vertices.__getitem__
                                return GoodSubgraphCertificate(
                                    k=k,
                                    u=name(u),
                                    w=name(w),
                                    p=tuple(map(name, p)),
                                    q=tuple(map(name, q)),
                                    p_star=tuple(map(name, p_star)),
                                    q_star=tuple(map(name, q_star)),
                                )
        return None

    for tier in (1, 2, 3):
        found = scan(tier)
        if found is not None:
            return found
    return None


def validate_certificate(
    m: MarkovSystem, cert: GoodSubgraphCertificate
) -> list[str]:
    """Re-check every certificate invariant; empty list iff valid."""
    problems: list[str] = []
    if cert.k < 1:
        problems.append(f"order k={cert.k} must be at least 1")
    known = set(m.vertices)
    pieces = {
        "p": cert.p,
        "q": cert.q,
        "p_star": cert.p_star,
        "q_star": cert.q_star,
    }
    for vertex in (cert.u, cert.w):
        if vertex not in known:
            problems.append(f"unknown vertex {vertex!r}")
    for name, path in pieces.items():
        if len(path) != cert.k:
            problems.append(f"{name} has length {len(path)}, expected {cert.k}")
        unknown = [x for x in path if x not in known]
        if unknown:
            problems.append(f"{name} uses unknown vertices {unknown}")
    if problems:
        return problems
    for name, path in pieces.items():
        if not m.is_directed_path(path):
            problems.append(f"{name} is not a directed path")
    for name, seq in (
        ("upw", (cert.u,) + cert.p + (cert.w,)),
        ("uqw", (cert.u,) + cert.q + (cert.w,)),
        ("pq*p", cert.p + cert.q_star + cert.p),
        ("qp*q", cert.q + cert.p_star + cert.q),
    ):
        if not m.is_directed_path(seq):
            problems.append(f"{name} is not a directed path")
    if m.path_label(cert.p_star) != m.path_label(cert.p).inverse():
        problems.append("label of p_star is not the inverse label of p")
    if m.path_label(cert.q_star) != m.path_label(cert.q).inverse():
        problems.append("label of q_star is not the inverse label of q")
    return problems


def check_admissible(m: MarkovSystem, k_max: int = 3) -> AdmissibilityReport:
    """Strong connectivity, smallest order k <= k_max with a certificate,
    and the first vertex whose loop-label subgroup is everything."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    connected = is_strongly_connected(m)
    certificate = None
    order = None
    for k in range(1, k_max + 1):
        certificate = find_good_subgraph(m, k)
        if certificate is not None:
            order = k
            break
    full_vertex = None
    gens = None
    if connected:
        for v in m.vertices:
            words = loop_subgroup_generators(m, v)
            if fold(words, m.rank).is_full():
                full_vertex = v
                gens = words
                break
    return AdmissibilityReport(
        strongly_connected=connected,
        order=order,
        certificate=certificate,
        full_gamma_vertex=full_vertex,
        gamma_generators=gens,
    )


@dataclass(frozen=True)
class SufficiencyResult:
    """Outcome of the constructive edge-pattern check; exactly one of
    `certificate` or `failed_premise` is set."""

    certificate: Optional[GoodSubgraphCertificate]
    failed_premise: Optional[str]
    detail: str = ""


def sufficient_condition(m: MarkovSystem) -> SufficiencyResult:
    """Constructive sufficient test for a good subgraph.

    Premises, checked in order and reported by name on failure:
    injective labels (vertices identified with group elements), edge
    symmetry ((a, b) an edge implies (b^-1, a^-1) is one), an edge
    pattern (v, w), (u, w), (u, v^-1), and primitivity (a common walk
    length connecting every ordered vertex pair). On success the
    returned certificate takes p from w to v, q from v^-1 to u, and the
    starred paths as reversed vertexwise inverses.
    """
    n = len(m.vertices)
    if len(set(m.labels)) != n:
        return SufficiencyResult(None, "injectivity", "labels are not injective")
    by_label = {lbl: i for i, lbl in enumerate(m.labels)}

    def inv_vertex(i: int) -> Optional[int]:
        return by_label.get(m.labels[i].inverse())

    eadj = [set(adj) for adj in m.edge_successors()]
    for a in range(n):
        for b in eadj[a]:
            ai, bi = inv_vertex(a), inv_vertex(b)
            if ai is None or bi is None or ai not in eadj[bi]:
                return SufficiencyResult(
                    None,
                    "symmetry",
                    f"edge ({m.vertices[a]!r}, {m.vertices[b]!r}) has no inverse edge",
                )

    pattern = None
    for v in range(n):
        vinv = inv_vertex(v)
        if vinv is None:
            continue
        for w in eadj[v]:
            for u in range(n):
                if w in eadj[u] and vinv in eadj[u]:
                    pattern = (v, w, u)
                    break
            if pattern:
                break
        if pattern:
            break
    if pattern is None:
        return SufficiencyResult(
            None, "pattern", "no vertices v, w, u with edges (v,w), (u,w), (u,v^-1)"
        )
    v, w, u = pattern

    full = frozenset(range(n))
    steps = None
    for e in range(1, n * n + 1):
        if all(r == full for r in _exact_reach(eadj, e, n)):
            steps = e
            break
    if steps is None:
        return SufficiencyResult(
            None,
            "primitivity",
            f"no common walk length up to {n * n} connects all ordered pairs",
        )
    k = steps + 1  # paths with k vertices have `steps` edges

    def exact_path(src: int, dst: int, edges: int) -> tuple[int, ...]:
        # back[j] = vertices that reach dst in exactly j edges
        back = [frozenset([dst])]
        for _ in range(edges):
            prev = back[-1]
            back.append(frozenset(x for x in range(n) if eadj[x] & prev))
        path = [src]
        for j in range(edges, 0, -1):
            nxt = min(y for y in eadj[path[-1]] if y in back[j - 1])
            path.append(nxt)
        return tuple(path)

    vinv = inv_vertex(v)
    p = exact_path(w, v, k - 1)
    q = exact_path(vinv, u, k - 1)
    p_star = tuple(inv_vertex(x) for x in reversed(p))
    q_star = tuple(inv_vertex(x) for x in reversed(q))
    name = m.vertices.__getitem__
    cert = GoodSubgraphCertificate(
        k=k,
        u=name(u),
        w=name(w),
        p=tuple(map(name, p)),
        q=tuple(map(name, q)),
        p_star=tuple(map(name, p_star)),
        q_star=tuple(map(name, q_star)),
    )
    return SufficiencyResult(cert, None)


def _exact_reach(eadj: Sequence[set], steps: int, n: int) -> list[frozenset]:
    """reach[x] = vertices reachable from x in exactly `steps` edges."""
    reach = [frozenset(adj) for adj in eadj]
    for _ in range(steps - 1):
        reach = [frozenset(y for x in r for y in eadj[x]) for r in reach]
    return reach
