"""Labeled Markov systems over free-group generators.

A `MarkovSystem` holds the vertex alphabet V, a row-stochastic matrix of
exact rationals, and a labeling of vertices by reduced words. The edge
set reverses the matrix orientation on purpose: ``(w, v)`` is an edge
exactly when the entry ``matrix[v][w]`` is positive, and a directed path
``(s_1, ..., s_n)`` has weight ``matrix[s_{i+1}][s_i]`` multiplied over
consecutive pairs. Cylinder masses combine the stationary weight of the
last vertex with that path weight, which is consistent (additive under
extension at the end) precisely for the left fixed vector convention
``sum_w nu(w) matrix[w][v] = nu(v)`` implemented here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .freegroup import (
    FormatError,
    ReducedWord,
    format_word,
    parse_word,
    product,
)

_ALPHA = "abcdefghijklmnopqrstuvwxyz"


class ReducibleChainError(ValueError):
    """Positive-entry support is not irreducible; carries the components."""

    def __init__(self, message: str, components: list[list[str]]):
        super().__init__(message)
        self.components = components


@dataclass(frozen=True)
class StationaryDistribution:
    """Strictly positive left fixed vector of the matrix, summing to 1."""

    vertices: tuple[str, ...]
    weights: tuple[Fraction, ...]

    def __getitem__(self, vertex: str) -> Fraction:
        return self.weights[self.vertices.index(vertex)]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.vertices, self.weights))


@dataclass(frozen=True)
class MarkovSystem:
    """Vertex alphabet, exact rational transition matrix, and labeling."""

    vertices: tuple[str, ...]
    rank: int
    generators: tuple[str, ...]
    labels: tuple[ReducedWord, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    def index(self, vertex: str) -> int:
        try:
            return self.vertices.index(vertex)
        except ValueError:
            raise ValueError(f"unknown vertex {vertex!r}") from None

    def label_of(self, vertex: str) -> ReducedWord:
        return self.labels[self.index(vertex)]

    # -- validation ----------------------------------------------------

    def validate(self) -> list[str]:
        """Exact invariant check; returns a list of violations (empty iff
        the system is valid)."""
        problems: list[str] = []
        n = len(self.vertices)
        if n < 1:
            problems.append("vertex set is empty")
        if len(set(self.vertices)) != n:
            problems.append("vertex names are not distinct")
        if len(self.generators) != self.rank:
            problems.append(
                f"{len(self.generators)} generator names for rank {self.rank}"
            )
        if len(self.labels) != n:
            problems.append("labels are not total on the vertex set")
        for v, lbl in zip(self.vertices, self.labels):
            if lbl.rank != self.rank:
                problems.append(f"label of {v!r} has rank {lbl.rank}, expected {self.rank}")
        if len(self.matrix) != n or any(len(row) != n for row in self.matrix):
            problems.append("matrix is not square over the vertex set")
            return problems
        for i, row in enumerate(self.matrix):
            for j, entry in enumerate(row):
                if entry < 0:
                    problems.append(
                        f"negative entry {entry} at ({self.vertices[i]!r}, {self.vertices[j]!r})"
                    )
            total = sum(row, Fraction(0))
            if total != 1:
                problems.append(
                    f"row {self.vertices[i]!r} sums to {total}, expected 1"
                )
        return problems

    # -- graph structure -----------------------------------------------

    def edge_set(self) -> set[tuple[str, str]]:
        """The reversed-orientation edge set: (a, b) is an edge iff
        matrix[b][a] > 0."""
        n = len(self.vertices)
        return {
            (self.vertices[a], self.vertices[b])
            for a in range(n)
            for b in range(n)
            if self.matrix[b][a] > 0
        }

    def edge_successors(self) -> list[list[int]]:
        """Edge-set out-neighbors by vertex index."""
        n = len(self.vertices)
        return [
            [b for b in range(n) if self.matrix[b][a] > 0] for a in range(n)
        ]

    def support_successors(self) -> list[list[int]]:
        """Positive-entry successors of the matrix itself (row to column)."""
        n = len(self.vertices)
        return [
            [j for j in range(n) if self.matrix[i][j] > 0] for i in range(n)
        ]

    def has_edge(self, a: str, b: str) -> bool:
        return self.matrix[self.index(b)][self.index(a)] > 0

    def is_directed_path(self, path: Sequence[str]) -> bool:
        if not path:
            return False
        idx = [self.index(v) for v in path]
        return all(
            self.matrix[idx[i + 1]][idx[i]] > 0 for i in range(len(idx) - 1)
        )

    # -- stationary measure and path weights ----------------------------

    def stationary_distribution(self) -> StationaryDistribution:
        """Unique positive rational solution of the left fixed-point
        system, found by exact elimination.

        Raises `ReducibleChainError` when the positive support is not
        irreducible (listing the strongly connected pieces).
        """
        n = len(self.vertices)
        comps = strongly_connected_components(n, self.support_successors())
        if len(comps) != 1:
            named = [[self.vertices[i] for i in comp] for comp in comps]
            raise ReducibleChainError(
                f"support is reducible, {len(comps)} strongly connected components: {named}",
                named,
            )
        # rows: sum_w x_w matrix[w][v] - x_v = 0, with one row traded for
        # normalization (any single fixed-point row is redundant)
        a = [
            [self.matrix[w][v] - (1 if v == w else 0) for w in range(n)]
            for v in range(n)
        ]
        a[0] = [Fraction(1)] * n
        b = [Fraction(1)] + [Fraction(0)] * (n - 1)
        x = _solve_exact(a, b)
        for v in range(n):
            if sum(x[w] * self.matrix[w][v] for w in range(n)) != x[v]:
                raise ArithmeticError("stationary solve failed its own system")
        if any(val <= 0 for val in x):
            raise ReducibleChainError(
                "fixed vector is not strictly positive", [list(self.vertices)]
            )
        return StationaryDistribution(self.vertices, tuple(x))

    def path_weight(self, path: Sequence[str]) -> Fraction:
        """Product of matrix entries along a directed path, read from the
        later vertex to the earlier one; a single vertex has weight 1."""
        if not path:
            raise ValueError("empty vertex sequence")
        idx = [self.index(v) for v in path]
        weight = Fraction(1)
        for i in range(len(idx) - 1):
            entry = self.matrix[idx[i + 1]][idx[i]]
            if entry == 0:
                raise ValueError(
                    f"not a directed path: no edge ({path[i]!r}, {path[i + 1]!r})"
                )
            weight *= entry
        return weight

    def path_label(self, path: Sequence[str]) -> ReducedWord:
        """Reduced product of the vertex labels along the sequence."""
        return product((self.label_of(v) for v in path), self.rank)

    def cylinder_measure(
        self, path: Sequence[str], nu: StationaryDistribution | None = None
    ) -> Fraction:
        """Mass of the cylinder fixing the first ``len(path)`` symbols:
        stationary weight of the last vertex times the path weight.
        Sequences that are not directed paths have measure 0."""
        if not path:
            raise ValueError("empty vertex sequence")
        if nu is None:
            nu = self.stationary_distribution()
        idx = [self.index(v) for v in path]
        mass = nu.weights[idx[-1]]
        for i in range(len(idx) - 1):
            entry = self.matrix[idx[i + 1]][idx[i]]
            if entry == 0:
                return Fraction(0)
            mass *= entry
        return mass


# -- exact linear algebra ------------------------------------------------


def _solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals; raises on singular input."""
    n = len(a)
    m = [list(row) + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular linear system")
        m[col], m[pivot] = m[pivot], m[col]
        pv = m[col][col]
        m[col] = [entry / pv for entry in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def strongly_connected_components(
    n: int, successors: Sequence[Sequence[int]]
) -> list[list[int]]:
    """Kosaraju's algorithm, iterative; components in discovery order."""
    order: list[int] = []
    seen = [False] * n
    for start in range(n):
        if seen[start]:
            continue
        seen[start] = True
        stack: list[tuple[int, int]] = [(start, 0)]
        while stack:
            v, i = stack[-1]
            if i < len(successors[v]):
                stack[-1] = (v, i + 1)
                w = successors[v][i]
                if not seen[w]:
                    seen[w] = True
                    stack.append((w, 0))
            else:
                order.append(v)
                stack.pop()
    preds: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for w in successors[v]:
            preds[w].append(v)
    comp = [-1] * n
    groups: list[list[int]] = []
    for v in reversed(order):
        if comp[v] != -1:
            continue
        group = [v]
        comp[v] = len(groups)
        todo = [v]
        while todo:
            x = todo.pop()
            for y in preds[x]:
                if comp[y] == -1:
                    comp[y] = len(groups)
                    group.append(y)
                    todo.append(y)
        groups.append(sorted(group))
    return groups


# -- builtin examples ----------------------------------------------------


def builtin_uniform(r: int) -> MarkovSystem:
    """Uniform chain on the 2r one-letter vertices: every transition not
    returning to the inverse letter has weight 1/(2r-1)."""
    if r < 2:
        raise ValueError("uniform chain needs rank >= 2")
    if r > len(_ALPHA):
        raise ValueError(f"rank {r} exceeds available generator names")
    gens = tuple(_ALPHA[:r])
    names = [g for g in gens] + [g + "'" for g in gens]
    signed = list(range(1, r + 1)) + [-i for i in range(1, r + 1)]
    labels = tuple(ReducedWord((s,), r) for s in signed)
    p = Fraction(1, 2 * r - 1)
    matrix = tuple(
        tuple(p if signed[j] != -signed[i] else Fraction(0) for j in range(2 * r))
        for i in range(2 * r)
    )
    return MarkovSystem(tuple(names), r, gens, labels, matrix)


_OCTAGON = (1, 2, -1, -2, 3, 4, -3, -4)


def builtin_surface() -> MarkovSystem:
    """Eight-interval chain from the genus-2 surface coding.

    Vertices are the special intervals I_s for the eight letters of the
    rank-4 free group, in the cyclic order a, b, a', b', c, d, c', d'.
    There is an edge (I_s, I_t) unless t is the inverse of s or sits next
    to that inverse in the cyclic order; transition weights are uniform
    (1/5) on the support this forces.
    """
    gens = ("a", "b", "c", "d")
    pos = {s: i for i, s in enumerate(_OCTAGON)}

    def name(s: int) -> str:
        g = gens[abs(s) - 1]
        return "I_" + g + ("'" if s < 0 else "")

    def allowed(s: int, t: int) -> bool:
        j = pos[-s]
        blocked = {-s, _OCTAGON[(j - 1) % 8], _OCTAGON[(j + 1) % 8]}
        return t not in blocked

    names = tuple(name(s) for s in _OCTAGON)
    labels = tuple(ReducedWord((s,), 4) for s in _OCTAGON)
    n = 8
    matrix = []
    for i in range(n):
        # row i has the weight of moving the edge-set arrow into vertex i
        row = [
            Fraction(1, 5) if allowed(_OCTAGON[j], _OCTAGON[i]) else Fraction(0)
            for j in range(n)
        ]
        matrix.append(tuple(row))
    return MarkovSystem(names, 4, gens, labels, tuple(matrix))


# -- chain files ----------------------------------------------------------


def chain_to_dict(m: MarkovSystem) -> dict:
    return {
        "rank": m.rank,
        "generators": list(m.generators),
        "vertices": list(m.vertices),
        "labels": {
            v: format_word(lbl, m.generators)
            for v, lbl in zip(m.vertices, m.labels)
        },
        "matrix": [[str(entry) for entry in row] for row in m.matrix],
    }


def _parse_rational(text) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise FormatError(f"expected rational string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {text!r}: {exc}") from None


def chain_from_dict(data: Mapping) -> MarkovSystem:
    try:
        rank = int(data["rank"])
        generators = tuple(str(g) for g in data["generators"])
        vertices = tuple(str(v) for v in data["vertices"])
        raw_labels = data["labels"]
        raw_matrix = data["matrix"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed chain file: {exc}") from None
    if len(generators) != rank:
        raise FormatError(
            f"chain declares rank {rank} but {len(generators)} generators"
        )
    for g in generators:
        if len(g) != 1 or g == "'" or not g.isprintable():
            raise FormatError(f"generator name {g!r} must be a single letter")
    if len(set(generators)) != rank:
        raise FormatError("generator names are not distinct")
    if len(set(vertices)) != len(vertices):
        raise FormatError("vertex names are not distinct")
    missing = [v for v in vertices if v not in raw_labels]
    if missing:
        raise FormatError(f"labels missing for vertices {missing}")
    labels = tuple(parse_word(str(raw_labels[v]), generators) for v in vertices)
    if len(raw_matrix) != len(vertices) or any(
        len(row) != len(vertices) for row in raw_matrix
    ):
        raise FormatError("matrix shape does not match the vertex list")
    matrix = tuple(
        tuple(_parse_rational(entry) for entry in row) for row in raw_matrix
    )
    return MarkovSystem(vertices, rank, generators, labels, matrix)


def load_chain(path) -> MarkovSystem:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return chain_from_dict(data)


def save_chain(m: MarkovSystem, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(chain_to_dict(m), fh, indent=2)
        fh.write("\n")
