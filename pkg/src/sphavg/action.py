"""Finite measure-preserving actions of a free group.

An action is one permutation of a finite probability space per
generator, extended to words homomorphically with the left convention:
the word ``uv`` acts as u after v. Observables are plain value tables
aligned with the point list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .freegroup import FormatError, ReducedWord


@dataclass(frozen=True)
class FiniteAction:
    points: tuple[str, ...]
    measure: tuple[Fraction, ...]
    generator_names: tuple[str, ...]
    generator_maps: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.generator_maps)

    def point_index(self, x: str) -> int:
        try:
            return self.points.index(x)
        except ValueError:
            raise ValueError(f"unknown point {x!r}") from None

    def validate(self) -> list[str]:
        """Exact checks: each generator map a bijection preserving the
        measure pointwise, total mass 1."""
        problems: list[str] = []
        n = len(self.points)
        if len(set(self.points)) != n:
            problems.append("point names are not distinct")
        if len(self.measure) != n:
            problems.append("measure is not total on the points")
            return problems
        for x, mass in zip(self.points, self.measure):
            if mass < 0:
                problems.append(f"negative mass {mass} at {x!r}")
        total = sum(self.measure, Fraction(0))
        if total != 1:
            problems.append(f"measure sums to {total}, expected 1")
        if len(self.generator_names) != len(self.generator_maps):
            problems.append("generator names do not match the maps")
        for name, perm in zip(self.generator_names, self.generator_maps):
            if sorted(perm) != list(range(n)):
                problems.append(f"generator {name!r} is not a bijection")
                continue
            for x in range(n):
                if self.measure[perm[x]] != self.measure[x]:
                    problems.append(
                        f"generator {name!r} moves mass {self.measure[x]} at "
                        f"{self.points[x]!r} onto mass {self.measure[perm[x]]}"
                    )
                    break
        return problems


def perm_of_word(a: FiniteAction, w: ReducedWord) -> tuple[int, ...]:
    """Permutation table of the word's action (letters applied right to
    left, so the leftmost letter acts last)."""
    if w.rank != a.rank:
        raise ValueError(f"word rank {w.rank} != action rank {a.rank}")
    n = len(a.points)
    inverses = [tuple(p.index(x) for x in range(n)) for p in a.generator_maps]
    perm = tuple(range(n))
    for letter in reversed(w.letters):
        table = (
            a.generator_maps[letter - 1] if letter > 0 else inverses[-letter - 1]
        )
        perm = tuple(table[perm[x]] for x in range(n))
    return perm


def act(a: FiniteAction, w: ReducedWord, x: str) -> str:
    """Image of the point x under the word's transformation."""
    return a.points[perm_of_word(a, w)[a.point_index(x)]]


def orbits(a: FiniteAction) -> tuple[tuple[str, ...], ...]:
    """Partition of the points under all generators and inverses,
    ordered by least member index."""
    n = len(a.points)
    parent = list(range(n))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for perm in a.generator_maps:
        for x in range(n):
            rx, ry = find(x), find(perm[x])
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    groups: dict[int, list[int]] = {}
    for x in range(n):
        groups.setdefault(find(x), []).append(x)
    return tuple(
        tuple(a.points[i] for i in groups[root]) for root in sorted(groups)
    )


def conditional_expectation(a: FiniteAction, f: Sequence) -> tuple:
    """Projection onto functions constant on orbits: each orbit gets its
    measure-weighted mean (orbits of mass zero get 0)."""
    if len(f) != len(a.points):
        raise ValueError("observable is not total on the points")
    out = [None] * len(a.points)
    for orbit in orbits(a):
        idx = [a.point_index(x) for x in orbit]
        mass = sum((a.measure[i] for i in idx), Fraction(0))
        if mass == 0:
            value = 0
        else:
            value = sum(a.measure[i] * f[i] for i in idx) / mass
        for i in idx:
            out[i] = value
    return tuple(out)


def is_ergodic(a: FiniteAction) -> bool:
    """True iff a single orbit carries the whole mass."""
    for orbit in orbits(a):
        mass = sum((a.measure[a.point_index(x)] for x in orbit), Fraction(0))
        if mass == 1:
            return True
    return False


# -- builtin actions -------------------------------------------------------


def builtin_parity(rank: int, generator_names: Sequence[str]) -> FiniteAction:
    """Two points of mass 1/2; every generator swaps them."""
    swap = (1, 0)
    return FiniteAction(
        points=("0", "1"),
        measure=(Fraction(1, 2), Fraction(1, 2)),
        generator_names=tuple(generator_names),
        generator_maps=tuple(swap for _ in range(rank)),
    )


def builtin_zmod(n: int, rank: int, generator_names: Sequence[str]) -> FiniteAction:
    """Integers mod n with uniform mass: the first generator adds 1, the
    second doubles (n must be odd for doubling to be a bijection), any
    further generators act trivially."""
    if n < 1:
        raise ValueError("modulus must be positive")
    if rank >= 2 and n % 2 == 0:
        raise ValueError(f"doubling is not a bijection mod {n}")
    maps = [tuple((x + 1) % n for x in range(n))]
    if rank >= 2:
        maps.append(tuple((2 * x) % n for x in range(n)))
    for _ in range(rank - 2):
        maps.append(tuple(range(n)))
    return FiniteAction(
        points=tuple(str(i) for i in range(n)),
        measure=tuple(Fraction(1, n) for _ in range(n)),
        generator_names=tuple(generator_names),
        generator_maps=tuple(maps),
    )


# -- action files -----------------------------------------------------------


def action_to_dict(a: FiniteAction) -> dict:
    return {
        "points": list(a.points),
        "measure": [str(x) for x in a.measure],
        "generators": {
            name: list(perm)
            for name, perm in zip(a.generator_names, a.generator_maps)
        },
    }


def action_from_dict(data: Mapping) -> FiniteAction:
    try:
        points = tuple(str(x) for x in data["points"])
        raw_measure = data["measure"]
        raw_gens = data["generators"]
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed action file: {exc}") from None
    if len(raw_measure) != len(points):
        raise FormatError("measure length does not match the point list")
    measure = []
    for entry in raw_measure:
        if isinstance(entry, int):
            measure.append(Fraction(entry))
            continue
        try:
            measure.append(Fraction(str(entry).strip()))
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"bad rational {entry!r}: {exc}") from None
    names = tuple(str(g) for g in raw_gens)
    maps = []
    for g in names:
        table = raw_gens[g]
        if len(table) != len(points) or any(
            not isinstance(i, int) or not (0 <= i < len(points)) for i in table
        ):
            raise FormatError(
                f"generator {g!r} must list one point index (0-based) per point"
            )
        maps.append(tuple(table))
    return FiniteAction(points, tuple(measure), names, tuple(maps))


def load_action(path) -> FiniteAction:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return action_from_dict(data)


def save_action(a: FiniteAction, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(action_to_dict(a), fh, indent=2)
        fh.write("\n")
