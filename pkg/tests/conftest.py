"""Shared builders for seeded random systems."""

import random
from fractions import Fraction

from sphavg.action import FiniteAction
from sphavg.chain import MarkovSystem
from sphavg.freegroup import reduce

GENS = ("a", "b")


def random_chain(rnd: random.Random, max_v: int = 4, rank: int = 2) -> MarkovSystem:
    """Random irreducible chain with exact rational rows and short random
    labels; a full cycle through the vertices keeps the support irreducible."""
    n = rnd.randint(1, max_v)
    names = tuple(f"v{i}" for i in range(n))
    support = [set() for _ in range(n)]
    for i in range(n):
        support[i].add((i + 1) % n)
    for i in range(n):
        for j in range(n):
            if rnd.random() < 0.4:
                support[i].add(j)
    matrix = []
    for i in range(n):
        weights = {j: rnd.randint(1, 5) for j in support[i]}
        total = sum(weights.values())
        matrix.append(
            tuple(
                Fraction(weights[j], total) if j in weights else Fraction(0)
                for j in range(n)
            )
        )
    labels = []
    for _ in range(n):
        length = rnd.randint(0, 2)
        raw = [rnd.choice([1, -1, 2, -2]) for _ in range(length)]
        labels.append(reduce(raw, rank))
    return MarkovSystem(names, rank, GENS[:rank], tuple(labels), tuple(matrix))


def random_action(rnd: random.Random, max_x: int = 4, rank: int = 2) -> FiniteAction:
    """Random permutations on a uniform-mass space (uniform mass is
    preserved by every permutation)."""
    n = rnd.randint(1, max_x)
    points = tuple(f"x{i}" for i in range(n))
    maps = []
    for _ in range(rank):
        perm = list(range(n))
        rnd.shuffle(perm)
        maps.append(tuple(perm))
    return FiniteAction(
        points=points,
        measure=tuple(Fraction(1, n) for _ in range(n)),
        generator_names=GENS[:rank],
        generator_maps=tuple(maps),
    )


def random_observable(rnd: random.Random, size: int) -> tuple:
    return tuple(
        Fraction(rnd.randint(-6, 6), rnd.randint(1, 4)) for _ in range(size)
    )
