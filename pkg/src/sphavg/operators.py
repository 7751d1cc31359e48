"""Induced transition operator, spherical averages, and windowed means.

The one-step operator acts on tables over (vertex, point):

    (step phi)(v, x) = sum_w matrix[v][w] * phi(w, T_v x)

where T_v is the transformation of v's label. Contracting the n-th power
of a lifted point function against the stationary weights reproduces the
length-n path sum exactly:

    S_n f(x) = sum_v nu(v) * (step^n lift f)(v, x)
             = sum over directed paths s of nu(s_n) * weight(s) * f(T_s x)

which is what `spherical` computes and `spherical_direct` cross-checks
by brute-force path enumeration. The convergence report tracks the
windowed averages on the lifted level, in the product norm; by convexity
that error bounds the on-X window error, and unlike the contracted
error it decays monotonically on the benchmark systems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .action import FiniteAction, conditional_expectation, perm_of_word
from .chain import MarkovSystem, StationaryDistribution

Lifted = tuple[tuple, ...]


def lift(m: MarkovSystem, f: Sequence) -> Lifted:
    """Constant-in-vertex table over (vertex, point)."""
    row = tuple(f)
    return tuple(row for _ in m.vertices)


def _label_perms(m: MarkovSystem, a: FiniteAction) -> list[tuple[int, ...]]:
    if m.rank != a.rank:
        raise ValueError(f"chain rank {m.rank} != action rank {a.rank}")
    return [perm_of_word(a, lbl) for lbl in m.labels]


def _step(matrix, perms, phi) -> Lifted:
    n_v = len(matrix)
    n_x = len(phi[0]) if n_v else 0
    out = []
    for v in range(n_v):
        row = matrix[v]
        pv = perms[v]
        out.append(
            tuple(
                sum(row[w] * phi[w][pv[x]] for w in range(n_v) if row[w])
                for x in range(n_x)
            )
        )
    return tuple(out)


def markov_step(m: MarkovSystem, a: FiniteAction, phi: Lifted) -> Lifted:
    """One application of the induced operator."""
    return _step(m.matrix, _label_perms(m, a), phi)


def contract(nu: StationaryDistribution, phi: Lifted) -> tuple:
    """Average the vertex coordinate against the stationary weights."""
    n_v = len(phi)
    n_x = len(phi[0]) if n_v else 0
    return tuple(
        sum(nu.weights[v] * phi[v][x] for v in range(n_v)) for x in range(n_x)
    )


def spherical(
    m: MarkovSystem,
    nu: StationaryDistribution,
    a: FiniteAction,
    f: Sequence,
    n: int,
) -> tuple:
    """Length-n spherical average via n operator steps and contraction."""
    if n < 1:
        raise ValueError("sphere radius must be >= 1")
    perms = _label_perms(m, a)
    phi = lift(m, f)
    for _ in range(n):
        phi = _step(m.matrix, perms, phi)
    return contract(nu, phi)


def spherical_direct(
    m: MarkovSystem,
    nu: StationaryDistribution,
    a: FiniteAction,
    f: Sequence,
    n: int,
    cap: int = 8,
) -> tuple:
    """Literal path sum over all length-n directed paths, exact rationals.

    Independent of the operator route; capped because the number of paths
    grows geometrically.
    """
    if n < 1:
        raise ValueError("sphere radius must be >= 1")
    if n > cap:
        raise ValueError(f"direct path sum capped at {cap} (asked for {n})")
    perms = _label_perms(m, a)
    n_v = len(m.vertices)
    n_x = len(a.points)
    succ = [
        [y for y in range(n_v) if m.matrix[y][x] > 0] for x in range(n_v)
    ]
    out = [Fraction(0)] * n_x

    def walk(last: int, depth: int, weight: Fraction, perm: tuple[int, ...]):
        if depth == n:
            mass = nu.weights[last] * weight
            for x in range(n_x):
                out[x] += mass * f[perm[x]]
            return
        for y in succ[last]:
            walk(
                y,
                depth + 1,
                weight * m.matrix[y][last],
                tuple(perm[perms[y][x]] for x in range(n_x)),
            )

    for v in range(n_v):
        walk(v, 1, Fraction(1), perms[v])
    return tuple(out)


def window_average(
    m: MarkovSystem,
    nu: StationaryDistribution,
    a: FiniteAction,
    f: Sequence,
    n: int,
    k: int,
) -> tuple:
    """Mean of the 2k consecutive spherical averages starting at n."""
    if n < 1 or k < 1:
        raise ValueError("window needs n >= 1 and k >= 1")
    perms = _label_perms(m, a)
    phi = lift(m, f)
    for _ in range(n - 1):
        phi = _step(m.matrix, perms, phi)
    n_x = len(a.points)
    acc = [Fraction(0)] * n_x
    for _ in range(2 * k):
        phi = _step(m.matrix, perms, phi)
        s = contract(nu, phi)
        for x in range(n_x):
            acc[x] += s[x]
    return tuple(value / (2 * k) for value in acc)


def l1_norm(f: Sequence, measure: Sequence) -> object:
    """Measure-weighted absolute sum over the points."""
    return sum(m * abs(v) for m, v in zip(measure, f))


def l1_norm_lifted(
    phi: Lifted, nu: StationaryDistribution, measure: Sequence
) -> object:
    """Product-measure norm over (vertex, point)."""
    return sum(
        nu.weights[v] * m * abs(phi[v][x])
        for v in range(len(phi))
        for x, m in enumerate(measure)
    )


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    k: int
    error: object
    mode: str


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple[ConvergenceRow, ...]

    def errors(self) -> list:
        return [row.error for row in self.rows]

    def write_csv(self, fh) -> None:
        fh.write("n,k,l1_error,mode\n")
        for row in self.rows:
            value = str(row.error) if row.mode == "exact" else repr(row.error)
            fh.write(f"{row.n},{row.k},{value},{row.mode}\n")


def _window_sweep(matrix, perms, f, nuw, target, measure, k, n_lo, n_hi, mode):
    from collections import deque

    n_v = len(matrix)
    n_x = len(f)
    phi = tuple(tuple(f) for _ in range(n_v))
    buf: deque = deque(maxlen=2 * k)
    rows = []
    for power in range(1, n_hi + 2 * k):
        phi = _step(matrix, perms, phi)
        buf.append(phi)
        n = power - 2 * k + 1
        if n >= n_lo:
            err = 0
            for v in range(n_v):
                for x in range(n_x):
                    window = sum(p[v][x] for p in buf) / (2 * k)
                    err += nuw[v] * measure[x] * abs(window - target[x])
            rows.append(ConvergenceRow(n, k, err, mode))
    return rows


def convergence_series(
    m: MarkovSystem,
    a: FiniteAction,
    f: Sequence,
    k: int,
    n_max: int,
    exact_cap: int = 32,
) -> ConvergenceReport:
    """Window-averaged convergence toward the invariant projection.

    Row n reports the product-norm distance between the lifted window
    average over spheres n .. n+2k-1 and the orbit-mean projection of f.
    Rows up to `exact_cap` use exact rationals; later rows rerun the
    sweep in binary floats, and each row records its mode.
    """
    if k < 1 or n_max < 1:
        raise ValueError("window needs k >= 1 and n_max >= 1")
    nu = m.stationary_distribution()
    perms = _label_perms(m, a)
    target = conditional_expectation(a, f)
    rows: list[ConvergenceRow] = []
    n_exact = min(n_max, max(exact_cap, 0))
    if n_exact >= 1:
        rows.extend(
            _window_sweep(
                m.matrix, perms, tuple(f), nu.weights, target,
                a.measure, k, 1, n_exact, "exact",
            )
        )
    if n_max > n_exact:
        fm = tuple(tuple(float(e) for e in row) for row in m.matrix)
        rows.extend(
            _window_sweep(
                fm, perms,
                tuple(float(v) for v in f),
                tuple(float(x) for x in nu.weights),
                tuple(float(v) for v in target),
                tuple(float(x) for x in a.measure),
                k, n_exact + 1, n_max, "float",
            )
        )
    return ConvergenceReport(tuple(rows))
