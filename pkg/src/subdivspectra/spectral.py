"""Eigenvalues, shifted spectral quantile functions and their L1 distances.

A quantile function is kept as a :class:`StepFunction` with exact rational
breakpoints, so distances only involve floating point through the step values.
"""

from __future__ import annotations

import csv
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "StepFunction",
    "eigenvalues_sym",
    "l1_distance",
    "max_residual",
    "quantile_function",
    "read_step_csv",
    "spectrum_of",
    "wielandt_check",
    "write_step_csv",
]

DEFAULT_TOL = 1e-10


class NotSymmetricError(ValueError):
    pass


def _as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class StepFunction:
    """Nondecreasing right-continuous step function on [0, 1].

    ``values[j]`` holds on ``[breakpoints[j], breakpoints[j+1])``.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        bp, vals = self.breakpoints, self.values
        if len(bp) != len(vals) + 1 or not vals:
            raise ValueError("need one more breakpoint than values")
        if bp[0] != 0 or bp[-1] != 1:
            raise ValueError("domain must be exactly [0, 1]")
        if any(a >= b for a, b in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError("values must be nondecreasing")

    @classmethod
    def from_steps(cls, steps: Iterable[tuple[float, Fraction]], merge_tol: float = 0.0):
        """Build from (value, length) pairs listed in increasing value order."""
        bps = [Fraction(0)]
        vals: list[float] = []
        weights: list[Fraction] = []
        for value, length in steps:
            length = _as_fraction(length)
            if length <= 0:
                continue
            if vals and abs(value - vals[-1]) <= merge_tol * max(1.0, abs(value)):
                # weighted mean keeps the integral unchanged
                w = weights[-1] + length
                vals[-1] = float((vals[-1] * float(weights[-1]) + value * float(length)) / float(w))
                weights[-1] = w
                bps[-1] += length
            else:
                vals.append(float(value))
                weights.append(length)
                bps.append(bps[-1] + length)
        if bps[-1] != 1:
            raise ValueError(f"step lengths sum to {bps[-1]}, not 1")
        return cls(tuple(bps), tuple(vals))

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls((Fraction(0), Fraction(1)), (float(value),))

    @property
    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in zip(self.breakpoints, self.breakpoints[1:]))

    def steps(self) -> list[tuple[float, Fraction]]:
        return list(zip(self.values, self.lengths))

    def __call__(self, x: float) -> float:
        if not 0 <= x <= 1:
            raise ValueError("step functions live on [0, 1]")
        j = bisect_right(self.breakpoints, _as_fraction(x)) - 1
        return self.values[min(j, len(self.values) - 1)]

    def integral(self) -> float:
        return float(sum(v * float(w) for v, w in self.steps()))

    def shift(self, c: float) -> "StepFunction":
        return StepFunction(self.breakpoints, tuple(v + c for v in self.values))

    def reflect(self, about: float) -> "StepFunction":
        """x -> about - F(1 - x), again nondecreasing and right-continuous."""
        bps = tuple(1 - b for b in reversed(self.breakpoints))
        return StepFunction(bps, tuple(about - v for v in reversed(self.values)))

    def rows(self) -> list[tuple[Fraction, Fraction, float]]:
        return [(a, b, v) for a, b, v in zip(self.breakpoints, self.breakpoints[1:], self.values)]


def eigenvalues_sym(M, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Ascending eigenvalues of a real symmetric matrix.

    Raises NotSymmetricError if ``M`` is asymmetric beyond ``tol`` relative to
    its largest entry.
    """
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if A.size == 0:
        return np.zeros(0)
    scale = max(1.0, float(np.max(np.abs(A))))
    if np.max(np.abs(A - A.T)) > tol * scale:
        raise NotSymmetricError("matrix is not symmetric within tolerance")
    return np.linalg.eigvalsh((A + A.T) / 2)


def max_residual(M, count: int = 5, seed: int = 0) -> float:
    """Largest ||Mv - λv|| / ||M|| over a few eigenpairs, for spot checks."""
    A = np.asarray(M, dtype=float)
    w, V = np.linalg.eigh(A)
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(w), size=min(count, len(w)), replace=False)
    norm = max(1.0, float(np.linalg.norm(A, 2)))
    return max(float(np.linalg.norm(A @ V[:, k] - w[k] * V[:, k])) / norm for k in picks)


def quantile_function(eigs: Sequence[float], merge_tol: float = 1e-9) -> StepFunction:
    """Λ(L): the j-th smallest eigenvalue on [(j-1)/N, j/N).

    Neighbouring eigenvalues within ``merge_tol`` (relative) share one run.
    """
    vals = np.sort(np.asarray(eigs, dtype=float))
    if vals.size == 0:
        raise ValueError("empty spectrum")
    step = Fraction(1, len(vals))
    return StepFunction.from_steps(((float(v), step) for v in vals), merge_tol=merge_tol)


def spectrum_of(M, tol: float = DEFAULT_TOL) -> StepFunction:
    return quantile_function(eigenvalues_sym(M, tol))


def l1_distance(F: StepFunction, G: StepFunction) -> float:
    """Exact-breakpoint evaluation of the integral of |F - G| over [0, 1]."""
    grid = sorted(set(F.breakpoints) | set(G.breakpoints))
    total = 0.0
    i = j = 0
    for a, b in zip(grid, grid[1:]):
        while F.breakpoints[i + 1] <= a:
            i += 1
        while G.breakpoints[j + 1] <= a:
            j += 1
        total += abs(F.values[i] - G.values[j]) * float(b - a)
    return total


def wielandt_check(L, E, slack: float = 1e-9) -> tuple[float, float, bool]:
    """Compare ||Λ(L+E) - Λ(L)||_1 with the normalized entrywise 1-norm of E."""
    L = np.asarray(L, dtype=float)
    E = np.asarray(E, dtype=float)
    if L.shape != E.shape:
        raise ValueError("L and E must have the same order")
    n = L.shape[0]
    lhs = l1_distance(spectrum_of(L + E), spectrum_of(L))
    rhs = float(np.abs(E).sum()) / n
    return lhs, rhs, lhs <= rhs + slack


def write_step_csv(F: StepFunction, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x_left", "x_right", "value"])
        for a, b, v in F.rows():
            w.writerow([str(a), str(b), repr(v)])


def read_step_csv(path: str | Path) -> StepFunction:
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    bps = [Fraction(rows[0]["x_left"])] + [Fraction(r["x_right"]) for r in rows]
    return StepFunction(tuple(bps), tuple(float(r["value"]) for r in rows))
