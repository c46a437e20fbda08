"""Spectral decimation for iterated cone subdivision.

Closed forms for the two-parameter renormalization map, its semi-conjugacy to a
quadratic polynomial, the determinant of the elementary block matrix X_0,
multiplicity bookkeeping for the factorized characteristic polynomial, and the
resulting limit quantile functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .schreier import cyclic_shift, xi_matrix
from .spectral import StepFunction

__all__ = [
    "PreimageTree",
    "RenormPoint",
    "SingularPointError",
    "SpectrumPrediction",
    "adjacency_limit_quantile",
    "bidim_recursion_residual",
    "det_circulant",
    "det_circulant_explicit",
    "det_x0",
    "det_x0_explicit",
    "laplacian_from_adjacency_limit",
    "limit_quantile_1d",
    "limit_mass",
    "limit_quantile_cd",
    "limit_step_length",
    "multiplicities",
    "predicted_spectrum_adjacency",
    "preimage_tree",
    "psi",
    "renormalize",
    "renormalize_unfactored",
    "semiconjugacy_residual",
    "sine_law",
    "x0_matrix",
]

SINGULAR_TOL = 1e-12
MAX_LIMIT_DEPTH = 16  # 2^(depth+2) steps; deeper tables are too large to materialize


class SingularPointError(ArithmeticError):
    pass


@dataclass(frozen=True)
class RenormPoint:
    mu: float
    lam: float


def _L(p: RenormPoint, d: int) -> float:
    return p.mu - (d - 1) * p.lam - 1


def _phi(p: RenormPoint, d: int) -> float:
    mu, lam = p.mu, p.lam
    return mu * mu - (d - 1) * lam * lam - (d - 2) * lam * mu - 1


def _K(p: RenormPoint, d: int) -> float:
    return _phi(p, d) + p.lam


def renormalize(p: RenormPoint, d: int) -> RenormPoint:
    """(μ, λ) -> (μ', λ') in factored form; raises at zeros of L·K."""
    mu, lam = p.mu, p.lam
    first = (d - 1) * lam - mu + 1
    second = (d - 1) * lam**2 + (d - 2) * lam * mu - lam - mu**2 + 1
    den = first * second
    if abs(den) <= SINGULAR_TOL:
        raise SingularPointError(f"renormalization singular at {p}")
    mu_new = mu + d * lam**2 * ((d - 1) * lam**2 + (d - 2) * lam * mu - mu**2 + mu) / den
    lam_new = lam**2 * (lam + mu - 1) / den
    return RenormPoint(mu_new, lam_new)


def renormalize_unfactored(p: RenormPoint, d: int) -> RenormPoint:
    """Same map written through the Schur-complement quantity α."""
    mu, lam = p.mu, p.lam
    a = (mu + lam) * (lam * (d - 1) - mu) + 1 - lam
    den = a * (a + (d + 1) * lam)
    if abs(den) <= SINGULAR_TOL:
        raise SingularPointError(f"renormalization singular at {p}")
    s0 = (a + d * lam) * d * (mu + lam) - d * lam
    s1 = a + lam - d * lam * (mu + lam)
    return RenormPoint(mu + lam**2 * s0 / den, -(lam**2) * s1 / den)


def psi(p: RenormPoint, d: int) -> float:
    """Ψ = Φ/λ with Φ = μ² - 1 - (d-1)λμ - dλ²."""
    if p.lam == 0:
        raise SingularPointError("Ψ undefined at λ = 0")
    mu, lam = p.mu, p.lam
    return (mu * mu - 1 - (d - 1) * lam * mu - d * lam * lam) / lam


def adjacency_map(z: float, d: int) -> float:
    """g(ζ) = ζ² - (d-1)ζ - (d+1)."""
    return z * z - (d - 1) * z - (d + 1)


def laplacian_map(z: float, d: int) -> float:
    """f(ζ) = ζ(d+3-ζ)."""
    return z * (d + 3 - z)


def semiconjugacy_residual(p: RenormPoint, d: int) -> float:
    """Relative |Ψ(F(p)) - g(Ψ(p))|."""
    target = adjacency_map(psi(p, d), d)
    return abs(psi(renormalize(p, d), d) - target) / max(1.0, abs(target))


def det_x0(p: RenormPoint, d: int) -> float:
    mu, lam = p.mu, p.lam
    expo = comb(d + 1, 2) - (d + 1)
    return _L(p, d) * (mu + lam + 1) * _K(p, d) ** d * ((mu + lam) ** 2 - 1) ** expo


def x0_matrix(p: RenormPoint, d: int) -> np.ndarray:
    """λ(J_d ⊗ I) + A - (μ+λ)I, A carrying a_0^j in block (j, d+1-j)."""
    m = d + 1
    a0 = cyclic_shift(d).astype(float)
    A = np.zeros((d * m, d * m))
    for j in range(1, d + 1):
        col = d + 1 - j
        if 1 <= col <= d:
            A[(j - 1) * m : j * m, (col - 1) * m : col * m] = np.linalg.matrix_power(a0, j)
    J = np.ones((d, d))
    return p.lam * np.kron(J, np.eye(m)) + A - (p.mu + p.lam) * np.eye(d * m)


def det_x0_explicit(p: RenormPoint, d: int) -> float:
    return float(np.linalg.det(x0_matrix(p, d)))


def det_circulant(mu: float, lam: float, d: int) -> float:
    """det(μI + λ Σ_{i=1..d} a^i)."""
    return (mu + d * lam) * (mu - lam) ** d


def det_circulant_explicit(mu: float, lam: float, d: int) -> float:
    a = cyclic_shift(d).astype(float)
    M = mu * np.eye(d + 1) + lam * sum(np.linalg.matrix_power(a, i) for i in range(1, d + 1))
    return float(np.linalg.det(M))


def bidim_recursion_residual(mu: float, d: int, n: int) -> float:
    """Relative gap in D_n(μ,1) = det X_0(μ,1) · D_{n-1}(μ',λ')."""
    p = RenormPoint(mu, 1.0)
    lhs = float(np.linalg.det(xi_matrix(d, n, mu, 1.0)))
    q = renormalize(p, d)
    rhs = det_x0(p, d) * float(np.linalg.det(xi_matrix(d, n - 1, q.mu, q.lam)))
    return abs(lhs - rhs) / max(1.0, abs(lhs))


@dataclass(frozen=True)
class Multiplicities:
    d: int
    n: int
    alpha: tuple[int, ...]  # α_1..α_n
    beta: tuple[int, ...]  # β_2..β_n
    c_d: int
    sigma: tuple[int, ...]  # σ_2..σ_n


def multiplicities(d: int, n: int) -> Multiplicities:
    if d < 2:
        raise ValueError("multiplicities need d >= 2")
    if n < 1:
        raise ValueError("n must be >= 1")
    c_d = comb(d + 1, 2) - (d + 1)

    def beta(k: int) -> int:
        return (d - 1) * ((d + 1) ** (k - 1) - 1) // 2

    alpha = [d] + [beta(k) + d for k in range(2, n + 1)]
    betas = [beta(k) for k in range(2, n + 1)]
    sigmas = []
    for k in range(2, n + 1):
        sig = (d + 1) ** (k - 2) - 1
        sigmas.append(sig)
        # the same sequences satisfy the factorization recursions
        a_prev = alpha[k - 2]
        b_prev = beta(k - 1) if k > 2 else 0
        if alpha[k - 1] != c_d * (d + 1) ** (k - 2) + sig + a_prev + 1:
            raise AssertionError("α recursion violated")
        if betas[k - 2] != (c_d + 1) * (d + 1) ** (k - 2) + b_prev:
            raise AssertionError("β recursion violated")
        # σ_k as a weighted sum of earlier multiplicities
        direct = sum(2 ** (k - 2 - j) * alpha[j - 1] for j in range(1, k - 1))
        direct += sum(2 ** (k - 2 - j) * beta(j) for j in range(2, k - 1))
        if direct != sig:
            raise AssertionError("σ identity violated")
    return Multiplicities(d, n, tuple(alpha), tuple(betas), c_d, tuple(sigmas))


def _quadratic_roots(b: float, c: float) -> tuple[float, float]:
    """Real roots of z² + bz + c, ascending, by the cancellation-free formula."""
    disc = b * b - 4 * c
    if disc < 0:
        if disc > -1e-12 * max(1.0, b * b):
            disc = 0.0
        else:
            raise ValueError("complex preimage")
    root = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(root, b))
    if q == 0:
        return (0.0, 0.0)
    r1, r2 = q, c / q
    return (min(r1, r2), max(r1, r2))


def _dedupe(values: list[float], tol: float = 1e-12) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or abs(v - out[-1]) > tol:
            out.append(v)
    return out


FAMILY_ROOT = {"A": lambda d: 0.0, "B": lambda d: -2.0, "P": lambda d: d + 1.0, "Q": lambda d: d + 3.0}


@dataclass(frozen=True)
class PreimageTree:
    d: int
    family: str
    levels: tuple[tuple[float, ...], ...]


def preimage_tree(d: int, family: str, depth: int) -> PreimageTree:
    """Iterated preimages of the family's root: A/B under g, P/Q under f."""
    if family not in FAMILY_ROOT:
        raise ValueError(f"unknown family {family!r}")
    levels = [[FAMILY_ROOT[family](d)]]
    for _ in range(depth):
        nxt = []
        for y in levels[-1]:
            if family in "AB":
                nxt.extend(_quadratic_roots(-(d - 1), -(d + 1) - y))
            else:
                nxt.extend(_quadratic_roots(-(d + 3), y))
        levels.append(_dedupe(nxt))
    return PreimageTree(d, family, tuple(tuple(lv) for lv in levels))


@dataclass(frozen=True)
class SpectrumPrediction:
    d: int
    n: int
    pairs: tuple[tuple[float, int], ...]

    @property
    def total(self) -> int:
        return sum(m for _, m in self.pairs)

    def expanded(self) -> np.ndarray:
        return np.sort(np.concatenate([np.full(m, v) for v, m in self.pairs]))


def predicted_spectrum_adjacency(d: int, n: int) -> SpectrumPrediction:
    """Eigenvalues of Ξ_n with multiplicities from the factorized determinant."""
    mult = multiplicities(d, n)
    alpha = mult.alpha
    beta = {k: b for k, b in zip(range(2, n + 1), mult.beta)}
    A = preimage_tree(d, "A", n - 1).levels
    B = preimage_tree(d, "B", max(n - 2, 0)).levels
    pairs: list[tuple[float, int]] = [(float(d + 1), 1)]
    for i in range(n):
        pairs.extend((v, alpha[n - i - 1]) for v in A[i])
    for i in range(n - 1):
        pairs.extend((v, beta[n - i]) for v in B[i])
    pairs.sort()
    if sum(m for _, m in pairs) != (d + 1) ** n:
        raise AssertionError("multiplicities do not add up to the matrix order")
    return SpectrumPrediction(d, n, tuple(pairs))


def limit_step_length(d: int, i: int) -> Fraction:
    """Length carried by each depth-i value of the cone limit distribution."""
    return Fraction(d - 1, 2 * (d + 1) ** (i + 1))


def _limit_steps(d: int, depth: int, families: tuple[str, str]):
    if not 0 <= depth <= MAX_LIMIT_DEPTH:
        raise ValueError(f"depth must lie in 0..{MAX_LIMIT_DEPTH}")
    steps = []
    for fam in families:
        tree = preimage_tree(d, fam, depth)
        for i, level in enumerate(tree.levels):
            steps.extend((v, limit_step_length(d, i)) for v in level)
    steps.sort(key=lambda s: s[0])
    tail = Fraction(2, d + 1) ** (depth + 1)
    return steps, tail


def _normalized(steps, tail: Fraction) -> StepFunction:
    scale = 1 - tail
    return StepFunction.from_steps((v, w / scale) for v, w in steps)


def limit_quantile_cd(d: int, depth: int) -> tuple[StepFunction, Fraction]:
    """Truncated limit of Λ(𝓛(cd^n K)) with its omitted mass.

    The returned function keeps every value of depth <= ``depth`` with its
    exact length, rescaled so lengths sum to one. The omitted mass ``tail``
    carries values in [0, d+3], so the L1 error of the truncation is at most
    (d+3)·tail.
    """
    if d < 2:
        raise ValueError("the cone limit law is stated for d >= 2; use sine_law for d = 1")
    steps, tail = _limit_steps(d, depth, ("P", "Q"))
    return _normalized(steps, tail), tail


def limit_mass(d: int, depth: int) -> Fraction:
    """Exact sum of unnormalized step lengths up to ``depth``."""
    return sum((2 * 2**i * limit_step_length(d, i) for i in range(depth + 1)), Fraction(0))


def adjacency_limit_quantile(d: int, depth: int) -> tuple[StepFunction, Fraction]:
    steps, tail = _limit_steps(d, depth, ("B", "A"))
    return _normalized(steps, tail), tail


def laplacian_from_adjacency_limit(d: int, depth: int) -> StepFunction:
    """(d+1) - Λ_adj(1-x): the Laplacian limit via the reflection σ(x) = d+1-x."""
    adj, _ = adjacency_limit_quantile(d, depth)
    return adj.reflect(d + 1)


def sine_law(x: float) -> float:
    """The d = 1 limit 4 sin²(πx/2)."""
    return 4.0 * math.sin(math.pi * x / 2) ** 2


def limit_quantile_1d(samples: int) -> StepFunction:
    """Left-endpoint discretization of the sine law on ``samples`` equal cells."""
    if samples < 2:
        raise ValueError("need at least two samples")
    step = Fraction(1, samples)
    return StepFunction.from_steps((sine_law(k / samples), step) for k in range(samples))
