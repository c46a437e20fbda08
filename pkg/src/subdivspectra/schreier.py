"""Schreier graphs of the two-generator self-similar action on the (d+1)-ary tree.

Words are tuples over the letters 1..d+1, first letter first. Vertex indices use
reverse-lexicographic order: the last letter is the most significant digit, so
Ξ_n splits into (d+1) x (d+1) blocks indexed by the last letter.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .complex import Face, SignedGraph, dual_graph, simplex
from .subdivide import SubdivisionKind, iterate_results

__all__ = [
    "FacetLabeling",
    "SchreierGraph",
    "SizeBudgetError",
    "act_a",
    "act_b",
    "alpha",
    "block_form",
    "build_schreier",
    "cyclic_shift",
    "facet_labeling",
    "index_word",
    "loop_count",
    "reduced",
    "size_budget",
    "verify_approx",
    "word_index",
    "xi_matrix",
]

Word = tuple[int, ...]


class SizeBudgetError(ValueError):
    pass


def size_budget(default: int = 3000) -> int:
    """Largest matrix order we agree to build; override via SUBDIVSPECTRA_MAX_SIZE."""
    raw = os.environ.get("SUBDIVSPECTRA_MAX_SIZE")
    return int(raw) if raw else default


def word_index(w: Word, d: int) -> int:
    return sum((x - 1) * (d + 1) ** k for k, x in enumerate(w))


def index_word(idx: int, d: int, n: int) -> Word:
    out = []
    for _ in range(n):
        idx, r = divmod(idx, d + 1)
        out.append(r + 1)
    return tuple(out)


def alpha(x: int, d: int, k: int = 1) -> int:
    """The cycle (d+1 d ... 2 1) applied k times: x -> x - k, wrapping in 1..d+1."""
    return (x - 1 - k) % (d + 1) + 1


def act_a(w: Word, k: int, d: int) -> Word:
    if not w:
        return w
    return w[:-1] + (alpha(w[-1], d, k),)


def act_b(w: Word, d: int) -> Word:
    if len(w) <= 1:
        return w
    prefix, x = w[:-1], w[-1]
    if x == d + 1:
        return act_b(prefix, d) + (x,)
    return act_a(prefix, d + 1 - x, d) + (d + 1 - x,)


@dataclass(frozen=True)
class SchreierGraph:
    d: int
    n: int
    adjacency: np.ndarray

    @property
    def order(self) -> int:
        return self.adjacency.shape[0]


def _check_budget(order: int, budget: int | None) -> None:
    limit = size_budget() if budget is None else budget
    if order > limit:
        raise SizeBudgetError(f"order {order} exceeds size budget {limit}")


def build_schreier(d: int, n: int, budget: int | None = None) -> SchreierGraph:
    """Ξ_n = Σ_{k=1..d} ρ(a^k) + ρ(b), built from the word action."""
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    N = (d + 1) ** n
    _check_budget(N, budget)
    A = np.zeros((N, N), dtype=np.int64)
    for idx in range(N):
        w = index_word(idx, d, n)
        for k in range(1, d + 1):
            A[word_index(act_a(w, k, d), d), idx] += 1
        A[word_index(act_b(w, d), d), idx] += 1
    return SchreierGraph(d, n, A)


def cyclic_shift(d: int) -> np.ndarray:
    """Permutation matrix of α on the letters: column x has its one in row α(x)."""
    P = np.zeros((d + 1, d + 1), dtype=np.int64)
    for x in range(1, d + 2):
        P[alpha(x, d) - 1, x - 1] = 1
    return P


@lru_cache(maxsize=None)
def _b_block(d: int, n: int) -> np.ndarray:
    if n == 1:
        return np.eye(d + 1, dtype=np.int64)
    m = (d + 1) ** (n - 1)
    # a acting on the last letter of a length-(n-1) word is the most significant digit
    a_prev = np.kron(cyclic_shift(d), np.eye(m // (d + 1), dtype=np.int64))
    out = np.zeros((m * (d + 1), m * (d + 1)), dtype=np.int64)
    for j in range(1, d + 1):
        col = d + 1 - j
        out[(j - 1) * m : j * m, (col - 1) * m : col * m] = np.linalg.matrix_power(a_prev, j)
    out[d * m :, d * m :] = _b_block(d, n - 1)
    return out


def block_form(d: int, n: int) -> np.ndarray:
    """Ξ_n rebuilt as J⊗I + b_n - I from the antidiagonal block description."""
    m = (d + 1) ** (n - 1)
    J = np.ones((d + 1, d + 1), dtype=np.int64)
    return np.kron(J, np.eye(m, dtype=np.int64)) + _b_block(d, n) - np.eye(m * (d + 1), dtype=np.int64)


def xi_matrix(d: int, n: int, mu: float, lam: float) -> np.ndarray:
    """Ξ_n(μ, λ) = λ(J⊗I) + b_n - (λ+μ)I; at λ = 1 this is Ξ_n - μI."""
    m = (d + 1) ** (n - 1)
    J = np.ones((d + 1, d + 1))
    N = m * (d + 1)
    return lam * np.kron(J, np.eye(m)) + _b_block(d, n) - (lam + mu) * np.eye(N)


def reduced(g: SchreierGraph) -> SignedGraph:
    """G_n with loops dropped; all edges carry sign +1."""
    A = g.adjacency
    edges = []
    for u in range(g.order):
        for v in np.nonzero(A[u, u + 1 :])[0]:
            edges.append((u, u + 1 + int(v), 1))
    return SignedGraph(g.order, tuple(edges))


def loop_count(g: SchreierGraph) -> int:
    return int(np.trace(g.adjacency))


@dataclass(frozen=True)
class FacetLabeling:
    d: int
    n: int
    facets: tuple[Face, ...]  # facets of cd^n Δ_d in lex order
    words: tuple[Word, ...]  # words[i] labels facets[i]

    def word_of(self, facet: Face) -> Word:
        return self.words[self.facets.index(facet)]


def facet_labeling(d: int, n: int, first_level: tuple[int, ...] | None = None) -> FacetLabeling:
    """Address every facet of cd^n Δ_d by a word of length n.

    ``first_level`` optionally permutes the letters given to the facets of cd Δ_d
    (lex order); any choice yields a valid labeling.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    results = iterate_results(SubdivisionKind("cd"), simplex(d), n)
    first = results[0].child.faces(d)
    perm = first_level or tuple(range(1, d + 2))
    if sorted(perm) != list(range(1, d + 2)):
        raise ValueError("first_level must be a permutation of 1..d+1")
    label: dict[Face, Word] = {f: (perm[k],) for k, f in enumerate(first)}

    for res in results[1:]:
        parent_complex = res.parent
        cofaces: dict[Face, list[Face]] = {}
        for nu in parent_complex.faces(d):
            for k in range(d + 1):
                cofaces.setdefault(nu[:k] + nu[k + 1 :], []).append(nu)
        new_label: dict[Face, Word] = {}
        for tau in res.child.faces(d):
            nu = res.carrier[tau]
            centre = next(v for v in tau if v in res.new_vertex_provenance
                          and res.new_vertex_provenance[v].face == nu)
            sigma = tuple(v for v in tau if v != centre)
            others = [c for c in cofaces[sigma] if c != nu]
            letter = d + 1
            if others:
                w, w2 = label[nu], label[others[0]]
                if w[:-1] == w2[:-1]:
                    letter = (w2[-1] - w[-1]) % (d + 1)
            new_label[tau] = label[nu] + (letter,)
        label = new_label

    facets = tuple(results[-1].child.faces(d))
    words = tuple(label[f] for f in facets)
    if len(set(words)) != len(words):
        raise AssertionError("facet labeling is not injective")
    return FacetLabeling(d, n, facets, words)


def verify_approx(d: int, n: int) -> bool:
    """Unsigned dual graph of cd^n Δ_d equals the loop-free Schreier graph under φ_n."""
    lab = facet_labeling(d, n)
    K = iterate_results(SubdivisionKind("cd"), simplex(d), n)[-1].child
    gamma = dual_graph(K, d)
    pos = {f: i for i, f in enumerate(K.faces(d))}
    to_index = {pos[f]: word_index(w, d) for f, w in zip(lab.facets, lab.words)}
    mapped = {frozenset((to_index[u], to_index[v])) for u, v, _ in gamma.edges}
    schreier = {frozenset((u, v)) for u, v, _ in reduced(build_schreier(d, n)).edges}
    return mapped == schreier
