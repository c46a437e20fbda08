"""Backtracking graph isomorphism with colour refinement.

Small graphs only (a few hundred vertices). Both graphs are refined jointly so
colour ids mean the same thing on each side; a branch is pruned as soon as the
colour histograms disagree.
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

import numpy as np

from .complex import Complex

Adjacency = Sequence[set[int]]


def _refine(adj_g, adj_h, col_g, col_h):
    while True:
        sig_g = [(col_g[v], tuple(sorted(col_g[u] for u in adj_g[v]))) for v in range(len(adj_g))]
        sig_h = [(col_h[v], tuple(sorted(col_h[u] for u in adj_h[v]))) for v in range(len(adj_h))]
        if Counter(sig_g) != Counter(sig_h):
            return None
        palette = {s: k for k, s in enumerate(sorted(set(sig_g)))}
        new_g = [palette[s] for s in sig_g]
        new_h = [palette[s] for s in sig_h]
        if len(palette) == len(set(col_g)):
            return new_g, new_h
        col_g, col_h = new_g, new_h


def find_isomorphism(
    adj_g: Adjacency,
    adj_h: Adjacency,
    colors_g: Sequence[int] | None = None,
    colors_h: Sequence[int] | None = None,
) -> dict[int, int] | None:
    """Colour-preserving isomorphism g -> h as a dict, or None."""
    n = len(adj_g)
    if n != len(adj_h):
        return None
    col_g = list(colors_g) if colors_g is not None else [0] * n
    col_h = list(colors_h) if colors_h is not None else [0] * n
    if Counter(col_g) != Counter(col_h):
        return None
    # shared palette for the initial colours
    palette = {c: k for k, c in enumerate(sorted(set(col_g)))}
    col_g = [palette[c] for c in col_g]
    col_h = [palette[c] for c in col_h]
    return _search(adj_g, adj_h, col_g, col_h)


def _search(adj_g, adj_h, col_g, col_h):
    refined = _refine(adj_g, adj_h, col_g, col_h)
    if refined is None:
        return None
    col_g, col_h = refined
    classes = Counter(col_g)
    if all(c == 1 for c in classes.values()):
        where = {c: v for v, c in enumerate(col_h)}
        mapping = {v: where[c] for v, c in enumerate(col_g)}
        for v, nb in enumerate(adj_g):
            if {mapping[u] for u in nb} != set(adj_h[mapping[v]]):
                return None
        return mapping
    target = min((c for c, k in classes.items() if k > 1), key=lambda c: (classes[c], c))
    u = col_g.index(target)
    fresh = max(classes) + 1
    for v in (w for w, c in enumerate(col_h) if c == target):
        cg = list(col_g)
        ch = list(col_h)
        cg[u] = fresh
        ch[v] = fresh
        found = _search(adj_g, adj_h, cg, ch)
        if found is not None:
            return found
    return None


def adjacency_lists(edges, n: int) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in range(n)]
    for e in edges:
        u, v = e[0], e[1]
        if u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def are_isomorphic(adj_g: Adjacency, adj_h: Adjacency, spectral_tol: float = 1e-8) -> bool:
    """Isomorphism test with an adjacency-spectrum pre-filter."""
    if len(adj_g) != len(adj_h):
        return False
    if sorted(len(a) for a in adj_g) != sorted(len(a) for a in adj_h):
        return False
    ev_g = np.linalg.eigvalsh(_dense(adj_g))
    ev_h = np.linalg.eigvalsh(_dense(adj_h))
    if np.max(np.abs(ev_g - ev_h), initial=0.0) > spectral_tol:
        return False
    return find_isomorphism(adj_g, adj_h) is not None


def _dense(adj: Adjacency) -> np.ndarray:
    A = np.zeros((len(adj), len(adj)))
    for v, nb in enumerate(adj):
        for u in nb:
            A[v, u] = 1.0
    return A


def _incidence_graph(K: Complex, pinned: Sequence[int]):
    verts = list(K.vertices)
    vpos = {v: k for k, v in enumerate(verts)}
    facets = K.facets
    n = len(verts) + len(facets)
    adj: list[set[int]] = [set() for _ in range(n)]
    for t, f in enumerate(facets):
        node = len(verts) + t
        for v in f:
            adj[node].add(vpos[v])
            adj[vpos[v]].add(node)
    colors = [0] * len(verts) + [1 + len(f) for f in facets]
    for k, v in enumerate(pinned):
        colors[vpos[v]] = 100 + k
    return adj, colors, verts


def complex_isomorphism(
    K: Complex,
    L: Complex,
    pinned_k: Sequence[int] = (),
    pinned_l: Sequence[int] = (),
) -> dict[int, int] | None:
    """Simplicial isomorphism K -> L sending pinned_k[i] to pinned_l[i]."""
    if K.f_vector != L.f_vector or len(pinned_k) != len(pinned_l):
        return None
    adj_k, col_k, vk = _incidence_graph(K, pinned_k)
    adj_l, col_l, vl = _incidence_graph(L, pinned_l)
    m = find_isomorphism(adj_k, adj_l, col_k, col_l)
    if m is None:
        return None
    return {vk[a]: vl[m[a]] for a in range(len(vk))}
