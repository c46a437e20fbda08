"""Self-similar graph sequences dual to iterated subdivision of a simplex.

Level 0 is the dual graph of div Δ_d padded with boundary loops to be
(d+1)-regular. Level k lives on [N]^{k+1}: N copies of level k-1 joined along
their boundary sets by label-permuting bijections ρ_ij, with S_{d+1} acting on
every level. Loop-stripped level k should be the dual graph of div^{k+1} Δ_d.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

from .complex import Face, dual_graph, simplex
from .isomorphism import adjacency_lists, are_isomorphic
from .subdivide import SubdivisionKind, SubdivisionResult, iterate, subdivide

__all__ = [
    "FractalData",
    "FractalInvariantError",
    "LevelGraph",
    "build_levels",
    "derive_fractal_data",
    "finitely_ramified_relation",
    "level_zero",
    "next_level",
    "verify_duality",
    "write_level_json",
]

Perm = tuple[int, ...]


class FractalInvariantError(AssertionError):
    pass


def _compose(p: Perm, q: Perm) -> Perm:
    """(p ∘ q)(x) = p(q(x))."""
    return tuple(p[x] for x in q)


def _inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


@dataclass(frozen=True)
class FractalData:
    kind: SubdivisionKind
    d: int
    n: int  # size of each boundary set
    N: int  # vertices of Γ_0
    facets: tuple[Face, ...]
    edges: tuple[tuple[int, int], ...]  # i < j
    loops: tuple[frozenset[int], ...]  # boundary labels m with a loop at i
    boundary: tuple[tuple[int, ...], ...]  # ∂_m Γ_0 for m = 0..d
    kappa: dict  # (i, j) -> κ_i({i,j})
    rho: dict  # (i, j) -> ρ_ij as a permutation of 0..d
    group: tuple[Perm, ...]  # S_{d+1}, identity first
    action: tuple[tuple[int, ...], ...]  # action[g][i] = g·i
    nu: dict  # (g, i) -> ν_{g,i}

    def group_index(self, p: Perm) -> int:
        return self.group.index(p)


@dataclass
class LevelGraph:
    k: int
    size: int
    edges: set[tuple[int, int]]
    loops: list[frozenset[int]]
    boundary: tuple[tuple[int, ...], ...]
    action: list[list[int]]
    N: int = 0
    _adj: list[set[int]] | None = field(default=None, repr=False)

    def adjacency(self) -> list[set[int]]:
        if self._adj is None:
            self._adj = adjacency_lists(self.edges, self.size)
        return self._adj

    def loop_total(self) -> int:
        return sum(len(m) for m in self.loops)

    def vertex_tuple(self, x: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.k + 1):
            x, r = divmod(x, self.N)
            digits.append(r)
        return tuple(reversed(digits))


def _locate(res: SubdivisionResult):
    """Map barycentric positions over the parent simplex to child vertex ids."""
    table = {}
    for v in res.child.vertices:
        pos = res.position(v)
        table[frozenset((u, w) for u, w in pos.items() if w)] = v
    return table


def _permute_vertex(res: SubdivisionResult, table, g: Perm, v: int) -> int:
    pos = res.position(v)
    key = frozenset((g[u], w) for u, w in pos.items() if w)
    return table[key]


def derive_fractal_data(kind: SubdivisionKind, d: int) -> FractalData:
    """Γ_0, boundary sets, labels κ, bijections ρ and the S_{d+1} action for div Δ_d."""
    if kind.tag == "esd" and d != 2:
        raise ValueError("edgewise subdivision is only supported for d = 2")
    if d < 2 and kind.tag != "esd":
        raise ValueError("the construction needs d >= 2")
    res = subdivide(kind, simplex(d))
    child = res.child
    facets = child.faces(d)
    N = len(facets)
    fidx = {f: i for i, f in enumerate(facets)}

    # which boundary side (if any) each codimension-one face lies in
    def side_of(face: Face) -> int | None:
        support = set(res.carrier[face])
        missing = [m for m in range(d + 1) if m not in support]
        return missing[0] if len(support) <= d else None

    gamma = dual_graph(child, d)
    edges = tuple(sorted((min(u, v), max(u, v)) for u, v, _ in gamma.edges))

    kappa: dict[tuple[int, int], int] = {}
    face_label: dict[tuple[int, int], int] = {}  # (facet, opposite vertex) -> label
    loops: list[frozenset[int]] = []
    boundary: list[list[int]] = [[] for _ in range(d + 1)]
    for i, tau in enumerate(facets):
        forced = {}
        for u in tau:
            m = side_of(tuple(x for x in tau if x != u))
            if m is not None:
                if m in forced.values():
                    raise FractalInvariantError("facet has two faces on one side")
                forced[u] = m
                boundary[m].append(i)
        free_labels = iter(sorted(set(range(d + 1)) - set(forced.values())))
        for u in tau:
            face_label[(i, u)] = forced[u] if u in forced else next(free_labels)
        loops.append(frozenset(forced.values()))
    for i, j in edges:
        shared = set(facets[i]) & set(facets[j])
        (ui,) = set(facets[i]) - shared
        (uj,) = set(facets[j]) - shared
        kappa[(i, j)] = face_label[(i, ui)]
        kappa[(j, i)] = face_label[(j, uj)]

    # ρ_ij: label of the face opposite u in τ_i -> label of the face opposite u in τ_j
    rho: dict[tuple[int, int], Perm] = {}
    for i, j in edges:
        for a, b in ((i, j), (j, i)):
            shared = set(facets[a]) & set(facets[b])
            p = [0] * (d + 1)
            for u in facets[a]:
                if u in shared:
                    p[face_label[(a, u)]] = face_label[(b, u)]
            p[kappa[(a, b)]] = kappa[(b, a)]
            if sorted(p) != list(range(d + 1)):
                raise FractalInvariantError("ρ is not a bijection")
            rho[(a, b)] = tuple(p)

    group = tuple(permutations(range(d + 1)))
    table = _locate(res)
    action = []
    nu: dict[tuple[int, int], Perm] = {}
    for g_idx, g in enumerate(group):
        images = []
        for i, tau in enumerate(facets):
            mapped = {u: _permute_vertex(res, table, g, u) for u in tau}
            target = tuple(sorted(mapped.values()))
            if target not in fidx:
                raise FractalInvariantError("symmetry does not map facets to facets")
            t = fidx[target]
            images.append(t)
            p = [0] * (d + 1)
            for u in tau:
                p[face_label[(i, u)]] = face_label[(t, mapped[u])]
            nu[(g_idx, i)] = tuple(p)
        action.append(tuple(images))

    data = FractalData(
        kind=kind,
        d=d,
        n=len(boundary[0]),
        N=N,
        facets=facets,
        edges=edges,
        loops=tuple(loops),
        boundary=tuple(tuple(sorted(b)) for b in boundary),
        kappa=kappa,
        rho=rho,
        group=group,
        action=tuple(action),
        nu=nu,
    )
    _check_data(data)
    return data


def _transposition(d: int, a: int, b: int) -> Perm:
    p = list(range(d + 1))
    p[a], p[b] = b, a
    return tuple(p)


def _check_data(data: FractalData) -> None:
    d = data.d
    adj = adjacency_lists(data.edges, data.N)
    for i in range(data.N):
        if len(adj[i]) + len(data.loops[i]) != d + 1:
            raise FractalInvariantError(f"degree condition fails at vertex {i}")
        labels = [data.kappa[(i, j)] for j in adj[i]] + list(data.loops[i])
        if sorted(labels) != list(range(d + 1)):
            raise FractalInvariantError(f"κ labels at {i} are not a permutation")
    if len({len(b) for b in data.boundary}) != 1:
        raise FractalInvariantError("boundary sets differ in size")
    for i, j in data.rho:
        if data.rho[(j, i)] != _inverse(data.rho[(i, j)]):
            raise FractalInvariantError("ρ_ji is not the inverse of ρ_ij")
    gi = data.group_index
    for a in range(d + 1):
        for b in range(d + 1):
            t = data.action[gi(_transposition(d, a, b))]
            if tuple(sorted(t[v] for v in data.boundary[b])) != data.boundary[a]:
                raise FractalInvariantError("boundary sets are not exchanged by transpositions")
    for g_idx, g in enumerate(data.group):
        act = data.action[g_idx]
        for m in range(d + 1):
            image = tuple(sorted(act[v] for v in data.boundary[m]))
            if image != data.boundary[g[m]]:
                raise FractalInvariantError("boundary sets are not permuted by the action")
        for i, j in data.rho:
            si, sj = act[i], act[j]
            lhs = data.rho[(si, sj)]
            rhs = _compose(_compose(data.nu[(g_idx, j)], data.rho[(i, j)]), _inverse(data.nu[(g_idx, i)]))
            if lhs != rhs:
                raise FractalInvariantError("ρ is not equivariant")


def level_zero(data: FractalData) -> LevelGraph:
    return LevelGraph(
        k=0,
        size=data.N,
        edges=set(data.edges),
        loops=list(data.loops),
        boundary=data.boundary,
        action=[list(a) for a in data.action],
        N=data.N,
    )


def next_level(prev: LevelGraph, data: FractalData) -> LevelGraph:
    """Glue N copies of ``prev`` along their boundary sets."""
    M = prev.size
    N = data.N
    edges: set[tuple[int, int]] = set()
    for i in range(N):
        base = i * M
        edges.update((base + u, base + v) for u, v in prev.edges)
    bsets = [set(b) for b in prev.boundary]
    for i, j in data.edges:
        li, lj = data.kappa[(i, j)], data.kappa[(j, i)]
        g = data.group_index(data.rho[(i, j)])
        for v in prev.boundary[li]:
            w = prev.action[g][v]
            if w not in bsets[lj]:
                raise FractalInvariantError("ρ_ij does not map boundary sets onto each other")
            edges.add((i * M + v, j * M + w))
    loops = []
    for i in range(N):
        for v in range(M):
            loops.append(data.loops[i] & prev.loops[v])
    boundary = tuple(
        tuple(i * M + v for i in data.boundary[m] for v in prev.boundary[m]) for m in range(data.d + 1)
    )
    action = []
    for g_idx in range(len(data.group)):
        row = [0] * (N * M)
        for i in range(N):
            t = data.action[g_idx][i]
            sub = prev.action[data.group_index(data.nu[(g_idx, i)])]
            for v in range(M):
                row[i * M + v] = t * M + sub[v]
        action.append(row)
    level = LevelGraph(prev.k + 1, N * M, {tuple(sorted(e)) for e in edges}, loops, boundary, action, N)
    _check_level(level, data)
    return level


def _check_level(level: LevelGraph, data: FractalData) -> None:
    d = data.d
    adj = level.adjacency()
    for x in range(level.size):
        if len(adj[x]) + len(level.loops[x]) != d + 1:
            raise FractalInvariantError(f"level {level.k}: degree condition fails at {x}")
    for m in range(d + 1):
        if set(level.boundary[m]) != {x for x in range(level.size) if m in level.loops[x]}:
            raise FractalInvariantError("loops do not sit on the boundary sets")
    for g_idx, g in enumerate(data.group):
        act = level.action[g_idx]
        if sorted(act) != list(range(level.size)):
            raise FractalInvariantError("action is not a bijection")
        for u, v in level.edges:
            if tuple(sorted((act[u], act[v]))) not in level.edges:
                raise FractalInvariantError("action does not preserve edges")
        for x in range(level.size):
            if level.loops[act[x]] != frozenset(g[m] for m in level.loops[x]):
                raise FractalInvariantError("action does not preserve loops")
    # group law on every pair of elements
    index = {p: k for k, p in enumerate(data.group)}
    for a_idx, a in enumerate(data.group):
        for b_idx, b in enumerate(data.group):
            ab = level.action[index[_compose(a, b)]]
            act_a, act_b = level.action[a_idx], level.action[b_idx]
            if any(ab[x] != act_a[act_b[x]] for x in range(level.size)):
                raise FractalInvariantError("action is not a group action")


def build_levels(data: FractalData, k: int) -> list[LevelGraph]:
    levels = [level_zero(data)]
    for _ in range(k):
        levels.append(next_level(levels[-1], data))
    return levels


def verify_duality(kind: SubdivisionKind, d: int, k: int) -> bool:
    """Loop-stripped Γ_k is isomorphic to the dual graph of div^{k+1} Δ_d."""
    data = derive_fractal_data(kind, d)
    level = build_levels(data, k)[-1]
    target = iterate(kind, simplex(d), k + 1)[-1]
    dual = dual_graph(target, d)
    return are_isomorphic(level.adjacency(), dual.neighbors())


def finitely_ramified_relation(data: FractalData) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Pairs ((κ_i(e), i), (κ_j(e), j)) that say which copies meet at which corners."""
    if data.n != 1:
        raise ValueError("the corner relation needs singleton boundary sets")
    return [((data.kappa[(i, j)], i), (data.kappa[(j, i)], j)) for i, j in data.edges]


def write_level_json(level: LevelGraph, path: str | Path) -> None:
    payload = {
        "k": level.k,
        "vertices": [list(level.vertex_tuple(x)) for x in range(level.size)],
        "edges": sorted([list(e) for e in level.edges]),
        "loops": [[x, m] for x in range(level.size) for m in sorted(level.loops[x])],
        "boundary": [list(b) for b in level.boundary],
    }
    Path(path).write_text(json.dumps(payload, indent=1))
