"""Oriented abstract simplicial complexes, boundary operators and Laplacians.

Faces are stored as strictly ascending tuples of vertex ids; the ascending
order is the canonical orientation of every face. Signs of boundary
coefficients and dual-graph edges are all derived from it.
"""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Face = tuple[int, ...]

__all__ = [
    "Complex",
    "Face",
    "GluingError",
    "GluingSpec",
    "SignedGraph",
    "SignedSparseMatrix",
    "boundary_matrix",
    "boundary_of_simplex",
    "complex_laplacian_of_dual",
    "down_laplacian",
    "dual_graph",
    "from_facets",
    "full_laplacian",
    "glue",
    "load_complex",
    "save_complex",
    "signed_adjacency",
    "signed_laplacian",
    "simplex",
    "up_laplacian",
]


class GluingError(ValueError):
    """Raised when a vertex identification does not define a gluing."""


def _canonical(vertices: Iterable[int]) -> Face:
    face = tuple(sorted(set(int(v) for v in vertices)))
    if not face:
        raise ValueError("faces must be nonempty")
    if face[0] < 0:
        raise ValueError(f"vertex ids must be non-negative, got {face}")
    return face


@dataclass(frozen=True)
class Complex:
    """Downward-closed family of faces, indexed per dimension.

    ``faces_by_dim[i]`` lists the i-faces in lexicographic order; that order is
    the row/column order of every matrix built from the complex.
    """

    faces_by_dim: tuple[tuple[Face, ...], ...]
    _index: tuple[dict[Face, int], ...] = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.faces_by_dim) - 1

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(f[0] for f in self.faces_by_dim[0])

    def faces(self, i: int) -> tuple[Face, ...]:
        if 0 <= i <= self.dim:
            return self.faces_by_dim[i]
        return ()

    def index(self, face: Sequence[int]) -> int:
        face = tuple(face)
        return self._index[len(face) - 1][face]

    def __contains__(self, face: object) -> bool:
        if not isinstance(face, tuple) or not face:
            return False
        i = len(face) - 1
        return i <= self.dim and face in self._index[i]

    @property
    def f_vector(self) -> tuple[int, ...]:
        return tuple(len(fs) for fs in self.faces_by_dim)

    @property
    def facets(self) -> tuple[Face, ...]:
        """Maximal faces, in (dimension, lexicographic) order."""
        covered: set[Face] = set()
        for i in range(1, self.dim + 1):
            for face in self.faces_by_dim[i]:
                for j in range(len(face)):
                    covered.add(face[:j] + face[j + 1 :])
        return tuple(f for fs in self.faces_by_dim for f in fs if f not in covered)

    def is_pure(self) -> bool:
        return all(len(f) == self.dim + 1 for f in self.facets)

    def is_pseudomanifold(self) -> bool:
        """Pure, and every codimension-one face lies in at most two facets."""
        if not self.is_pure() or self.dim == 0:
            return self.is_pure()
        counts: dict[Face, int] = defaultdict(int)
        for face in self.faces_by_dim[self.dim]:
            for j in range(len(face)):
                counts[face[:j] + face[j + 1 :]] += 1
        return max(counts.values()) <= 2

    def subcomplex(self, keep: Iterable[Face]) -> "Complex":
        return from_facets(list(keep))

    def induced(self, vertex_set: Iterable[int]) -> "Complex | None":
        """Vertex-induced subcomplex, or None when no vertex survives."""
        vs = set(vertex_set)
        kept = [f for fs in self.faces_by_dim for f in fs if vs.issuperset(f)]
        return from_facets(kept) if kept else None

    def to_json(self) -> dict:
        return {"facets": [list(f) for f in self.facets]}


def from_facets(facets: Iterable[Sequence[int]]) -> Complex:
    """Downward closure of ``facets``.

    Facets contained in other facets are absorbed without complaint.
    """
    tops = {_canonical(f) for f in facets}
    if not tops:
        raise ValueError("a complex needs at least one facet")
    dim = max(len(f) for f in tops) - 1
    layers: list[set[Face]] = [set() for _ in range(dim + 1)]
    for f in tops:
        layers[len(f) - 1].add(f)
    for i in range(dim, 0, -1):
        for f in layers[i]:
            for j in range(i + 1):
                layers[i - 1].add(f[:j] + f[j + 1 :])
    faces = tuple(tuple(sorted(layer)) for layer in layers)
    index = tuple({f: k for k, f in enumerate(fs)} for fs in faces)
    return Complex(faces, index)


def simplex(d: int, offset: int = 0) -> Complex:
    """The standard d-simplex on vertices ``offset .. offset + d``."""
    return from_facets([range(offset, offset + d + 1)])


def boundary_of_simplex(d: int) -> Complex:
    """The boundary of the standard (d+1)-simplex, a d-dimensional sphere."""
    return from_facets(combinations(range(d + 2), d + 1))


@dataclass(frozen=True)
class SignedSparseMatrix:
    rows: int
    cols: int
    entries: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        seen = {(r, c) for r, c, _ in self.entries}
        if len(seen) != len(self.entries):
            raise ValueError("duplicate (row, col) entries")

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.int64)
        for r, c, v in self.entries:
            out[r, c] = v
        return out

    def transpose(self) -> "SignedSparseMatrix":
        return SignedSparseMatrix(
            self.cols, self.rows, tuple(sorted((c, r, v) for r, c, v in self.entries))
        )

    def write_csv(self, path: str | Path) -> None:
        write_triplets(path, self.entries)


def write_triplets(path: str | Path, entries: Iterable[tuple[int, int, int]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "value"])
        for r, c, v in entries:
            w.writerow([r, c, v])


def dense_triplets(matrix: np.ndarray) -> list[tuple[int, int, int]]:
    rows, cols = np.nonzero(matrix)
    return [(int(r), int(c), int(matrix[r, c])) for r, c in zip(rows, cols)]


def _check_dim(K: Complex, i: int, lo: int) -> None:
    if not lo <= i <= K.dim:
        raise ValueError(f"dimension {i} outside [{lo}, {K.dim}]")


def boundary_matrix(K: Complex, i: int) -> SignedSparseMatrix:
    """Matrix of the boundary map from i-chains to (i-1)-chains."""
    _check_dim(K, i, 1)
    lower = K._index[i - 1]
    entries = []
    for col, face in enumerate(K.faces_by_dim[i]):
        for j in range(i + 1):
            row = lower[face[:j] + face[j + 1 :]]
            entries.append((row, col, -1 if j % 2 else 1))
    entries.sort()
    return SignedSparseMatrix(len(lower), len(K.faces_by_dim[i]), tuple(entries))


def down_laplacian(K: Complex, i: int) -> np.ndarray:
    _check_dim(K, i, 1)
    B = boundary_matrix(K, i).to_dense()
    return B.T @ B


def up_laplacian(K: Complex, i: int) -> np.ndarray:
    _check_dim(K, i, 0)
    if i == K.dim:
        n = len(K.faces_by_dim[i])
        return np.zeros((n, n), dtype=np.int64)
    B = boundary_matrix(K, i + 1).to_dense()
    return B @ B.T


def full_laplacian(K: Complex, i: int) -> np.ndarray:
    _check_dim(K, i, 0)
    L = up_laplacian(K, i)
    if i >= 1:
        L = L + down_laplacian(K, i)
    return L


@dataclass(frozen=True)
class SignedGraph:
    """Undirected signed graph with optional per-vertex loop multiplicities."""

    n: int
    edges: tuple[tuple[int, int, int], ...]
    loops: tuple[int, ...] = ()

    def __post_init__(self):
        pairs = set()
        for u, v, s in self.edges:
            if u == v:
                raise ValueError("edges must join distinct vertices")
            if s not in (-1, 1):
                raise ValueError("edge signs must be +1 or -1")
            key = (min(u, v), max(u, v))
            if key in pairs:
                raise ValueError(f"edge {key} stored twice")
            pairs.add(key)
        if self.loops and len(self.loops) != self.n:
            raise ValueError("loop vector must have one entry per vertex")

    @property
    def loop_vector(self) -> tuple[int, ...]:
        return self.loops or (0,) * self.n

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def neighbors(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v, _ in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def edge_set(self) -> set[tuple[int, int]]:
        return {(min(u, v), max(u, v)) for u, v, _ in self.edges}


def dual_graph(K: Complex, i: int) -> SignedGraph:
    """Signed i-dual graph: i-faces joined when they share an (i-1)-face.

    The sign of an edge is the product of the two boundary coefficients of the
    shared face, so +1 means the induced orientations agree.
    """
    _check_dim(K, i, 1)
    cofaces: dict[Face, list[tuple[int, int]]] = defaultdict(list)
    for t, face in enumerate(K.faces_by_dim[i]):
        for j in range(i + 1):
            cofaces[face[:j] + face[j + 1 :]].append((t, -1 if j % 2 else 1))
    edges = []
    for members in cofaces.values():
        for (a, sa), (b, sb) in combinations(members, 2):
            edges.append((min(a, b), max(a, b), sa * sb))
    edges.sort()
    return SignedGraph(len(K.faces_by_dim[i]), tuple(edges))


def signed_adjacency(G: SignedGraph, loops: bool = True) -> np.ndarray:
    A = np.zeros((G.n, G.n), dtype=np.int64)
    for u, v, s in G.edges:
        A[u, v] = A[v, u] = s
    if loops:
        A[np.diag_indices(G.n)] += np.asarray(G.loop_vector, dtype=np.int64)
    return A


def signed_laplacian(G: SignedGraph) -> np.ndarray:
    """D(G) + A(G) with graph degrees; loops are ignored."""
    return np.diag(G.degrees()) + signed_adjacency(G, loops=False)


def complex_laplacian_of_dual(G: SignedGraph, dim: int) -> np.ndarray:
    """(dim+1) I + A(G): the top Laplacian of the complex the dual came from."""
    return (dim + 1) * np.eye(G.n, dtype=np.int64) + signed_adjacency(G, loops=False)


@dataclass(frozen=True)
class GluingSpec:
    """Identification pairs (vertex of K, vertex of L)."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        left = [a for a, _ in self.pairs]
        right = [b for _, b in self.pairs]
        if len(set(left)) != len(left) or len(set(right)) != len(right):
            raise GluingError("each vertex may be identified at most once")

    @property
    def phi(self) -> dict[int, int]:
        return dict(self.pairs)


def glue(K: Complex, L: Complex, g: GluingSpec) -> tuple[Complex, tuple[int, ...]]:
    """Quotient of K ⊔ L by the identification ``g``.

    K keeps its vertex ids. A glued vertex of L takes the id of its partner in
    K, every other vertex of L is shifted past the largest id of K. Returns
    the glued complex and the number of identified i-face pairs for each i.
    """
    phi = g.phi
    kv, lv = set(K.vertices), set(L.vertices)
    if not kv.issuperset(phi) or not lv.issuperset(phi.values()):
        raise GluingError("gluing refers to vertices outside the complexes")
    dim = max(K.dim, L.dim)
    r = [0] * (dim + 1)
    if phi:
        GK = K.induced(phi.keys())
        GL = L.induced(phi.values())
        image = {tuple(sorted(phi[v] for v in f)) for fs in GK.faces_by_dim for f in fs}
        target = {f for fs in GL.faces_by_dim for f in fs}
        if image != target:
            raise GluingError("identification is not a simplicial isomorphism of the glued parts")
        for i, fs in enumerate(GK.faces_by_dim):
            r[i] = len(fs)
    inverse = {w: v for v, w in phi.items()}
    offset = max(kv) + 1
    relabel = {w: inverse.get(w, offset + w) for w in lv}
    facets = list(K.facets) + [[relabel[w] for w in f] for f in L.facets]
    return from_facets(facets), tuple(r)


def load_complex(path: str | Path) -> Complex:
    with open(path) as fh:
        data = json.load(fh)
    return from_facets(data["facets"])


def save_complex(K: Complex, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(K.to_json(), fh)
