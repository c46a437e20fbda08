"""Inclusion-uniform subdivisions: cone (cd), barycentric (sd), edgewise (esd_r).

Every procedure returns the child complex together with its carrier map (child
face -> smallest parent face containing it) and, for each child vertex, the
parent face it lies in with exact barycentric weights. The weights are what
makes symmetries of the parent act on the child.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations
from typing import Mapping

from .complex import Complex, Face, from_facets, simplex

__all__ = [
    "Provenance",
    "SubdivisionKind",
    "SubdivisionResult",
    "barycentric_subdivide",
    "cone_subdivide",
    "edgewise_subdivide",
    "f_vector_of",
    "iterate",
    "iterate_results",
    "q_ratio",
    "restriction",
    "subdivide",
]


@dataclass(frozen=True)
class Provenance:
    """Position of a child vertex: its carrier face and barycentric weights."""

    face: Face
    weights: tuple[Fraction, ...]

    def as_point(self) -> dict[int, Fraction]:
        return dict(zip(self.face, self.weights))


@dataclass(frozen=True)
class SubdivisionKind:
    tag: str
    r: int | None = None

    def __post_init__(self):
        if self.tag not in ("cd", "sd", "esd"):
            raise ValueError(f"unknown subdivision {self.tag!r}")
        if self.tag == "esd" and (self.r is None or self.r < 2):
            raise ValueError("edgewise subdivision needs r >= 2")
        if self.tag != "esd" and self.r is not None:
            raise ValueError("only edgewise subdivision takes r")

    @classmethod
    def parse(cls, text: str, r: int | None = None) -> "SubdivisionKind":
        text = text.strip().lower()
        aliases = {"cone": "cd", "barycentric": "sd", "edgewise": "esd"}
        text = aliases.get(text, text)
        if text.startswith("esd"):
            tail = text[3:].lstrip("_")
            return cls("esd", int(tail) if tail else r)
        return cls(text)

    def __str__(self) -> str:
        return f"esd{self.r}" if self.tag == "esd" else self.tag


@dataclass(frozen=True)
class SubdivisionResult:
    child: Complex
    carrier: Mapping[Face, Face]
    new_vertex_provenance: Mapping[int, Provenance]
    parent: Complex

    def position(self, v: int) -> dict[int, Fraction]:
        """Barycentric position of child vertex v over parent vertices."""
        prov = self.new_vertex_provenance.get(v)
        return prov.as_point() if prov else {v: Fraction(1)}


def _finish(parent: Complex, facets, provenance: dict[int, Provenance]) -> SubdivisionResult:
    child = from_facets(facets)

    def vertex_carrier(v: int) -> Face:
        prov = provenance.get(v)
        return prov.face if prov else (v,)

    carrier: dict[Face, Face] = {}
    for fs in child.faces_by_dim:
        for face in fs:
            support = set()
            for v in face:
                support.update(vertex_carrier(v))
            carrier[face] = tuple(sorted(support))
    return SubdivisionResult(child, carrier, provenance, parent)


def cone_subdivide(K: Complex) -> SubdivisionResult:
    """Cone every top face over its boundary from a new barycentre vertex."""
    d = K.dim
    if d < 1:
        raise ValueError("cone subdivision needs dimension >= 1")
    if not K.is_pure():
        raise ValueError("cone subdivision requires a pure complex")
    fresh = max(K.vertices) + 1
    facets = []
    provenance: dict[int, Provenance] = {}
    for sigma in K.faces(d):
        v = fresh
        fresh += 1
        provenance[v] = Provenance(sigma, (Fraction(1, d + 1),) * (d + 1))
        for tau in combinations(sigma, d):
            facets.append(tau + (v,))
    return _finish(K, facets, provenance)


def barycentric_subdivide(K: Complex) -> SubdivisionResult:
    """Complex of flags of faces; vertex k of a face's barycentre is new."""
    if K.dim < 1:
        raise ValueError("barycentric subdivision needs dimension >= 1")
    fresh = max(K.vertices) + 1
    bary: dict[Face, int] = {}
    provenance: dict[int, Provenance] = {}
    for fs in K.faces_by_dim[1:]:
        for face in fs:
            bary[face] = fresh
            provenance[fresh] = Provenance(face, (Fraction(1, len(face)),) * len(face))
            fresh += 1

    def vid(face: Face) -> int:
        return face[0] if len(face) == 1 else bary[face]

    facets = []
    for top in K.facets:
        for order in permutations(top):
            flag = [tuple(sorted(order[: k + 1])) for k in range(len(order))]
            facets.append([vid(f) for f in flag])
    return _finish(K, facets, provenance)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def edgewise_subdivide(K: Complex, r: int) -> SubdivisionResult:
    """Triangular-grid subdivision: edges into r pieces, triangles into r^2."""
    if r < 2:
        raise ValueError("edgewise subdivision needs r >= 2")
    if K.dim > 2:
        raise ValueError("edgewise subdivision is only defined up to dimension 2")
    if K.dim < 1:
        raise ValueError("edgewise subdivision needs dimension >= 1")

    # lattice points keyed by their (vertex, weight) support
    keys: dict[tuple[tuple[int, int], ...], int] = {}
    provenance: dict[int, Provenance] = {}
    fresh = max(K.vertices) + 1
    for fs in K.faces_by_dim:
        for face in fs:
            for comp in _compositions(r, len(face)):
                if min(comp) == 0:
                    continue
                key = tuple(zip(face, comp))
                if len(face) == 1:
                    keys[key] = face[0]
                else:
                    keys[key] = fresh
                    provenance[fresh] = Provenance(face, tuple(Fraction(c, r) for c in comp))
                    fresh += 1

    def point(face: Face, comp) -> int:
        return keys[tuple((v, c) for v, c in zip(face, comp) if c)]

    facets = []
    for top in K.facets:
        k = len(top)
        if k == 2:
            for a in range(r):
                facets.append([point(top, (r - a, a)), point(top, (r - a - 1, a + 1))])
        elif k == 3:
            unit = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
            for base in _compositions(r - 1, 3):
                facets.append(
                    [point(top, tuple(b + u for b, u in zip(base, e))) for e in unit]
                )
            if r >= 2:
                for base in _compositions(r - 2, 3):
                    facets.append(
                        [
                            point(top, tuple(b + u + w for b, u, w in zip(base, e1, e2)))
                            for e1, e2 in combinations(unit, 2)
                        ]
                    )
        else:
            facets.append(list(top))
    return _finish(K, facets, provenance)


def subdivide(kind: SubdivisionKind, K: Complex) -> SubdivisionResult:
    if kind.tag == "cd":
        return cone_subdivide(K)
    if kind.tag == "sd":
        return barycentric_subdivide(K)
    return edgewise_subdivide(K, kind.r)


def iterate_results(kind: SubdivisionKind, K: Complex, n: int) -> list[SubdivisionResult]:
    if n < 0:
        raise ValueError("iteration count must be non-negative")
    out = []
    current = K
    for _ in range(n):
        res = subdivide(kind, current)
        out.append(res)
        current = res.child
    return out


def iterate(kind: SubdivisionKind, K: Complex, n: int) -> list[Complex]:
    """[K, div K, ..., div^n K]."""
    return [K] + [res.child for res in iterate_results(kind, K, n)]


def restriction(res: SubdivisionResult, tau: Face) -> Complex:
    """The part of the child lying in the parent face ``tau``."""
    tau_set = set(tau)
    kept = [f for f, c in res.carrier.items() if tau_set.issuperset(c)]
    return from_facets(kept)


def f_vector_of(kind: SubdivisionKind, d: int) -> tuple[int, int]:
    """(f_{d-1}(div), f_d(div)) read off the subdivided standard d-simplex.

    f_{d-1} counts the (d-1)-faces of the child that lie in one boundary face
    of the simplex, i.e. how the d-dimensional scheme splits a codimension-one
    face. For finitely ramified schemes this is 1.
    """
    res = subdivide(kind, simplex(d))
    top = len(res.child.faces(d))
    side = set(range(1, d + 1))
    lower = sum(1 for f in res.child.faces(d - 1) if side.issuperset(res.carrier[f]))
    return lower, top


def q_ratio(kind: SubdivisionKind, d: int) -> Fraction:
    lower, top = f_vector_of(kind, d)
    return Fraction(lower, top)
