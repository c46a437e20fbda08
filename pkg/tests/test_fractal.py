import json

import numpy as np
import pytest

from subdivspectra.complex import dual_graph, simplex
from subdivspectra.fractal import (
    build_levels,
    derive_fractal_data,
    finitely_ramified_relation,
    next_level,
    level_zero,
    verify_duality,
    write_level_json,
)
from subdivspectra.isomorphism import find_isomorphism
from subdivspectra.schreier import build_schreier
from subdivspectra.subdivide import SubdivisionKind, f_vector_of, iterate

K = SubdivisionKind.parse


def test_sd_level_zero_is_hexagon():
    data = derive_fractal_data(K("sd"), 2)
    assert data.N == 6 and data.n == 2
    assert len(data.edges) == 6
    assert np.bincount(np.ravel(data.edges)).tolist() == [2] * 6
    # connected and 2-regular, hence a single 6-cycle
    adj = level_zero(data).adjacency()
    seen, todo = {0}, [0]
    while todo:
        for w in adj[todo.pop()] - seen:
            seen.add(w)
            todo.append(w)
    assert len(seen) == 6
    assert sum(len(m) for m in data.loops) == 6
    assert all(len(b) == 2 for b in data.boundary)


def test_cd_level_zero_is_triangle():
    data = derive_fractal_data(K("cd"), 2)
    assert data.edges == ((0, 1), (0, 2), (1, 2))
    assert sum(len(m) for m in data.loops) == 3
    assert all(len(b) == 1 for b in data.boundary)


def test_esd3_level_zero():
    data = derive_fractal_data(K("esd3"), 2)
    assert data.N == 9 and data.n == 3
    assert sum(len(m) for m in data.loops) == 9


def test_esd_requires_dimension_two():
    with pytest.raises(ValueError):
        derive_fractal_data(K("esd3"), 3)


@pytest.mark.parametrize("kind,d,k", [("cd", 2, 2), ("sd", 2, 1), ("esd3", 2, 1), ("esd2", 2, 1), ("cd", 3, 1)])
def test_loop_counts(kind, d, k):
    data = derive_fractal_data(K(kind), d)
    levels = build_levels(data, k)
    lower = f_vector_of(K(kind), d)[0]
    assert [lv.loop_total() for lv in levels] == [(d + 1) * lower ** (j + 1) for j in range(k + 1)]
    assert levels[-1].size == data.N ** (k + 1)


def test_level_one_of_cone_is_schreier_graph():
    data = derive_fractal_data(K("cd"), 2)
    lv = build_levels(data, 1)[-1]
    A = build_schreier(2, 2).adjacency
    adj_s = [set(np.nonzero(A[v])[0]) - {v} for v in range(9)]
    colors_s = [int(A[v, v]) for v in range(9)]
    colors_f = [len(m) for m in lv.loops]
    assert find_isomorphism(lv.adjacency(), adj_s, colors_f, colors_s) is not None


@pytest.mark.parametrize("kind,d,k", [("cd", 2, 0), ("cd", 2, 1), ("cd", 2, 2), ("sd", 2, 1), ("esd3", 2, 0), ("esd3", 2, 1), ("cd", 3, 1)])
def test_duality(kind, d, k):
    assert verify_duality(K(kind), d, k)


def test_spectra_agree_with_subdivision():
    data = derive_fractal_data(K("sd"), 2)
    lv = build_levels(data, 1)[-1]
    dual = dual_graph(iterate(K("sd"), simplex(2), 2)[-1], 2)
    A = np.zeros((lv.size, lv.size))
    for u, v in lv.edges:
        A[u, v] = A[v, u] = 1
    B = np.zeros_like(A)
    for u, v, _ in dual.edges:
        B[u, v] = B[v, u] = 1
    assert np.allclose(np.linalg.eigvalsh(A), np.linalg.eigvalsh(B), atol=1e-8)


@pytest.mark.parametrize("d,count", [(2, 3), (3, 6)])
def test_finitely_ramified_relation(d, count):
    data = derive_fractal_data(K("cd"), d)
    rel = finitely_ramified_relation(data)
    assert len(rel) == count
    # the corner relation reproduces the cross edges of the general rule
    level = next_level(level_zero(data), data)
    M = data.N
    corners = {m: data.boundary[m][0] for m in range(d + 1)}
    cross = {tuple(sorted((i * M + corners[r], j * M + corners[s]))) for (r, i), (s, j) in rel}
    assert cross == {e for e in level.edges if e[0] // M != e[1] // M}


def test_finitely_ramified_rejects_sd():
    with pytest.raises(ValueError):
        finitely_ramified_relation(derive_fractal_data(K("sd"), 2))


def test_group_action_identity_first():
    data = derive_fractal_data(K("sd"), 2)
    assert data.group[0] == (0, 1, 2)
    assert data.action[0] == tuple(range(data.N))


def test_json_output(tmp_path):
    lv = build_levels(derive_fractal_data(K("cd"), 2), 1)[-1]
    write_level_json(lv, tmp_path / "g.json")
    payload = json.loads((tmp_path / "g.json").read_text())
    assert len(payload["vertices"]) == 9 and payload["vertices"][4] == [1, 1]
    assert len(payload["loops"]) == 3 and len(payload["boundary"]) == 3
