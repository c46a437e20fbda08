import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from subdivspectra.complex import from_facets, simplex
from subdivspectra.isomorphism import adjacency_lists, are_isomorphic, complex_isomorphism, find_isomorphism


def _cycle(n):
    return adjacency_lists([(i, (i + 1) % n) for i in range(n)], n)


def test_small_graphs():
    assert are_isomorphic(_cycle(6), _cycle(6))
    two_triangles = adjacency_lists([(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], 6)
    # same degrees, different spectra
    assert not are_isomorphic(_cycle(6), two_triangles)
    assert find_isomorphism(_cycle(6), two_triangles) is None


@given(st.integers(0, 2**32 - 1), st.integers(3, 14))
def test_relabelled_random_graphs(seed, n):
    rng = np.random.default_rng(seed)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.35]
    perm = rng.permutation(n)
    g = adjacency_lists(edges, n)
    h = adjacency_lists([(perm[u], perm[v]) for u, v in edges], n)
    m = find_isomorphism(g, h)
    assert m is not None
    assert all({m[u] for u in g[v]} == h[m[v]] for v in range(n))


def test_complex_isomorphism_pins_vertices():
    K = from_facets([[0, 1, 2], [1, 2, 3]])
    L = from_facets([[5, 6, 7], [6, 7, 9]])
    assert complex_isomorphism(K, L) is not None
    assert complex_isomorphism(K, L, (0,), (5,)) is not None
    assert complex_isomorphism(K, L, (0,), (6,)) is None
    assert complex_isomorphism(K, simplex(2)) is None
