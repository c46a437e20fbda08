import numpy as np
import pytest

from subdivspectra.complex import down_laplacian, simplex
from subdivspectra.schreier import (
    SizeBudgetError,
    act_a,
    act_b,
    alpha,
    block_form,
    build_schreier,
    facet_labeling,
    index_word,
    loop_count,
    reduced,
    verify_approx,
    word_index,
)
from subdivspectra.spectral import l1_distance, spectrum_of
from subdivspectra.subdivide import SubdivisionKind, iterate, iterate_results


def test_word_indexing_is_reverse_lexicographic():
    assert word_index((1, 1), 2) == 0
    assert word_index((2, 1), 2) == 1
    assert word_index((1, 2), 2) == 3
    for idx in range(27):
        assert word_index(index_word(idx, 2, 3), 2) == idx


def test_act_a_examples():
    assert alpha(1, 2) == 3
    assert act_a((1,), 1, 2) == (3,)
    assert act_a((2, 1), 2, 2) == (2, 2)


def test_act_b_examples():
    assert act_b((1, 3), 2) == (1, 3)
    assert act_b((1, 1), 2) == (2, 2)
    assert act_b((3,), 2) == (3,)


@pytest.mark.parametrize("d", [2, 3])
def test_generators_are_permutations(d):
    for n in range(1, 6 if d == 2 else 5):
        words = [index_word(i, d, n) for i in range((d + 1) ** n)]
        assert len({act_b(w, d) for w in words}) == len(words)
        assert all(act_b(act_b(w, d), d) == w for w in words)
        w = words[-1]
        orbit = [w]
        for _ in range(d + 1):
            orbit.append(act_a(orbit[-1], 1, d))
        assert orbit[d + 1] == w and len(set(orbit[:-1])) == d + 1


def test_level_one_is_all_ones():
    g = build_schreier(2, 1)
    assert np.array_equal(g.adjacency, np.ones((3, 3)))
    assert np.allclose(np.linalg.eigvalsh(g.adjacency), [0, 0, 3])


@pytest.mark.parametrize("d,n", [(2, 1), (2, 3), (3, 2), (4, 1)])
def test_loops(d, n):
    g = build_schreier(d, n)
    assert loop_count(g) == d + 1
    loops = [index_word(i, d, n) for i in np.nonzero(np.diag(g.adjacency))[0]]
    assert all(w[1:] == (d + 1,) * (n - 1) for w in loops)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_regular_symmetric_and_bounded(d, n):
    A = build_schreier(d, n).adjacency
    assert np.array_equal(A, A.T)
    assert np.all(A.sum(axis=0) == d + 1)
    ev = np.linalg.eigvalsh(A)
    assert ev.min() >= -2 - 1e-9 and ev.max() <= d + 1 + 1e-9


@pytest.mark.parametrize("n", [1, 2, 3])
def test_block_form_matches_action(n):
    assert np.array_equal(block_form(2, n), build_schreier(2, n).adjacency)


def test_reduced_graph():
    r = reduced(build_schreier(2, 1))
    assert r.edge_set() == {(0, 1), (0, 2), (1, 2)}
    assert reduced(build_schreier(2, 3)).n == 27
    assert len(reduced(build_schreier(4, 1)).edges) == 10


def test_size_budget():
    with pytest.raises(SizeBudgetError):
        build_schreier(2, 6, budget=100)


def test_size_budget_env(monkeypatch):
    monkeypatch.setenv("SUBDIVSPECTRA_MAX_SIZE", "10")
    with pytest.raises(SizeBudgetError):
        build_schreier(2, 3)


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (2, 3), (3, 2)])
def test_facet_labeling_isomorphism(d, n):
    assert verify_approx(d, n)


def test_facet_labeling_parent_compatibility():
    lab2 = facet_labeling(2, 2)
    lab3 = facet_labeling(2, 3)
    res = iterate_results(SubdivisionKind("cd"), simplex(2), 3)[-1]
    # the parent of a facet's word labels the facet's parent
    for f, w in zip(lab3.facets, lab3.words):
        assert w[:-1] == lab2.word_of(res.carrier[f])
    assert len(lab3.words) == 27


@pytest.mark.parametrize("perm", [(2, 3, 1), (3, 1, 2), (1, 3, 2)])
def test_any_first_level_labeling(perm):
    lab = facet_labeling(2, 1, first_level=perm)
    assert sorted(lab.words) == [(1,), (2,), (3,)]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_loops_bound_spectral_gap(n):
    d = 2
    K = iterate(SubdivisionKind("cd"), simplex(d), n)[-1]
    A = build_schreier(d, n).adjacency
    dist = l1_distance(spectrum_of(down_laplacian(K, d)), spectrum_of((d + 1) * np.eye(len(A)) - A))
    assert dist <= (d + 1) / (d + 1) ** n + 1e-12
