import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from subdivspectra.decimation import (
    RenormPoint,
    SingularPointError,
    adjacency_map,
    bidim_recursion_residual,
    det_circulant,
    det_circulant_explicit,
    det_x0,
    det_x0_explicit,
    laplacian_from_adjacency_limit,
    limit_mass,
    limit_quantile_1d,
    limit_quantile_cd,
    multiplicities,
    predicted_spectrum_adjacency,
    preimage_tree,
    psi,
    renormalize,
    renormalize_unfactored,
    semiconjugacy_residual,
    sine_law,
)
from subdivspectra.schreier import build_schreier


def test_renormalize_examples():
    for f in (renormalize, renormalize_unfactored):
        q = f(RenormPoint(3, 1), 2)
        assert q.mu == pytest.approx(1.75) and q.lam == pytest.approx(0.375)
    q = renormalize(RenormPoint(0.3, 0.0), 3)
    assert q == RenormPoint(0.3, 0.0)
    for f in (renormalize, renormalize_unfactored):
        with pytest.raises(SingularPointError):
            f(RenormPoint(2, 1), 2)


def test_psi_examples():
    assert psi(RenormPoint(3, 1), 2) == 3
    assert adjacency_map(3, 2) == 3
    assert psi(RenormPoint(1.75, 0.375), 2) == pytest.approx(3)
    assert semiconjugacy_residual(RenormPoint(3, 1), 2) < 1e-12
    assert psi(RenormPoint(0, 1), 2) == -3 and adjacency_map(-3, 2) == 9
    with pytest.raises(SingularPointError):
        psi(RenormPoint(1, 0), 2)


def test_det_x0_examples():
    assert det_x0(RenormPoint(3, 1), 2) == 320
    assert det_x0_explicit(RenormPoint(3, 1), 2) == pytest.approx(320)
    assert det_x0(RenormPoint(1, 0), 2) == 0
    assert det_circulant(2, 1, 2) == 4
    assert det_circulant_explicit(2, 1, 2) == pytest.approx(4)


def _points(d):
    return st.tuples(st.floats(-4, 4), st.floats(-3, 3)).filter(lambda p: abs(p[1]) > 1e-3)


@pytest.mark.parametrize("d", [2, 3, 4])
@given(data=st.data())
def test_renormalization_identities(d, data):
    mu, lam = data.draw(_points(d))
    p = RenormPoint(mu, lam)
    try:
        a = renormalize(p, d)
        b = renormalize_unfactored(p, d)
    except SingularPointError:
        return
    assert math.isclose(a.mu, b.mu, rel_tol=1e-9, abs_tol=1e-9)
    assert math.isclose(a.lam, b.lam, rel_tol=1e-9, abs_tol=1e-9)
    if a.lam != 0:
        assert semiconjugacy_residual(p, d) < 1e-8
    assert math.isclose(det_x0(p, d), det_x0_explicit(p, d), rel_tol=1e-8, abs_tol=1e-7)
    assert math.isclose(det_circulant(mu, lam, d), det_circulant_explicit(mu, lam, d), rel_tol=1e-9, abs_tol=1e-9)


def test_multiplicity_examples():
    m = multiplicities(2, 4)
    assert m.alpha == (2, 3, 6, 15) and m.beta == (1, 4, 13)
    m = multiplicities(3, 3)
    assert m.alpha == (3, 6, 18) and m.beta == (3, 15)
    assert m.c_d == 2 and m.sigma == (0, 3)
    with pytest.raises(ValueError):
        multiplicities(1, 3)


def test_degree_identity():
    m = multiplicities(2, 3)
    # D_0, A_1^{α_3}, A_2^{α_2}, A_3^{α_1}, B_2^{β_3}, B_3^{β_2}
    degrees = [1, 1 * m.alpha[2], 2 * m.alpha[1], 4 * m.alpha[0], 1 * m.beta[1], 2 * m.beta[0]]
    assert degrees == [1, 6, 6, 8, 4, 2] and sum(degrees) == 27


def test_prediction_examples():
    p1 = predicted_spectrum_adjacency(2, 1)
    assert p1.pairs == ((0.0, 2), (3.0, 1))
    p2 = dict(predicted_spectrum_adjacency(2, 2).pairs)
    s = math.sqrt(13)
    expected = {3.0: 1, 0.0: 3, (1 + s) / 2: 2, (1 - s) / 2: 2, -2.0: 1}
    assert len(p2) == 5
    for v, m in expected.items():
        match = [k for k in p2 if abs(k - v) < 1e-12]
        assert len(match) == 1 and p2[match[0]] == m
    p3 = predicted_spectrum_adjacency(2, 3)
    assert sorted(m for _, m in p3.pairs) == sorted([1, 6, 3, 3, 2, 2, 2, 2, 4, 1, 1])
    assert p3.total == 27


@pytest.mark.parametrize("d,n", [(2, 1), (2, 2), (2, 3), (3, 2), (4, 2)])
def test_prediction_matches_eigensolver(d, n):
    pred = predicted_spectrum_adjacency(d, n)
    ev = np.linalg.eigvalsh(build_schreier(d, n).adjacency)
    assert np.max(np.abs(pred.expanded() - ev)) < 1e-8


@pytest.mark.parametrize("d", [2, 3, 4])
def test_preimage_disjointness_and_ranges(d):
    depth = 6
    trees = {f: preimage_tree(d, f, depth) for f in "ABPQ"}
    for f, tree in trees.items():
        assert [len(level) for level in tree.levels] == [2**i for i in range(depth + 1)]
    for pair, (lo, hi) in (("AB", (-2, d + 1)), ("PQ", (0, d + 3))):
        values = sorted(v for f in pair for level in trees[f].levels for v in level)
        assert min(values) >= lo - 1e-12 and max(values) <= hi + 1e-12
        assert np.min(np.diff(values)) > 1e-8


def test_limit_examples():
    F, tail = limit_quantile_cd(2, 0)
    assert F.values == (3.0, 5.0) and tail == Fraction(2, 3)
    # before normalization each value carries 1/6
    assert limit_mass(2, 0) == Fraction(1, 3)
    F1, tail1 = limit_quantile_cd(2, 1)
    assert limit_mass(2, 1) == Fraction(5, 9) and tail1 == Fraction(4, 9)
    expected = sorted([3, 5, (5 - math.sqrt(13)) / 2, (5 + math.sqrt(13)) / 2, (5 - math.sqrt(5)) / 2, (5 + math.sqrt(5)) / 2])
    assert np.allclose(F1.values, expected)
    assert set(F1.lengths) == {Fraction(1, 18) / Fraction(5, 9), Fraction(1, 6) / Fraction(5, 9)}
    with pytest.raises(ValueError):
        limit_quantile_cd(1, 3)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_limit_mass_converges(d):
    total = limit_mass(d, 20) + Fraction(2, d + 1) ** 21
    assert total == 1


@pytest.mark.parametrize("d", [2, 3])
def test_reflection_of_adjacency_limit(d):
    for depth in range(4):
        F = laplacian_from_adjacency_limit(d, depth)
        G, _ = limit_quantile_cd(d, depth)
        assert F.breakpoints == G.breakpoints
        assert max(abs(a - b) for a, b in zip(F.values, G.values)) < 1e-10
    F = laplacian_from_adjacency_limit(d, 0)
    assert F.values == (float(d + 1), float(d + 3))


def test_sine_law():
    assert sine_law(0) == 0
    assert sine_law(1) == pytest.approx(4)
    assert sine_law(0.5) == pytest.approx(2)
    F = limit_quantile_1d(4)
    assert F.values[0] == 0 and len(F.values) == 4
    with pytest.raises(ValueError):
        limit_quantile_1d(1)


@pytest.mark.parametrize("d", [2, 3])
def test_bidim_recursion(d):
    rng = np.random.default_rng(7)
    for mu in rng.uniform(-3, d + 2, 20):
        try:
            assert bidim_recursion_residual(float(mu), d, 2) < 1e-6
        except SingularPointError:
            continue
