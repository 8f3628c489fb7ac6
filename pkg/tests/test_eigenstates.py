import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qchaos.eigenstates import (analyze_states, central_band_mask, central_band_window,
                                critical_coupling_entropy, entropy_columns, entropy_sq, fit_lorentzian,
                                ipr, ipr_columns, ldos_fit, level_density, lorentzian, melting_map,
                                overlaps, sgqc_spectrum)
from qchaos.errors import DataIntegrityError, FitError, NoCrossingError
from qchaos.models import SGQCParams, build_lattice, build_sgqc, central_band, popcount, register_energies
from qchaos.spectra import diagonalize


def test_ipr_examples():
    assert ipr([1.0, 0.0, 0.0]) == 1.0
    assert ipr(np.full(8, 1 / 8)) == pytest.approx(8.0)
    assert ipr([0.75, 0.25]) == pytest.approx(1.6)


def test_entropy_examples():
    assert entropy_sq([1.0, 0.0]) == 0.0
    assert entropy_sq([0.5, 0.5]) == pytest.approx(1.0)
    assert entropy_sq(np.full(2**6, 2.0**-6)) == pytest.approx(6.0)


def test_unnormalized_row_is_rejected():
    with pytest.raises(DataIntegrityError):
        ipr([0.5, 0.4])
    with pytest.raises(DataIntegrityError):
        entropy_sq([1.2, -0.2])


def test_overlaps_of_diagonal_matrix_are_unit_rows():
    spec = diagonalize(np.diag([2.0, -1.0, 0.5]))
    for m in range(3):
        w = overlaps(spec, m)
        assert sorted(w) == [0.0, 0.0, 1.0]
    with pytest.raises(IndexError):
        overlaps(spec, 3)


def test_overlap_columns_and_rows_sum_to_one():
    H = build_sgqc(SGQCParams.square(6, 1.0, 1.0, 0.4, seed=3))
    W = diagonalize(H).eigenvectors ** 2
    np.testing.assert_allclose(W.sum(axis=0), 1.0, atol=1e-12)
    np.testing.assert_allclose(W.sum(axis=1), 1.0, atol=1e-12)


def test_two_qubit_even_block_has_equal_weights_when_splitting_vanishes():
    params = SGQCParams(2, 1.0, 1.0, 1.0, build_lattice(1, 2))
    H = build_sgqc(params, gammas=np.zeros(2), couplings=np.array([0.3]))
    spec = diagonalize(H)
    for m in range(4):
        w = overlaps(spec, m)
        np.testing.assert_allclose(np.sort(w)[-2:], [0.5, 0.5], atol=1e-12)
        assert entropy_sq(w) == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_participation_orderings(dim, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(dim, dim))
    V = np.linalg.eigh(A + A.T)[1]
    X, S = ipr_columns(V), entropy_columns(V)
    assert np.all(X >= 1 - 1e-12) and np.all(X <= dim * (1 + 1e-12))
    assert np.all(S >= 0) and np.all(S <= math.log2(dim) + 1e-12)
    assert np.all(X <= 2**S * (1 + 1e-10))
    assert np.all(2**S <= dim * (1 + 1e-10))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0, allow_nan=False), min_size=1, max_size=30))
def test_entropy_zero_iff_ipr_one(raw):
    w = np.array(raw)
    if w.sum() == 0:
        return
    w = w / w.sum()
    single = np.count_nonzero(w > 1 - 1e-9) == 1
    assert (abs(entropy_sq(w, 1e-9)) < 1e-9) == single
    assert (abs(ipr(w, 1e-9) - 1) < 1e-9) == single


def test_column_functions_match_row_functions(rng):
    A = rng.normal(size=(12, 12))
    V = np.linalg.eigh(A + A.T)[1]
    for m in range(12):
        assert ipr_columns(V)[m] == pytest.approx(ipr(V[:, m] ** 2))
        assert entropy_columns(V)[m] == pytest.approx(entropy_sq(V[:, m] ** 2))


def test_central_band_window_is_central_half():
    g = np.array([0.8, 1.0, 1.2, 0.9])
    lo, hi = central_band_window(g, 0.5)
    E = register_energies(g)[popcount(np.arange(16)) == central_band(4)]
    mid, span = 0.5 * (E.min() + E.max()), E.max() - E.min()
    assert lo == pytest.approx(mid - span / 4) and hi == pytest.approx(mid + span / 4)
    assert central_band_mask([mid, E.max()], g).tolist() == [True, False]


def test_melting_map_zero_coupling_column_is_exactly_zero():
    mm = melting_map(SGQCParams.square(6, 1.0, 1.0, 0.0, seed=2), [0.0, 0.3])
    E0, S0 = mm.column(0.0)
    assert len(E0) == 64
    assert np.all(S0 == 0.0)
    _, S1 = mm.column(0.3)
    assert S1.max() > 0.5


def test_sgqc_spectrum_matches_full_diagonalization():
    p = SGQCParams.square(6, 1.0, 1.0, 0.35, seed=8)
    E, S, X = sgqc_spectrum(p)
    np.testing.assert_allclose(E, np.linalg.eigvalsh(build_sgqc(p).toarray()), atol=1e-12)
    assert np.all(X <= 2**S * (1 + 1e-10))


def test_critical_coupling_entropy_examples():
    assert critical_coupling_entropy([0.1, 0.2, 0.3], [0.2, 0.8, 1.4]) == pytest.approx(0.2 + 0.1 * 0.2 / 0.6)
    assert critical_coupling_entropy([0.1, 0.2, 0.3], [0.2, 1.0, 1.4]) == pytest.approx(0.2)
    with pytest.raises(NoCrossingError):
        critical_coupling_entropy([0.1, 0.2, 0.3], [0.2, 0.5, 0.9])


@pytest.mark.parametrize("gamma", [0.05, 0.3, 2.0])
def test_lorentzian_fit_recovers_known_width(gamma):
    rng = np.random.default_rng(7)
    samples = 1.3 + gamma / 2 * rng.standard_cauchy(400_000)
    fit = fit_lorentzian(samples)
    assert fit.width == pytest.approx(gamma, rel=0.05)
    assert fit.center == pytest.approx(1.3, abs=0.05 * gamma)
    assert np.sum(fit.density) * (fit.centers[1] - fit.centers[0]) == pytest.approx(1.0, rel=1e-9)


def test_lorentzian_shape():
    assert lorentzian(0.0, 1.0, 0.0, 2.0) == pytest.approx(1.0)
    assert lorentzian(1.0, 1.0, 0.0, 2.0) == pytest.approx(0.5)


def test_ldos_of_uncoupled_register_is_rejected():
    p = SGQCParams.square(6, 1.0, 1.0, 0.0, seed=1)
    H = build_sgqc(p)
    spec = diagonalize(H)
    with pytest.raises(FitError):
        ldos_fit(spec, np.arange(30), H.diagonal)


def test_level_density_of_ladder():
    assert level_density(np.arange(101) * 0.5, 1.0) == pytest.approx(2.0)


def test_analyze_states_select():
    spec = diagonalize(build_sgqc(SGQCParams.square(4, 1.0, 1.0, 0.3, seed=1)))
    sa = analyze_states(spec)
    sub = sa.select(sa.energies > 0)
    assert len(sub.energies) == np.count_nonzero(spec.eigenvalues > 0)
