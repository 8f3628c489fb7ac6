import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qchaos.errors import CapacityError, InvalidParameterError, StructureError
from qchaos.models import (SGQCParams, TBRIMParams, build_lattice, build_sgqc, build_tbrim, central_band,
                           count_directly_coupled, effective_three_particle_coupling, fermion_basis,
                           lattice_shape, parity_sectors, popcount, project_band, register_energies,
                           second_order_sum, sgqc_disorder, tbrim_disorder)
from qchaos.spectra import diagonalize


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

def test_torus_3x3_has_18_edges():
    lat = build_lattice(3, 3)
    assert len(lat.edges) == 18
    assert all(i < j for i, j in lat.edges)
    assert len(set(lat.edges)) == 18


def test_torus_2x2_wraparound_is_deduplicated():
    assert len(build_lattice(2, 2).edges) == 4


def test_single_site_complete_graph_has_no_edges():
    assert build_lattice(1, 1, "complete_graph").edges == ()


def test_complete_graph_and_star_counts():
    assert len(build_lattice(2, 3, "complete_graph").edges) == 15
    assert build_lattice(1, 5, "star").edges == ((0, 1), (0, 2), (0, 3), (0, 4))


@pytest.mark.parametrize("n,shape", [(6, (2, 3)), (9, (3, 3)), (12, (3, 4)), (7, (1, 7))])
def test_lattice_shape(n, shape):
    assert lattice_shape(n) == shape


def test_torus_every_site_has_four_neighbours_when_large():
    lat = build_lattice(3, 4)
    deg = np.bincount(np.array(lat.edges).ravel(), minlength=12)
    assert np.all(deg == 4)


# ---------------------------------------------------------------------------
# qubit register model
# ---------------------------------------------------------------------------

def pauli_oracle(gammas, edges, couplings):
    """Dense Kronecker-product construction, qubit 0 as least significant bit."""
    n = len(gammas)
    sz = np.diag([1.0, -1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])

    def op(single, site):
        mats = [single if q == site else np.eye(2) for q in reversed(range(n))]
        out = mats[0]
        for mat in mats[1:]:
            out = np.kron(out, mat)
        return out

    H = sum(g * op(sz, i) for i, g in enumerate(gammas))
    for (i, j), c in zip(edges, couplings):
        H = H + c * op(sx, i) @ op(sx, j)
    return H


@pytest.mark.parametrize("n,rows", [(4, 2), (6, 2), (6, 1)])
def test_sgqc_matches_kronecker_oracle(n, rows):
    params = SGQCParams(n, 1.0, 0.7, 0.4, build_lattice(rows, n // rows), seed=3)
    H = build_sgqc(params)
    g, c = sgqc_disorder(params)
    np.testing.assert_allclose(H.toarray(), pauli_oracle(g, params.lattice.edges, c), atol=1e-14)


def test_two_qubit_analytic_eigenvalues():
    gamma, j = 0.8, 0.3
    params = SGQCParams(2, 1.0, 1.0, 1.0, build_lattice(1, 2))
    assert len(params.lattice.edges) == 1
    H = build_sgqc(params, gammas=np.array([gamma, gamma]), couplings=np.array([j]))
    E = np.sort(np.linalg.eigvalsh(H.toarray()))
    r = math.sqrt(4 * gamma**2 + j**2)
    np.testing.assert_allclose(E, sorted([-r, r, -j, j]), atol=1e-14)


def test_sgqc_matrix_is_exactly_symmetric():
    H = build_sgqc(SGQCParams.square(9, 1.0, 1.0, 0.37, seed=5))
    assert (H.matrix != H.matrix.T).nnz == 0


def test_sgqc_disorder_ranges():
    p = SGQCParams.square(12, 1.0, 0.5, 0.2, seed=1)
    g, c = sgqc_disorder(p)
    assert np.all((g >= 0.75) & (g <= 1.25))
    assert np.all(np.abs(c) <= 0.2)
    assert len(c) == len(p.lattice.edges)


def test_fixed_seed_rescales_coupling_pattern():
    p = SGQCParams.square(6, 1.0, 1.0, 0.2, seed=4)
    g1, c1 = sgqc_disorder(p)
    g2, c2 = sgqc_disorder(p.with_coupling(0.6))
    np.testing.assert_array_equal(g1, g2)
    np.testing.assert_allclose(c2, 3 * c1, rtol=1e-14)


def test_sgqc_is_deterministic():
    p = SGQCParams.square(6, 1.0, 1.0, 0.3, seed=11)
    a, b = build_sgqc(p), build_sgqc(p)
    assert (a.matrix != b.matrix).nnz == 0


def test_register_energies_convention():
    E = register_energies(np.array([0.9, 1.1]))
    # state 1 flips qubit 0: -0.9 + 1.1
    np.testing.assert_allclose(E, [2.0, 0.2, -0.2, -2.0])


@pytest.mark.parametrize("n", [4, 6, 9])
def test_parity_sector_dimensions_and_spectrum_union(n):
    H = build_sgqc(SGQCParams.square(n, 1.0, 1.0, 0.5, seed=2))
    even, odd = parity_sectors(H)
    assert even.dim == odd.dim == 2 ** (n - 1)
    assert np.all(popcount(even.labels) % 2 == 0)
    union = np.sort(np.concatenate([np.linalg.eigvalsh(even.toarray()), np.linalg.eigvalsh(odd.toarray())]))
    np.testing.assert_allclose(union, np.linalg.eigvalsh(H.toarray()), atol=1e-11)


def test_parity_sectors_reject_odd_coupling():
    import scipy.sparse as sp
    from qchaos.models import Hamiltonian
    M = sp.csr_matrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(StructureError):
        parity_sectors(Hamiltonian(M, np.array([0, 1]), "custom", 1, None, {}))


def test_band_dimensions():
    H = build_sgqc(SGQCParams.square(12, 1.0, 1.0, 0.1, seed=0))
    assert central_band(12) == 6
    assert project_band(H, 6).dim == 924
    assert sum(project_band(H, k).dim for k in range(13)) == 4096
    with pytest.raises(IndexError):
        project_band(H, 13)


def test_central_band_of_odd_register_sits_at_minus_delta0():
    n = 9
    g = np.full(n, 1.0)
    k = central_band(n)
    E = register_energies(g)[popcount(np.arange(2**n)) == k]
    np.testing.assert_allclose(E, -1.0)


def test_band_projection_drops_interband_couplings():
    H = build_sgqc(SGQCParams.square(6, 1.0, 1.0, 0.5, seed=1))
    B = project_band(H, 3)
    dense = H.toarray()
    idx = B.labels
    np.testing.assert_array_equal(B.toarray(), dense[np.ix_(idx, idx)])


def test_qubit_cap():
    with pytest.raises(CapacityError):
        build_sgqc(SGQCParams.square(6, 1.0, 1.0, 0.1), cap=5)


@pytest.mark.parametrize("kw", [dict(delta=-1.0), dict(J=-0.1), dict(delta=2.5), dict(seed=-1)])
def test_sgqc_parameter_validation(kw):
    base = dict(n=4, delta0=1.0, delta=1.0, J=0.1, seed=0)
    base.update(kw)
    with pytest.raises(InvalidParameterError):
        SGQCParams.square(**base)


# ---------------------------------------------------------------------------
# fermions
# ---------------------------------------------------------------------------

def jordan_wigner_oracle(m, n, energies, V):
    """Second-quantized Hamiltonian built from Jordan-Wigner matrices on the
    full 2**m Fock space, then restricted to the n-particle determinants."""
    dim = 2**m
    states = np.arange(dim)

    def annihilator(r):
        a = np.zeros((dim, dim))
        for s in states:
            if s >> r & 1:
                sign = (-1) ** bin(s & ((1 << r) - 1)).count("1")
                a[s ^ (1 << r), s] = sign
        return a

    c = [annihilator(r) for r in range(m)]
    cd = [x.T for x in c]
    H = sum(e * cd[a] @ c[a] for a, e in enumerate(energies))
    pairs = list(itertools.combinations(range(m), 2))
    for (i, (p, q)), (j, (r, s)) in itertools.product(enumerate(pairs), repeat=2):
        if V[i, j]:
            H = H + V[i, j] * cd[p] @ cd[q] @ c[s] @ c[r]
    labels = fermion_basis(m, n)
    return H[np.ix_(labels, labels)]


@pytest.mark.parametrize("m,n", [(4, 2), (5, 2), (5, 3), (6, 3)])
def test_tbrim_matches_jordan_wigner_oracle(m, n):
    params = TBRIMParams(m, n, 1.0, 0.5, seed=7)
    e, V = tbrim_disorder(params)
    H = build_tbrim(params)
    np.testing.assert_allclose(H.toarray(), jordan_wigner_oracle(m, n, e, V), atol=1e-13)


def brute_force_directly_coupled(m, n):
    """Determinants differing from a reference in at most two orbitals."""
    ref = set(range(n))
    return sum(1 for occ in itertools.combinations(range(m), n) if len(ref - set(occ)) <= 2)


@pytest.mark.parametrize("m,n", [(m, n) for m in range(2, 9) for n in range(1, m)])
def test_directly_coupled_count_matches_enumeration(m, n):
    assert count_directly_coupled(m, n) == brute_force_directly_coupled(m, n)


@pytest.mark.parametrize("m,n", [(8, 3), (9, 4)])
def test_row_nonzeros_bounded_by_coupled_count(m, n):
    H = build_tbrim(TBRIMParams(m, n, 1.0, 1.0, seed=1))
    nnz = np.diff(H.matrix.indptr)
    assert nnz.max() <= count_directly_coupled(m, n)
    off = np.diff((H.matrix - __import__("scipy").sparse.diags(H.diagonal)).tocsr().indptr)
    assert off.max() <= count_directly_coupled(m, n) - 1


def test_tbrim_basis_and_symmetry():
    H = build_tbrim(TBRIMParams(10, 3, 1.0, 0.2, seed=3))
    assert H.dim == 120
    assert np.all(popcount(H.labels) == 3)
    assert np.all(np.diff(H.labels) != 0)
    assert (H.matrix != H.matrix.T).nnz == 0


def test_tbrim_zero_interaction_is_diagonal():
    p = TBRIMParams(8, 3, 1.0, 0.0, seed=2)
    H = build_tbrim(p)
    e, _ = tbrim_disorder(p)
    assert H.matrix.count_nonzero() == np.count_nonzero(H.diagonal)
    occ = (H.labels[:, None] >> np.arange(8)) & 1
    np.testing.assert_allclose(H.diagonal, occ @ e)


def test_tbrim_energies_sorted_and_in_range():
    e, V = tbrim_disorder(TBRIMParams(12, 3, 0.5, 1.0, seed=9))
    assert np.all(np.diff(e) >= 0) and e.min() >= 0 and e.max() <= 6.0
    np.testing.assert_array_equal(V, V.T)
    assert np.abs(V).max() <= 1.0


def test_tbrim_cap_and_validation():
    with pytest.raises(CapacityError):
        build_tbrim(TBRIMParams(20, 10), cap=1000)
    with pytest.raises(InvalidParameterError):
        TBRIMParams(5, 5)
    with pytest.raises(InvalidParameterError):
        TBRIMParams(5, 2, U=-1.0)


@settings(max_examples=25, deadline=None)
@given(m=st.integers(4, 8), data=st.data(), seed=st.integers(0, 2**32 - 1),
       U=st.floats(0.0, 5.0, allow_nan=False))
def test_tbrim_symmetric_property(m, data, seed, U):
    n = data.draw(st.integers(1, m - 1))
    H = build_tbrim(TBRIMParams(m, n, 1.0, U, seed))
    assert (H.matrix != H.matrix.T).nnz == 0


@settings(max_examples=25, deadline=None)
@given(rows=st.integers(1, 3), cols=st.integers(1, 4), seed=st.integers(0, 2**32 - 1),
       J=st.floats(0.0, 2.0, allow_nan=False), topo=st.sampled_from(["torus_nearest_neighbor", "complete_graph"]))
def test_sgqc_symmetric_and_parity_conserving(rows, cols, seed, J, topo):
    p = SGQCParams(rows * cols, 1.0, 1.0, J, build_lattice(rows, cols, topo), seed)
    H = build_sgqc(p)
    assert (H.matrix != H.matrix.T).nnz == 0
    even, odd = parity_sectors(H)
    assert even.dim + odd.dim == H.dim


# ---------------------------------------------------------------------------
# three-particle coupling
# ---------------------------------------------------------------------------

def test_second_order_sum_single_term():
    c = second_order_sum([0.3], [0.5], [2.0])
    assert c.value == pytest.approx(0.075)
    assert (c.n_terms, c.excluded) == (1, 0)


def test_second_order_sum_skips_zero_detuning():
    c = second_order_sum([1.0, 0.3], [1.0, 0.5], [0.0, 2.0])
    assert c.value == pytest.approx(0.075)
    assert c.excluded == 1


def test_three_particle_coupling_vanishes_without_interaction():
    c = effective_three_particle_coupling(20, 1.0, 0.0, 1, (1, 2, 3), (4, 5, 6))
    assert c.value == 0.0


def test_three_particle_coupling_scale():
    """Median |U3| over realizations is of order U**2 / Delta."""
    m, U, Delta = 30, 0.1, 1.0
    rng = np.random.default_rng(0)
    vals = []
    for seed in range(1000):
        a, b, c, a2, b2, c2 = rng.integers(0, m, 6)
        vals.append(abs(effective_three_particle_coupling(m, Delta, U, seed, (a, b, c), (a2, b2, c2)).value))
    med = np.median(vals)
    assert U**2 / Delta / 3 <= med <= 3 * U**2 / Delta


def test_three_particle_coupling_is_reproducible():
    a = effective_three_particle_coupling(15, 1.0, 0.2, 4, (1, 2, 3), (3, 4, 5))
    b = effective_three_particle_coupling(15, 1.0, 0.2, 4, (1, 2, 3), (3, 4, 5))
    assert a == b


def test_three_particle_level_validation():
    with pytest.raises(InvalidParameterError):
        effective_three_particle_coupling(5, 1.0, 0.1, 0, (0, 1, 5), (0, 0, 0))
