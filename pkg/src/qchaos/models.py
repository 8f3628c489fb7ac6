"""Hamiltonians with seeded disorder.

Two families are built here:

* the qubit register model ``H = sum_i G_i sz_i + sum_<ij> J_ij sx_i sx_j`` on a
  lattice, together with its parity sectors and band projections;
* the two-body random interaction model (TBRIM) of ``n`` spinless fermions on
  ``m`` random orbitals, plus the three-particle layer model used to estimate
  the effective coupling between three-particle states at second order.

Basis conventions
-----------------
Qubit register states are integer bitmasks; bit ``i`` holds the polarization
of qubit ``i`` and ``sz|0> = +|0>``, so a register state has unperturbed energy
``sum_i G_i * (1 - 2*bit_i)``.  Fermionic determinants are bitmasks of the
occupied orbitals, enumerated in lexicographic order of the sorted occupation
lists.  Annihilating orbital ``r`` from a determinant produces the sign
``(-1)**(number of occupied orbitals below r)``.

Disorder order
--------------
Every model draws from ``numpy.random.default_rng(seed)`` in a fixed order:
all one-body energies first (site / orbital order), then all couplings (edge
order, or upper triangle of the pair-pair matrix in row-major order).  Equal
parameters and seed therefore give bit-identical matrices, and rescaling the
coupling strength at fixed seed rescales the same random pattern.
"""

from __future__ import annotations

import enum
import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import CapacityError, InvalidParameterError, StructureError

DEFAULT_QUBIT_CAP = 20
DEFAULT_TBRIM_CAP = 20000


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

class Topology(str, enum.Enum):
    TORUS = "torus_nearest_neighbor"
    COMPLETE = "complete_graph"
    STAR = "star"


@dataclass(frozen=True)
class LatticeSpec:
    rows: int
    cols: int
    topology: Topology
    edges: tuple[tuple[int, int], ...]

    @property
    def n_sites(self) -> int:
        return self.rows * self.cols


def build_lattice(rows: int, cols: int, topology="torus_nearest_neighbor") -> LatticeSpec:
    """Site graph with sites numbered ``r * cols + c``.

    Periodic wrap on a side of length 1 or 2 would produce self-edges or the
    same pair twice; those are dropped so every pair is coupled once.  Edges
    come back as sorted ``(i, j)`` tuples with ``i < j`` in lexicographic order.
    """
    if rows < 1 or cols < 1:
        raise InvalidParameterError(f"invalid lattice dimension {rows}x{cols}")
    topology = Topology(topology)
    n = rows * cols
    edges = set()
    if topology is Topology.TORUS:
        for r in range(rows):
            for c in range(cols):
                i = r * cols + c
                for j in (r * cols + (c + 1) % cols, ((r + 1) % rows) * cols + c):
                    if i != j:
                        edges.add((min(i, j), max(i, j)))
    elif topology is Topology.COMPLETE:
        edges.update(itertools.combinations(range(n), 2))
    else:
        edges.update((0, j) for j in range(1, n))
    return LatticeSpec(rows, cols, topology, tuple(sorted(edges)))


def lattice_shape(n: int) -> tuple[int, int]:
    """Most nearly square ``rows x cols`` factorization with ``rows <= cols``."""
    if n < 1:
        raise InvalidParameterError("n must be positive")
    rows = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
    return rows, n // rows


# ---------------------------------------------------------------------------
# Hamiltonian container
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """Real symmetric sparse matrix in a labelled many-body basis.

    ``labels`` are register bitmasks (qubit models) or occupation bitmasks
    (fermion models).  ``n_sites`` is the qubit count or orbital count.
    """

    matrix: sp.csr_matrix
    labels: np.ndarray
    model: str
    n_sites: int
    sector: str | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal()

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def restrict(self, mask: np.ndarray, sector: str | None) -> "Hamiltonian":
        idx = np.flatnonzero(mask)
        sub = self.matrix[idx][:, idx].tocsr()
        return Hamiltonian(sub, self.labels[idx], self.model, self.n_sites, sector, dict(self.meta))


def popcount(labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    out = np.zeros(labels.shape, dtype=np.int64)
    x = labels.copy()
    while np.any(x):
        out += x & 1
        x >>= 1
    return out


def _symmetric_from_coo(rows, cols, data, diag, dim) -> sp.csr_matrix:
    # keep the strict upper triangle and mirror it so (i,j) and (j,i) are bit-equal
    upper = sp.coo_matrix((data, (rows, cols)), shape=(dim, dim)).tocsr()
    upper.sum_duplicates()
    upper = sp.triu(upper, k=1)
    m = upper + upper.T + sp.diags(diag)
    m = m.tocsr()
    m.eliminate_zeros()
    m.sort_indices()
    return m


# ---------------------------------------------------------------------------
# qubit register model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SGQCParams:
    """Parameters of the qubit register model.

    ``G_i`` are uniform in ``[delta0 - delta/2, delta0 + delta/2]`` and the
    couplings ``J_ij`` uniform in ``[-J, J]`` on the lattice edges.
    ``delta`` may go up to ``2*delta0`` for the spin-glass shard preset.
    """

    n: int
    delta0: float
    delta: float
    J: float
    lattice: LatticeSpec
    seed: int = 0

    def __post_init__(self):
        if self.n != self.lattice.n_sites:
            raise InvalidParameterError(f"n={self.n} but lattice has {self.lattice.n_sites} sites")
        if self.delta0 <= 0:
            raise InvalidParameterError("delta0 must be positive")
        if not 0 <= self.delta <= 2 * self.delta0:
            raise InvalidParameterError("delta must lie in [0, 2*delta0]")
        if self.J < 0:
            raise InvalidParameterError("J must be non-negative")
        if self.seed < 0:
            raise InvalidParameterError("seed must be non-negative")

    @classmethod
    def square(cls, n, delta0=1.0, delta=1.0, J=0.0, seed=0):
        """Torus of the most nearly square shape holding ``n`` qubits."""
        rows, cols = lattice_shape(n)
        return cls(n, delta0, delta, J, build_lattice(rows, cols), seed)

    @classmethod
    def shard(cls, n, delta0=1.0, J=0.0, seed=0, topology="star"):
        """Quantum spin-glass shard: one site coupled to all others, ``delta = 2*delta0``."""
        return cls(n, delta0, 2 * delta0, J, build_lattice(1, n, topology), seed)

    def with_coupling(self, J: float) -> "SGQCParams":
        return SGQCParams(self.n, self.delta0, self.delta, J, self.lattice, self.seed)


def sgqc_disorder(params: SGQCParams) -> tuple[np.ndarray, np.ndarray]:
    """One-qubit splittings (site order) then couplings (edge order)."""
    rng = np.random.default_rng(params.seed)
    half = params.delta / 2
    gammas = rng.uniform(params.delta0 - half, params.delta0 + half, params.n)
    couplings = rng.uniform(-params.J, params.J, len(params.lattice.edges))
    return gammas, couplings


def register_energies(gammas, n: int | None = None) -> np.ndarray:
    """Unperturbed energies of all ``2**n`` register states, indexed by bitmask."""
    gammas = np.asarray(gammas, dtype=float)
    n = len(gammas) if n is None else n
    labels = np.arange(2**n, dtype=np.int64)
    bits = (labels[:, None] >> np.arange(n)) & 1
    return (1 - 2 * bits) @ gammas


def build_sgqc(params: SGQCParams, *, gammas=None, couplings=None,
               cap: int = DEFAULT_QUBIT_CAP) -> Hamiltonian:
    """Full ``2**n`` register-basis matrix of the qubit model.

    ``gammas`` / ``couplings`` override the seeded draws (used for analytic
    checks); otherwise they come from :func:`sgqc_disorder`.
    """
    n = params.n
    if n > cap:
        raise CapacityError(f"n={n} exceeds qubit cap {cap}")
    drawn = sgqc_disorder(params)
    gammas = drawn[0] if gammas is None else np.asarray(gammas, dtype=float)
    couplings = drawn[1] if couplings is None else np.asarray(couplings, dtype=float)
    if gammas.shape != (n,) or couplings.shape != (len(params.lattice.edges),):
        raise InvalidParameterError("disorder override has the wrong shape")

    dim = 2**n
    labels = np.arange(dim, dtype=np.int64)
    diag = register_energies(gammas, n)
    rows, cols, data = [], [], []
    for (i, j), jij in zip(params.lattice.edges, couplings):
        if jij == 0.0:
            continue
        partner = labels ^ ((1 << i) | (1 << j))
        rows.append(labels)
        cols.append(partner)
        data.append(np.full(dim, jij))
    if rows:
        rows, cols, data = np.concatenate(rows), np.concatenate(cols), np.concatenate(data)
    else:
        rows = cols = np.zeros(0, dtype=np.int64)
        data = np.zeros(0)
    matrix = _symmetric_from_coo(rows, cols, data, diag, dim)
    meta = {"gammas": gammas, "couplings": couplings, "params": params}
    return Hamiltonian(matrix, labels, "sgqc", n, None, meta)


def parity_sectors(H: Hamiltonian) -> tuple[Hamiltonian, Hamiltonian]:
    """Split into the even and odd up-count sectors.

    Raises :class:`StructureError` if any coupling connects the two sectors.
    """
    parity = popcount(H.labels) & 1
    even, odd = parity == 0, parity == 1
    cross = H.matrix[np.flatnonzero(even)][:, np.flatnonzero(odd)]
    if cross.count_nonzero():
        raise StructureError("Hamiltonian couples even and odd parity sectors")
    return H.restrict(even, "even"), H.restrict(odd, "odd")


def project_band(H: Hamiltonian, k: int) -> Hamiltonian:
    """Block of register states with exactly ``k`` qubits up.

    Couplings that leave the band (flipping two equal bits) are dropped, which
    is the band-projected Hamiltonian restricted to one band.
    """
    if not 0 <= k <= H.n_sites:
        raise IndexError(f"band index {k} outside [0, {H.n_sites}]")
    return H.restrict(popcount(H.labels) == k, f"band{k}")


def central_band(n: int) -> int:
    """Band at ``E = 0`` for even ``n`` and at ``E = -delta0`` for odd ``n``."""
    return n // 2 if n % 2 == 0 else (n + 1) // 2


def band_parity(k: int) -> str:
    return "even" if k % 2 == 0 else "odd"


# ---------------------------------------------------------------------------
# two-body random interaction model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TBRIMParams:
    """``n`` fermions on ``m`` orbitals uniform in ``[0, m*Delta]``; two-body
    elements uniform in ``[-U, U]``."""

    m: int
    n: int
    Delta: float = 1.0
    U: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.n < self.m:
            raise InvalidParameterError(f"need 0 < n < m, got m={self.m}, n={self.n}")
        if self.Delta <= 0 or self.U < 0:
            raise InvalidParameterError("Delta must be positive and U non-negative")
        if self.seed < 0:
            raise InvalidParameterError("seed must be non-negative")

    @property
    def dim(self) -> int:
        return math.comb(self.m, self.n)

    def with_coupling(self, U: float) -> "TBRIMParams":
        return TBRIMParams(self.m, self.n, self.Delta, U, self.seed)


def count_directly_coupled(m: int, n: int) -> int:
    """Number of determinants reachable by moving at most two particles,
    the starting determinant included."""
    if not 0 < n < m:
        raise InvalidParameterError(f"need 0 < n < m, got m={m}, n={n}")
    return 1 + n * (m - n) + n * (n - 1) * (m - n) * (m - n - 1) // 4


def fermion_basis(m: int, n: int) -> np.ndarray:
    """Occupation bitmasks of all n-subsets of m orbitals, lexicographic."""
    return np.array([sum(1 << a for a in occ) for occ in itertools.combinations(range(m), n)],
                    dtype=np.int64)


def _annihilate(state: int, r: int) -> tuple[int, int]:
    sign = -1 if bin(state & ((1 << r) - 1)).count("1") & 1 else 1
    return state ^ (1 << r), sign


def _create(state: int, p: int) -> tuple[int, int]:
    sign = -1 if bin(state & ((1 << p) - 1)).count("1") & 1 else 1
    return state | (1 << p), sign


@functools.lru_cache(maxsize=16)
def _two_body_structure(m: int, n: int):
    """Index arrays for every term ``c+_p c+_q c_s c_r`` (p<q, r<s) acting on
    every basis determinant: (row, col, sign, pair_pq, pair_rs)."""
    labels = fermion_basis(m, n)
    index = {int(s): i for i, s in enumerate(labels)}
    pair_id = {pq: i for i, pq in enumerate(itertools.combinations(range(m), 2))}
    rows, cols, signs, out_pairs, in_pairs = [], [], [], [], []
    for col, state in enumerate(labels.tolist()):
        occ = [a for a in range(m) if state >> a & 1]
        for r, s in itertools.combinations(occ, 2):
            st, s1 = _annihilate(state, r)
            st, s2 = _annihilate(st, s)
            empty = [a for a in range(m) if not st >> a & 1]
            for p, q in itertools.combinations(empty, 2):
                st2, s3 = _create(st, q)
                st2, s4 = _create(st2, p)
                rows.append(index[st2])
                cols.append(col)
                signs.append(s1 * s2 * s3 * s4)
                out_pairs.append(pair_id[(p, q)])
                in_pairs.append(pair_id[(r, s)])
    occupation = ((labels[:, None] >> np.arange(m)) & 1).astype(float)
    arrays = [np.array(x, dtype=np.int64) for x in (rows, cols, signs, out_pairs, in_pairs)]
    for a in arrays:
        a.setflags(write=False)
    occupation.setflags(write=False)
    return labels, occupation, arrays


def tbrim_disorder(params: TBRIMParams) -> tuple[np.ndarray, np.ndarray]:
    """Sorted orbital energies, then the symmetric pair-pair element matrix.

    One uniform value per unordered pair of orbital pairs (upper triangle,
    diagonal included, row-major), pairs ordered lexicographically.
    """
    rng = np.random.default_rng(params.seed)
    m = params.m
    energies = np.sort(rng.uniform(0.0, m * params.Delta, m))
    n2 = m * (m - 1) // 2
    iu = np.triu_indices(n2)
    values = rng.uniform(-params.U, params.U, len(iu[0]))
    V = np.zeros((n2, n2))
    V[iu] = values
    V[iu[1], iu[0]] = values
    return energies, V


def build_tbrim(params: TBRIMParams, *, orbital_energies=None, two_body=None,
                cap: int = DEFAULT_TBRIM_CAP) -> Hamiltonian:
    """Determinant-basis matrix of the TBRIM.

    ``H = sum_a e_a n_a + sum_{p<q, r<s} V[pq, rs] c+_p c+_q c_s c_r``.
    """
    if params.dim > cap:
        raise CapacityError(f"basis size {params.dim} exceeds cap {cap}")
    drawn = tbrim_disorder(params)
    energies = drawn[0] if orbital_energies is None else np.asarray(orbital_energies, dtype=float)
    V = drawn[1] if two_body is None else np.asarray(two_body, dtype=float)
    labels, occupation, (rows, cols, signs, out_pairs, in_pairs) = _two_body_structure(params.m, params.n)
    data = signs * V[out_pairs, in_pairs]
    diag_terms = rows == cols
    diag = occupation @ energies + np.bincount(rows[diag_terms], weights=data[diag_terms],
                                               minlength=len(labels))
    off = ~diag_terms
    matrix = _symmetric_from_coo(rows[off], cols[off], data[off], diag, len(labels))
    meta = {"orbital_energies": energies, "two_body": V, "params": params}
    return Hamiltonian(matrix, labels.copy(), "tbrim", params.m, None, meta)


# ---------------------------------------------------------------------------
# three distinguishable particles: second-order effective coupling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThreeParticleCoupling:
    value: float
    n_terms: int
    excluded: int


def second_order_sum(u12, u23, detunings) -> ThreeParticleCoupling:
    """``sum_k u12[k] * u23[k] / detunings[k]`` skipping exact zero detunings."""
    u12, u23, d = (np.asarray(x, dtype=float) for x in (u12, u23, detunings))
    ok = d != 0.0
    value = float(np.sum(u12[ok] * u23[ok] / d[ok]))
    return ThreeParticleCoupling(value, int(ok.sum()), int((~ok).sum()))


@dataclass(frozen=True)
class LayerModel:
    """Three distinguishable particles, each on ``m`` random levels of mean
    spacing ``Delta``; pair interactions 1-2 and 2-3 are random in ``[-U, U]``
    and 1-3 vanishes.

    Elements are generated on demand from ``(seed, pair tag, canonical key)`` so
    any element is reproducible without storing ``m**4`` numbers.
    """

    m: int
    Delta: float
    U: float
    seed: int = 0

    @functools.cached_property
    def energies(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return np.sort(rng.uniform(0.0, self.m * self.Delta, (3, self.m)), axis=1)

    def element(self, tag: int, bra: tuple[int, int], ket: tuple[int, int]) -> float:
        """Real symmetric two-body element ``<bra|U_tag|ket>`` (tag 12 or 23)."""
        a, b = sorted([tuple(bra), tuple(ket)])
        u = np.random.default_rng([self.seed, tag, *a, *b]).random()
        return self.U * (2.0 * u - 1.0)


def effective_three_particle_coupling(m, Delta, U, seed, state_in, state_out) -> ThreeParticleCoupling:
    """Second-order coupling between ``|1 2 3>`` and ``|1' 2' 3'>`` via the
    intermediate states ``|1' k 3>``, summed over the single-particle level
    ``k`` of particle 2."""
    model = LayerModel(m, Delta, U, seed)
    (a, b, c), (a2, b2, c2) = state_in, state_out
    for lvl in (*state_in, *state_out):
        if not 0 <= lvl < m:
            raise InvalidParameterError(f"level {lvl} outside [0, {m})")
    e = model.energies
    ks = range(m)
    u12 = [model.element(12, (a2, k), (a, b)) for k in ks]
    u23 = [model.element(23, (b2, c2), (k, c)) for k in ks]
    detunings = (e[0, a] + e[1, b]) - (e[0, a2] + e[1, np.arange(m)])
    return second_order_sum(u12, u23, detunings)
