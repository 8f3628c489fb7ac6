"""Quantum chaos borders in many-body and qubit-register Hamiltonians."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .models import (Hamiltonian, LatticeSpec, SGQCParams, TBRIMParams, Topology, build_lattice,
                     build_sgqc, build_tbrim, central_band, count_directly_coupled,
                     effective_three_particle_coupling, parity_sectors, project_band)
from .spectra import SpectralData, diagonalize, eta, find_critical_coupling, spacing_histogram, unfold
from .eigenstates import (analyze_states, critical_coupling_entropy, entropy_sq, fit_lorentzian, ipr,
                          ldos_fit, melting_map, overlaps)
from .dynamics import average_evolution, evolve, extract_tau_chi, survival_and_entropy
from .theory import (predict_gamma, predict_jc_sgqc, predict_jcs_sgqc, predict_uc_tbrim, predict_xi)
from .rotor import classical_reversal_experiment, quantum_reversal_experiment
