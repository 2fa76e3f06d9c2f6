"""Exact solution and numerical checks for a non-Hermitian Kitaev chain.

The chain has staggered, imbalanced pair creation and annihilation terms.
Submodules:

``numerics``   eigensolver wrapper, matrix exponential, elliptic integral
``model``      parameters, momentum grid, k-space and real-space Hamiltonians
``spectral``   analytic quasiparticle modes and the block ground state
``majorana``   Majorana ladder with a resonant impurity and its zero modes
``spin``       Jordan-Wigner spin picture and GHZ identities
``dynamics``   quench and driven fidelity in the block representation
``cli``        command-line front end
"""
from .kernels import BACKEND
from .model import ModelParams, core_matrix, fock_hamiltonian, momentum_grid
from .spectral import ground_energy, ground_state, quasiparticle_energy
from .majorana import build_majorana, ladder_ground_energy, resonance, zero_modes
from .spin import ghz_report, heisenberg_ring_check, spin_hamiltonian
from .dynamics import detect_drop, evolve_driven, evolve_quench, sine_drive, scan_quench

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ModelParams", "core_matrix", "fock_hamiltonian", "momentum_grid",
    "ground_energy", "ground_state", "quasiparticle_energy",
    "build_majorana", "ladder_ground_energy", "resonance", "zero_modes",
    "ghz_report", "heisenberg_ring_check", "spin_hamiltonian",
    "detect_drop", "evolve_driven", "evolve_quench", "sine_drive", "scan_quench",
]
