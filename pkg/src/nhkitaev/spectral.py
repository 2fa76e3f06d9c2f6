"""Analytic diagonalization of each momentum sector at zero chemical potential.

The quasiparticle operators ``A`` of a pair block are left eigenvectors of
``h_k`` and do not depend on ``delta_a - delta_b``; this is what keeps the
ground state fixed along a line of constant ``delta_a + delta_b``.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
from typing import NamedTuple

import numpy as np

from . import model
from .fockspace import FockSpace, FockVector, fix_phase

TOL = 1e-10


class ExceptionalPointError(ValueError):
    """The requested construction breaks down (defective block, degenerate kernel)."""


class BandIndex(NamedTuple):
    rho: int
    sigma: int


BANDS = (BandIndex(1, 1), BandIndex(1, -1), BandIndex(-1, 1), BandIndex(-1, -1))


def _require_zero_mu(p, what):
    if p.mu != 0.0:
        raise ValueError(f"{what} is only analytic at mu = 0 (got mu = {p.mu}); "
                         "diagonalize core_matrix numerically instead")


def quasiparticle_energy(p, k, band):
    """Closed-form energy of band ``(rho, sigma)`` at momentum ``k``."""
    _require_zero_mu(p, "quasiparticle_energy")
    model._check_k(k)
    rho, sigma = band
    c, s = math.cos(0.5 * k), math.sin(0.5 * k)
    radial = math.sqrt((2.0 * p.J * c) ** 2 + (p.pair_sum * s) ** 2)
    return complex(rho * radial, sigma * p.imbalance * c)


def mixing_angle(p, k):
    """The angle theta of the pair eigenmodes (two-argument arctangent)."""
    s = p.pair_sum
    return math.atan2(math.sin(k) * (2.0 * p.J - s),
                      2.0 * p.J + s + math.cos(k) * (2.0 * p.J - s))


@dataclass(frozen=True)
class ModeBasis:
    """Quasiparticle operators of one pair block.

    ``coeffs_A[b]`` multiplies ``(alpha_k, beta_k, alpha_-k^dag, beta_-k^dag)``
    in ``A_b``; ``coeffs_Abar[b]`` multiplies their adjoints in ``Abar_b``.
    Both already include the ``1/sqrt(Omega)`` normalization.
    """

    k: float
    theta: float
    omega: dict
    coeffs_A: dict
    coeffs_Abar: dict
    energies: dict = field(default_factory=dict)


def _raw_A(theta, k, band):
    rho, sigma = band
    e1 = np.exp(1j * (theta - 0.5 * k))
    e2 = np.exp(1j * (theta - k))
    e3 = np.exp(-0.5j * k)
    return np.array([
        1 + rho * sigma * 1j * e1,
        rho * e2 + 1j * sigma * e3,
        1 - rho * sigma * 1j * e1,
        -rho * e2 + 1j * sigma * e3,
    ])


def mode_basis(p, k):
    """Build the normalized ``A`` / ``Abar`` coefficient vectors at ``k``.

    ``Abar_b`` is the adjoint of ``A_b``: ``h_k`` is normal (its Hermitian
    and anti-Hermitian parts commute), so each left eigenvector conjugates
    into the right eigenvector of the same band. ``Omega_b`` is fixed by
    ``{A_b, Abar_b} = 1``.

    Raises
    ------
    ExceptionalPointError
        If some ``Omega_b`` vanishes or the bands fail to be biorthogonal.
    """
    _require_zero_mu(p, "mode_basis")
    model._check_k(k)
    theta = mixing_angle(p, k)
    raw = {b: _raw_A(theta, k, b) for b in BANDS}
    omega, A, Abar = {}, {}, {}
    for b in BANDS:
        om = complex(raw[b] @ raw[b].conj())
        if abs(om) < TOL:
            raise ExceptionalPointError(f"normalization vanishes for band {b} at k = {k}")
        omega[b] = om
        A[b] = raw[b] / np.sqrt(om)
        Abar[b] = raw[b].conj() / np.sqrt(om)
    for b in BANDS:
        for b2 in BANDS:
            if b2 != b and abs(A[b] @ Abar[b2]) > 1e-8:
                raise ExceptionalPointError(f"bands {b} and {b2} are not biorthogonal at k = {k}")
    energies = {b: quasiparticle_energy(p, k, b) for b in BANDS}
    return ModeBasis(float(k), theta, omega, A, Abar, energies)


def mode_operators(basis):
    """Many-body matrices ``(A, Abar)`` on the 16-dim pair space, keyed by band."""
    S = model.pair_space()
    psi = (S.annihilator(0), S.annihilator(1), S.creator(2), S.creator(3))
    A = {b: sum(c * op for c, op in zip(basis.coeffs_A[b], psi)) for b in BANDS}
    psid = tuple(op.conj().T for op in psi)
    Abar = {b: sum(c * op for c, op in zip(basis.coeffs_Abar[b], psid)) for b in BANDS}
    return A, Abar


def canonical_deviation(basis):
    """Max entry deviation of the anticommutators of ``A``/``Abar`` from ``delta``."""
    A, Abar = mode_operators(basis)
    one = np.eye(16)
    worst = 0.0
    for b in BANDS:
        for b2 in BANDS:
            target = one if b == b2 else 0.0
            for lhs in (A[b] @ Abar[b2] + Abar[b2] @ A[b] - target,
                        A[b] @ A[b2] + A[b2] @ A[b],
                        Abar[b] @ Abar[b2] + Abar[b2] @ Abar[b]):
                worst = max(worst, float(np.abs(lhs).max()))
    return worst


def vacuum_state(basis, tol=1e-8):
    """Unit vector annihilated by all four ``A`` operators (phase fixed)."""
    A, _ = mode_operators(basis)
    stacked = np.vstack([A[b] for b in BANDS])
    _, sv, vh = np.linalg.svd(stacked)
    null = int(np.sum(sv < tol * sv[0]))
    if null != 1:
        raise ExceptionalPointError(f"vacuum kernel has dimension {null}, expected 1")
    return FockVector(model.pair_space(), fix_phase(vh[-1].conj()))


def pair_ground_vector(p, k):
    """``Abar_{-+} Abar_{--} |Vac>`` normalized, for the pair ``(k, -k)``."""
    basis = mode_basis(p, k)
    _, Abar = mode_operators(basis)
    vac = vacuum_state(basis)
    v = Abar[BandIndex(-1, 1)] @ (Abar[BandIndex(-1, -1)] @ vac.amplitudes)
    return FockVector(model.pair_space(), fix_phase(v))


def boundary_ground_factors():
    """The ``k = 0`` and ``k = pi`` factors of the ground state, each on 4 dims.

    ``(alpha_0^dag - beta_0^dag)|0>/sqrt2`` and ``(1 - alpha_pi^dag beta_pi^dag)|0>/sqrt2``.
    The ``pi`` factor needs the minus sign: ``H_pi`` maps
    ``(1 + alpha^dag beta^dag)|0>`` to ``+(delta_a + delta_b)`` times itself.
    """
    S = model.dimer_space()
    vac = S.vacuum()
    g0 = (S.creator(0) - S.creator(1)) @ vac / math.sqrt(2.0)
    gpi = (vac - S.creator(0) @ (S.creator(1) @ vac)) / math.sqrt(2.0)
    return FockVector(S, fix_phase(g0)), FockVector(S, fix_phase(gpi))


def boundary_ground_vector():
    """``1/2 (1 - alpha_pi^dag beta_pi^dag)(alpha_0^dag - beta_0^dag)|0>`` on 16 dims."""
    S = FockSpace(model.BOUNDARY_MODES)
    v = (S.creator(0) - S.creator(1)) @ S.vacuum()
    v = 0.5 * (v - S.creator(2) @ (S.creator(3) @ v))
    return FockVector(S, fix_phase(v))


@dataclass(frozen=True)
class GroundState:
    """Ground state as a product over momentum blocks.

    ``pair_vectors`` maps each ``k`` in (0, pi) to its 16-dim block vector,
    in increasing ``k`` order.
    """

    params: model.ModelParams
    boundary_vector: FockVector
    zero_factor: FockVector
    pi_factor: FockVector
    pair_vectors: dict
    energy: complex


def ground_energy(p):
    """Closed-form ground energy ``2 sum Re eps_{-+} - (2J + delta_a + delta_b)``."""
    _require_zero_mu(p, "ground_energy")
    grid = model.momentum_grid(p.N)
    total = sum(2.0 * quasiparticle_energy(p, k, BandIndex(-1, 1)).real for k in grid.pairs)
    return total - (2.0 * p.J + p.pair_sum)


def ground_state(p, workers=None):
    """Assemble the ground state block by block.

    Parameters
    ----------
    p : ModelParams
        Must have ``mu == 0``.
    workers : int, optional
        Evaluate the pair blocks on a thread pool; results are merged in
        increasing ``k`` regardless of completion order.
    """
    _require_zero_mu(p, "ground_state")
    ks = model.momentum_grid(p.N).pairs
    if workers and workers > 1 and len(ks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            vectors = list(pool.map(lambda k: pair_ground_vector(p, k), ks))
    else:
        vectors = [pair_ground_vector(p, k) for k in ks]
    g0, gpi = boundary_ground_factors()
    energy = complex(ground_energy(p))
    return GroundState(p, boundary_ground_vector(), g0, gpi, dict(zip(ks, vectors)), energy)


def block_overlaps(state, other):
    """Per-block overlap moduli ``|<G|G'>|`` (boundary first, then pairs by k)."""
    out = {"boundary": abs(state.boundary_vector.overlap(other.boundary_vector))}
    for k, v in state.pair_vectors.items():
        out[k] = abs(v.overlap(other.pair_vectors[k]))
    return out


def fixed_line_overlaps(p, imbalances):
    """Minimum per-block overlap between ``ground_state(p)`` and its imbalance-shifted copies."""
    ref = ground_state(p)
    return {d: min(block_overlaps(ref, ground_state(p.with_imbalance(d))).values())
            for d in imbalances}


def block_residuals(state):
    """``||H_b v_b - E_b v_b||`` for each block of a ground state at mu = 0."""
    p = state.params
    H0, Hpi = model.boundary_blocks(p)
    res = {
        "zero": float(np.linalg.norm(H0 @ state.zero_factor.amplitudes + 2 * p.J * state.zero_factor.amplitudes)),
        "pi": float(np.linalg.norm(Hpi @ state.pi_factor.amplitudes + p.pair_sum * state.pi_factor.amplitudes)),
    }
    for k, v in state.pair_vectors.items():
        e = 2.0 * quasiparticle_energy(p, k, BandIndex(-1, 1)).real
        Hk = model.pair_block_hamiltonian(p, k)
        res[k] = float(np.linalg.norm(Hk @ v.amplitudes - e * v.amplitudes))
    return res
