r"""Parameters, momentum grid and the k-space / real-space Hamiltonians.

The chain has ``2N`` sites grouped into ``N`` dimers ``(2j-1, 2j)``:

.. math::

    H = J\sum_l (c_l^\dagger c_{l+1} + \mathrm{h.c.}) + \mu\sum_l (1 - 2n_l)
        + \sum_j (\Delta_a c_{2j}^\dagger c_{2j+1}^\dagger + \Delta_a c_{2j}c_{2j-1}
        + \Delta_b c_{2j+1}c_{2j} + \Delta_b c_{2j-1}^\dagger c_{2j}^\dagger)

with ``c_{2N+1} = c_1`` (periodic) or ``c_{2N+1} = 0`` (open).
"""
from dataclasses import dataclass, replace
import math

import numpy as np

from .fockspace import FockSpace

FOCK_MAX_SITES = 12


@dataclass(frozen=True)
class ModelParams:
    """One Hamiltonian instance ``H(J, delta_a, delta_b, mu)`` on ``N`` dimers."""

    J: float = 1.0
    delta_a: float = 1.0
    delta_b: float = 1.0
    mu: float = 0.0
    N: int = 4

    def __post_init__(self):
        for name in ("J", "delta_a", "delta_b", "mu"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float, np.floating, np.integer)):
                raise TypeError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            raise TypeError(f"N must be an integer, got {self.N!r}")
        if self.N < 2:
            raise ValueError(f"N must be at least 2, got {self.N}")
        if self.N % 2:
            raise ValueError(f"N must be even, got {self.N}")

    @property
    def sites(self):
        return 2 * self.N

    @property
    def pair_sum(self):
        """``delta_a + delta_b``; constant along a fixed line."""
        return self.delta_a + self.delta_b

    @property
    def imbalance(self):
        """``delta_a - delta_b``; the non-Hermitian strength."""
        return self.delta_a - self.delta_b

    def with_(self, **changes):
        return replace(self, **changes)

    def with_imbalance(self, imbalance):
        """Same fixed line (same ``delta_a + delta_b``), new imbalance."""
        s = self.pair_sum
        return replace(self, delta_a=0.5 * (s + imbalance), delta_b=0.5 * (s - imbalance))


@dataclass(frozen=True)
class MomentumGrid:
    """Momenta ``2 pi m / N``: the two self-conjugate ones and the ``(k, -k)`` pairs."""

    N: int
    singles: tuple
    pairs: tuple


def momentum_grid(N):
    """Split ``k = 2 pi m / N`` into ``{0, pi}`` and the ``N/2 - 1`` pairs in (0, pi)."""
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 2 or N % 2:
        raise ValueError(f"N must be an even integer >= 2, got {N!r}")
    pairs = tuple(2.0 * math.pi * m / N for m in range(1, N // 2))
    return MomentumGrid(int(N), (0.0, math.pi), pairs)


def _check_k(k):
    if not 0.0 < k < math.pi:
        raise ValueError(f"k must lie strictly inside (0, pi), got {k!r}")


def core_matrix_terms(k):
    """Coefficient matrices ``(H_J, H_a, H_b, H_mu)`` with ``h_k = J H_J + ...``.

    ``h_k`` is linear in the four parameters, which lets the dynamics
    precompute per-block operators once.
    """
    e = np.exp(1j * k)
    ec = np.conj(e)
    HJ = np.array([[0, 1 + ec, 0, 0],
                   [1 + e, 0, 0, 0],
                   [0, 0, 0, -(1 + ec)],
                   [0, 0, -(1 + e), 0]], dtype=np.complex128)
    Ha = np.array([[0, 0, 0, -ec],
                   [0, 0, e, 0],
                   [0, -1, 0, 0],
                   [1, 0, 0, 0]], dtype=np.complex128)
    Hb = np.array([[0, 0, 0, 1],
                   [0, 0, -1, 0],
                   [0, ec, 0, 0],
                   [-e, 0, 0, 0]], dtype=np.complex128)
    Hmu = np.diag([-2.0, -2.0, 2.0, 2.0]).astype(np.complex128)
    return HJ, Ha, Hb, Hmu


def core_matrix(p, k):
    r"""The 4x4 core matrix ``h_k`` in the basis ``(alpha_k, beta_k, alpha_{-k}^\dagger, beta_{-k}^\dagger)``."""
    _check_k(k)
    HJ, Ha, Hb, Hmu = core_matrix_terms(k)
    return p.J * HJ + p.delta_a * Ha + p.delta_b * Hb + p.mu * Hmu


def gamma_matrices(k):
    """The decomposition matrices; ``h_k = J G1 + (s/2) G2 + (d/2) G3`` at zero mu."""
    g = lambda q: 1.0 + np.exp(1j * q)
    G1 = np.array([[0, g(-k), 0, 0],
                   [g(k), 0, 0, 0],
                   [0, 0, 0, -g(-k)],
                   [0, 0, -g(k), 0]], dtype=np.complex128)
    G2 = np.array([[0, 0, 0, g(np.pi - k)],
                   [0, 0, -g(np.pi + k), 0],
                   [0, -g(np.pi - k), 0, 0],
                   [g(np.pi + k), 0, 0, 0]], dtype=np.complex128)
    G3 = np.array([[0, 0, 0, -g(-k)],
                   [0, 0, g(k), 0],
                   [0, -g(-k), 0, 0],
                   [g(k), 0, 0, 0]], dtype=np.complex128)
    return G1, G2, G3


PAIR_MODES = ("alpha_k", "beta_k", "alpha_-k", "beta_-k")
BOUNDARY_MODES = ("alpha_0", "beta_0", "alpha_pi", "beta_pi")

_PAIR_SPACE = FockSpace(PAIR_MODES)
_DIMER_SPACE = FockSpace(("alpha", "beta"))


def pair_space():
    """The 16-dim Fock space of ``(alpha_k, beta_k, alpha_-k, beta_-k)``."""
    return _PAIR_SPACE


def dimer_space():
    """The 4-dim Fock space of one boundary momentum ``(alpha, beta)``."""
    return _DIMER_SPACE


# psi = (alpha_k, beta_k, alpha_-k^dag, beta_-k^dag) as (mode, dagger)
_PSI = ((0, False), (1, False), (2, True), (3, True))


def pair_block_matrix(h):
    r"""Many-body matrix of ``\psi^\dagger h \psi`` on the 16-dim pair space."""
    terms = []
    for i, (mi, di) in enumerate(_PSI):
        for j, (mj, dj) in enumerate(_PSI):
            if h[i, j] != 0:
                terms.append((h[i, j], (mi, not di), (mj, dj)))
    return _PAIR_SPACE.quadratic(terms)


def pair_block_terms(k):
    """Many-body coefficient matrices ``(J, delta_a, delta_b, mu)`` of one pair block."""
    return tuple(pair_block_matrix(h) for h in core_matrix_terms(k))


def pair_block_hamiltonian(p, k):
    """Many-body ``H_k`` (16x16) of the pair ``(k, -k)``, mu included."""
    return pair_block_matrix(core_matrix(p, k))


def boundary_block_terms():
    """Coefficient matrices of ``H_0`` and ``H_pi`` for ``(J, delta_a, delta_b, mu)``.

    Returns two 4-tuples of 4x4 matrices on the ``(alpha, beta)`` dimer space.
    """
    S = _DIMER_SPACE
    a, b = 0, 1
    one = S.identity()
    hop = S.quadratic([(1.0, (a, True), (b, False)), (1.0, (b, True), (a, False))])
    chem = 2.0 * (one - S.number(a) - S.number(b))
    pair_ab = S.quadratic([(1.0, (a, True), (b, True)), (1.0, (a, False), (b, False))])
    pair_pi = S.quadratic([(1.0, (a, True), (b, True)), (1.0, (b, False), (a, False))])
    zero = np.zeros_like(one)
    H0 = (2.0 * hop, -pair_ab, pair_ab, chem)
    Hpi = (zero, pair_pi, pair_pi, chem)
    return H0, Hpi


def boundary_blocks(p):
    """Many-body ``H_0`` and ``H_pi`` (each 4x4 on its ``(alpha, beta)`` pair)."""
    coeffs = (p.J, p.delta_a, p.delta_b, p.mu)
    H0t, Hpit = boundary_block_terms()
    H0 = sum(c * m for c, m in zip(coeffs, H0t))
    Hpi = sum(c * m for c, m in zip(coeffs, Hpit))
    return H0, Hpi


def fock_hamiltonian(p, boundary="periodic"):
    """Dense many-body matrix of the real-space chain (brute-force oracle).

    Site ``l`` (1-based) is mode ``l - 1``. Limited to ``2N <= 12`` sites.
    """
    if boundary not in ("periodic", "open"):
        raise ValueError(f"boundary must be 'periodic' or 'open', got {boundary!r}")
    L = p.sites
    if L > FOCK_MAX_SITES:
        raise ValueError(f"2N = {L} exceeds the dense Fock limit of {FOCK_MAX_SITES} sites")

    def site(l):
        if l == L + 1:
            return 0 if boundary == "periodic" else None
        return l - 1

    terms = []
    for l in range(1, L + 1):
        r = site(l + 1)
        if r is not None:
            terms.append((p.J, (l - 1, True), (r, False)))
            terms.append((p.J, (r, True), (l - 1, False)))
    for j in range(1, p.N + 1):
        r = site(2 * j + 1)
        if r is not None:
            terms.append((p.delta_a, (2 * j - 1, True), (r, True)))
            terms.append((p.delta_b, (r, False), (2 * j - 1, False)))
        terms.append((p.delta_a, (2 * j - 1, False), (2 * j - 2, False)))
        terms.append((p.delta_b, (2 * j - 2, True), (2 * j - 1, True)))
    space = FockSpace([f"c{l}" for l in range(1, L + 1)])
    H = space.quadratic(terms)
    if p.mu != 0.0:
        occ = np.array([bin(s).count("1") for s in range(space.dimension)], dtype=float)
        H[np.diag_indices_from(H)] += p.mu * (L - 2.0 * occ)
    return H
