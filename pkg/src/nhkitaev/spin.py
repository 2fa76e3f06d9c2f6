"""Jordan-Wigner spin picture on the fixed line ``delta_a + delta_b = 2J``.

Dense operators use the Kronecker convention with site 1 as the leftmost
factor and the ``sigma^z`` eigenbasis as computational basis.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels

MAX_SITES = 12


@dataclass(frozen=True)
class SpinOperator:
    matrix: np.ndarray
    site_count: int

    def __matmul__(self, other):
        return self.matrix @ other


@dataclass(frozen=True)
class GhzPair:
    plus: np.ndarray
    minus: np.ndarray


def _check_sites(site_count):
    if isinstance(site_count, bool) or not isinstance(site_count, (int, np.integer)):
        raise TypeError(f"site_count must be an integer, got {site_count!r}")
    if site_count < 4 or site_count % 2:
        raise ValueError(f"site_count must be even and >= 4, got {site_count}")
    if site_count > MAX_SITES:
        raise ValueError(f"site_count {site_count} exceeds the dense limit {MAX_SITES}")


def _string(site_count, ends):
    """Pauli dict with sigma^z on sites 2..2N-1 and the given end operators."""
    ops = {i: "Z" for i in range(2, site_count)}
    ops.update(ends)
    return ops


def h0_terms(site_count):
    L = site_count
    terms = [(-1.0, {l: "X", l + 1: "X"}) for l in range(1, L)]
    terms.append((-1.0, _string(L, {1: "Y", L: "Y"})))
    return terms


def calH_terms(site_count):
    L = site_count
    N = L // 2
    terms = []
    for j in range(1, N + 1):
        terms.append((1.0, {2 * j - 1: "X", 2 * j: "Y"}))
        terms.append((1.0, {2 * j - 1: "Y", 2 * j: "X"}))
    for j in range(1, N):
        terms.append((-1.0, {2 * j: "Y", 2 * j + 1: "X"}))
        terms.append((-1.0, {2 * j: "X", 2 * j + 1: "Y"}))
    terms.append((1.0, _string(L, {1: "Y", L: "X"})))
    terms.append((1.0, _string(L, {1: "X", L: "Y"})))
    return terms


def build_spin_h0(site_count):
    """Ising chain ``-sum x_l x_{l+1}`` closed by the string term ``-(prod z) y_1 y_2N``."""
    _check_sites(site_count)
    return SpinOperator(kernels.pauli_sum(site_count, h0_terms(site_count)), site_count)


def build_spin_calH(site_count):
    """The Hermitian operator multiplying ``i (delta_a - delta_b) / 4``."""
    _check_sites(site_count)
    return SpinOperator(kernels.pauli_sum(site_count, calH_terms(site_count)), site_count)


def spin_hamiltonian(p, tol=1e-12):
    """``J H_0 + i (delta_a - delta_b)/4 * calH`` for a fixed-line parameter set."""
    if abs(p.pair_sum - 2.0 * p.J) > tol * max(1.0, abs(p.J)):
        raise ValueError("spin picture requires delta_a + delta_b == 2J "
                         f"(got {p.pair_sum} vs {2 * p.J})")
    if p.mu != 0.0:
        raise ValueError(f"spin picture requires mu = 0 (got {p.mu})")
    return fixed_line_hamiltonian(p.sites, p.J, p.imbalance)


def fixed_line_hamiltonian(site_count, J, imbalance):
    """``J H_0 + i imbalance/4 * calH`` on ``site_count`` spins.

    Unlike :func:`spin_hamiltonian` this accepts any even ``site_count``,
    including ones whose dimer count is odd.
    """
    _check_sites(site_count)
    H0 = build_spin_h0(site_count).matrix
    calH = build_spin_calH(site_count).matrix
    return SpinOperator(J * H0 + 0.25j * imbalance * calH, site_count)


def _product(vec, n):
    out = vec
    for _ in range(n - 1):
        out = np.kron(out, vec)
    return out


def x_polarized(site_count, direction=1):
    """Product state with every spin along ``+x`` (``direction=1``) or ``-x``."""
    v = np.array([1.0, float(direction)], dtype=np.complex128) / math.sqrt(2.0)
    return _product(v, site_count)


def ghz_pair(site_count):
    """``(|up...up> +/- |dn...dn>)/sqrt2`` with up/down the sigma^x eigenstates."""
    _check_sites(site_count)
    up = x_polarized(site_count, 1)
    dn = x_polarized(site_count, -1)
    return GhzPair((up + dn) / math.sqrt(2.0), (up - dn) / math.sqrt(2.0))


def bulk_cancellation_residuals(site_count, state):
    """``|| y_l (x_{l-1} - x_{l+1}) |state> ||`` for every interior ``l``."""
    out = {}
    for l in range(2, site_count):
        op = kernels.pauli_sum(site_count, [(1.0, {l: "Y", l - 1: "X"}),
                                            (-1.0, {l: "Y", l + 1: "X"})])
        out[l] = float(np.linalg.norm(op @ state))
    return out


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return self.residual <= self.tolerance


def ghz_report(site_count, imbalances=(0.5, 1.0, 2.0), J=1.0, tol=1e-12):
    """Check each printed GHZ identity; one :class:`IdentityCheck` per identity."""
    _check_sites(site_count)
    L = site_count
    N = L // 2
    H0 = build_spin_h0(L).matrix
    calH = build_spin_calH(L).matrix
    ghz = ghz_pair(L)
    checks = [
        IdentityCheck("H0 hermitian", float(np.abs(H0 - H0.conj().T).max()), 0.0),
        IdentityCheck("calH hermitian", float(np.abs(calH - calH.conj().T).max()), 0.0),
    ]
    for sign, vec in ((1, ghz.plus), (-1, ghz.minus)):
        eig = -L + 1 + sign
        checks.append(IdentityCheck(f"H0 GHZ{'+' if sign > 0 else '-'} = {eig}",
                                    float(np.linalg.norm(H0 @ vec - eig * vec)), tol * L))
    checks.append(IdentityCheck("calH GHZ- = 0", float(np.linalg.norm(calH @ ghz.minus)), tol))
    for label, vec in (("+", ghz.plus), ("-", ghz.minus)):
        worst = max(bulk_cancellation_residuals(L, vec).values())
        checks.append(IdentityCheck(f"bulk cancellation GHZ{label}", worst, tol))
    for d in imbalances:
        H = J * H0 + 0.25j * d * calH
        target = -2.0 * N * J
        checks.append(IdentityCheck(f"H GHZ- = {target:g} at imbalance {d:g}",
                                    float(np.linalg.norm(H @ ghz.minus - target * ghz.minus)),
                                    1e-11))
    return checks


def heisenberg_ring(site_count):
    """Isotropic unit-coupling ring ``sum_l sigma_l . sigma_{l+1}`` (periodic)."""
    L = site_count
    terms = []
    for l in range(1, L + 1):
        r = l % L + 1
        for a in "XYZ":
            terms.append((1.0, {l: a, r: a}))
    return kernels.pauli_sum(L, terms)


def ring_nonhermitian_term(site_count):
    """``i sum_j (x_{2j-1} y_{2j} - y_{2j} x_{2j+1})`` with ``2N+1 -> 1``."""
    L = site_count
    terms = []
    for j in range(1, L // 2 + 1):
        terms.append((1j, {2 * j - 1: "X", 2 * j: "Y"}))
        terms.append((-1j, {2 * j: "Y", (2 * j) % L + 1: "X"}))
    return kernels.pauli_sum(L, terms)


def heisenberg_ring_check(site_count, tol=1e-14):
    """Annihilation and eigenvalue checks for the x-polarized ferromagnets."""
    _check_sites(site_count)
    ring = heisenberg_ring(site_count)
    extra = ring_nonhermitian_term(site_count)
    checks = []
    for label, direction in (("+x", 1), ("-x", -1)):
        vec = x_polarized(site_count, direction)
        checks.append(IdentityCheck(f"added term annihilates {label}",
                                    float(np.linalg.norm(extra @ vec)), tol))
        before = complex(np.vdot(vec, ring @ vec))
        after_vec = (ring + extra) @ vec
        checks.append(IdentityCheck(f"ring eigenstate {label} (E = {before.real:g})",
                                    float(np.linalg.norm(after_vec - before * vec)), 1e-12))
        checks.append(IdentityCheck(f"eigenvalue unchanged {label}",
                                    abs(complex(np.vdot(vec, after_vec)) - before), 1e-12))
    return checks
