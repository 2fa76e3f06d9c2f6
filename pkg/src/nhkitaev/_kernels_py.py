"""Numpy implementations of the operator-assembly kernels.

Used when the compiled extension is unavailable or when
``NHKITAEV_PURE_PYTHON`` is set. Vectorized over basis states.
"""
import numpy as np


def _popcount_parity(x):
    x = x.copy()
    parity = np.zeros_like(x)
    while np.any(x):
        parity ^= x & 1
        x >>= 1
    return parity


def _apply(states, sign, mode, dagger):
    bit = np.int64(1) << mode
    occupied = (states & bit) != 0
    alive = occupied != bool(dagger)
    parity = _popcount_parity(states & (bit - 1))
    sign = np.where(alive, sign * (1 - 2 * parity), 0)
    return states ^ bit, sign


def quadratic_form(n_modes, mode1, dag1, mode2, dag2, coef):
    """Dense matrix of sum_t coef[t] * O1[t] O2[t] on the occupation basis."""
    dim = 1 << n_modes
    out = np.zeros((dim, dim), dtype=np.complex128)
    basis = np.arange(dim, dtype=np.int64)
    for m1, d1, m2, d2, c in zip(mode1, dag1, mode2, dag2, coef):
        states, sign = _apply(basis, np.ones(dim, dtype=np.int64), int(m2), d2)
        states, sign = _apply(states, sign, int(m1), d1)
        keep = sign != 0
        np.add.at(out, (states[keep], basis[keep]), sign[keep] * c)
    return out


def pauli_sum(n_sites, flip, phase_mask, n_y, coef):
    """Dense matrix of a sum of Pauli strings given as bit masks."""
    dim = 1 << n_sites
    out = np.zeros((dim, dim), dtype=np.complex128)
    basis = np.arange(dim, dtype=np.int64)
    for f, pm, ny, c in zip(flip, phase_mask, n_y, coef):
        sign = 1 - 2 * _popcount_parity(basis & np.int64(pm))
        np.add.at(out, (basis ^ np.int64(f), basis), sign * (c * 1j ** int(ny)))
    return out
