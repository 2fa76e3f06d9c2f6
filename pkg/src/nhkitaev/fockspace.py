"""Occupation-number spaces for a named list of fermionic modes.

Bit ``i`` of a basis index is the occupation of mode ``i``; the
Jordan-Wigner sign of a ladder operator on mode ``i`` counts the occupied
modes with lower index.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import kernels


class FockSpace:
    """Fock space spanned by the modes in ``mode_labels`` (in that order)."""

    def __init__(self, mode_labels):
        labels = tuple(mode_labels)
        if len(set(labels)) != len(labels):
            raise ValueError("mode labels must be distinct")
        self._labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    @property
    def mode_labels(self):
        return self._labels

    @property
    def n_modes(self):
        return len(self._labels)

    @property
    def dimension(self):
        return 1 << len(self._labels)

    def __repr__(self):
        return f"FockSpace({list(self._labels)!r})"

    def index(self, mode):
        """Position of *mode* (a label or an integer position)."""
        if isinstance(mode, (int, np.integer)) and mode not in self._index:
            if not 0 <= mode < self.n_modes:
                raise IndexError(mode)
            return int(mode)
        return self._index[mode]

    @cached_property
    def _annihilators(self):
        dim = self.dimension
        basis = np.arange(dim, dtype=np.int64)
        ops = []
        for i in range(self.n_modes):
            bit = 1 << i
            src = basis[(basis & bit) != 0]
            below = src & (bit - 1)
            parity = np.array([bin(int(x)).count("1") & 1 for x in below], dtype=np.int64)
            M = np.zeros((dim, dim), dtype=np.complex128)
            M[src ^ bit, src] = 1 - 2 * parity
            M.setflags(write=False)
            ops.append(M)
        return tuple(ops)

    def annihilator(self, mode):
        return self._annihilators[self.index(mode)]

    def creator(self, mode):
        return self.annihilator(mode).conj().T

    def number(self, mode):
        i = self.index(mode)
        diag = ((np.arange(self.dimension) >> i) & 1).astype(np.complex128)
        return np.diag(diag)

    def identity(self):
        return np.eye(self.dimension, dtype=np.complex128)

    def vacuum(self):
        v = np.zeros(self.dimension, dtype=np.complex128)
        v[0] = 1.0
        return v

    def basis_state(self, occupied):
        """Basis vector with the given modes occupied (no operator signs)."""
        idx = 0
        for mode in occupied:
            idx |= 1 << self.index(mode)
        v = np.zeros(self.dimension, dtype=np.complex128)
        v[idx] = 1.0
        return v

    def parity(self):
        """Diagonal of the fermion parity operator (-1)^N."""
        counts = np.array([bin(s).count("1") for s in range(self.dimension)])
        return 1 - 2 * (counts & 1)

    def quadratic(self, terms):
        """Matrix of ``sum coef * O1 O2``.

        Parameters
        ----------
        terms : iterable of (coef, (mode1, dag1), (mode2, dag2))
            Modes may be labels or positions; ``dag`` True means creation.
        """
        resolved = [
            (c, (self.index(m1), d1), (self.index(m2), d2))
            for c, (m1, d1), (m2, d2) in terms
        ]
        if not resolved:
            return np.zeros((self.dimension, self.dimension), dtype=np.complex128)
        return kernels.quadratic_form(self.n_modes, resolved)


@dataclass(frozen=True)
class FockVector:
    """Complex amplitudes over the occupation basis of ``space``."""

    space: FockSpace
    amplitudes: np.ndarray

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        """``<self|other>``; both must live on spaces with the same modes."""
        if self.space.mode_labels != other.space.mode_labels:
            raise ValueError("vectors live on different mode sets")
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def fix_phase(v, tol=1e-12):
    """Return ``v`` normalized with its first significant amplitude real positive."""
    v = np.asarray(v, dtype=np.complex128)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    v = v / norm
    big = np.flatnonzero(np.abs(v) > tol * np.abs(v).max())
    first = v[big[0]]
    v = v * (abs(first) / first)
    v[big[0]] = abs(first)
    return v
