# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled loops for dense occupation-basis operator assembly.

Both functions mirror ``_kernels_py`` exactly; the Python twin is the
reference the tests compare against.
"""
import numpy as np

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil


cdef inline int _apply(unsigned long long *state, int mode, int dagger) noexcept nogil:
    """Apply one ladder operator in place; return the sign or 0 if it vanishes."""
    cdef unsigned long long bit = (<unsigned long long>1) << mode
    cdef int occupied = (state[0] & bit) != 0
    if dagger == occupied:
        return 0
    cdef int parity = __builtin_popcountll(state[0] & (bit - 1)) & 1
    state[0] ^= bit
    return -1 if parity else 1


def quadratic_form(int n_modes, long[::1] mode1, signed char[::1] dag1,
                   long[::1] mode2, signed char[::1] dag2,
                   double complex[::1] coef):
    """Dense matrix of sum_t coef[t] * O1[t] O2[t] on the occupation basis."""
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n_modes
    cdef Py_ssize_t n_terms = coef.shape[0]
    out_arr = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef Py_ssize_t s, t
    cdef unsigned long long state
    cdef int sign
    with nogil:
        for t in range(n_terms):
            for s in range(dim):
                state = <unsigned long long>s
                sign = _apply(&state, <int>mode2[t], dag2[t])
                if sign == 0:
                    continue
                sign *= _apply(&state, <int>mode1[t], dag1[t])
                if sign == 0:
                    continue
                out[state, s] += sign * coef[t]
    return out_arr


def pauli_sum(int n_sites, long long[::1] flip, long long[::1] phase_mask,
              long[::1] n_y, double complex[::1] coef):
    """Dense matrix of a sum of Pauli strings given as bit masks."""
    cdef Py_ssize_t dim = (<Py_ssize_t>1) << n_sites
    cdef Py_ssize_t n_terms = coef.shape[0]
    out_arr = np.zeros((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef double complex iy[4]
    iy[0] = 1
    iy[1] = 1j
    iy[2] = -1
    iy[3] = -1j
    cdef Py_ssize_t s, t
    cdef double complex base
    cdef unsigned long long target
    with nogil:
        for t in range(n_terms):
            base = coef[t] * iy[n_y[t] & 3]
            for s in range(dim):
                target = (<unsigned long long>s) ^ (<unsigned long long>flip[t])
                if __builtin_popcountll((<unsigned long long>s) & (<unsigned long long>phase_mask[t])) & 1:
                    out[target, s] -= base
                else:
                    out[target, s] += base
    return out_arr
