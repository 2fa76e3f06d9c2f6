"""Backend selection for the operator-assembly kernels.

The compiled Cython module is used when importable. Setting the environment
variable ``NHKITAEV_PURE_PYTHON=1`` forces the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

if os.environ.get("NHKITAEV_PURE_PYTHON"):
    _backend = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _backend

        BACKEND = "cython"
    except ImportError:
        _backend = _kernels_py
        BACKEND = "python"


def quadratic_form(n_modes, terms, backend=None):
    """Assemble ``sum coef * O1 O2`` over ladder operators.

    Parameters
    ----------
    n_modes : int
        Number of fermionic modes; the matrix has dimension ``2**n_modes``.
    terms : iterable of (coef, (mode1, dag1), (mode2, dag2))
        ``dag`` is truthy for a creation operator.
    backend : module, optional
        Override the selected backend (used by tests and benchmarks).
    """
    impl = backend or _backend
    terms = list(terms)
    coef = np.array([t[0] for t in terms], dtype=np.complex128)
    mode1 = np.array([t[1][0] for t in terms], dtype=np.int_)
    dag1 = np.array([bool(t[1][1]) for t in terms], dtype=np.int8)
    mode2 = np.array([t[2][0] for t in terms], dtype=np.int_)
    dag2 = np.array([bool(t[2][1]) for t in terms], dtype=np.int8)
    return impl.quadratic_form(int(n_modes), mode1, dag1, mode2, dag2, coef)


def pauli_sum(n_sites, terms, backend=None):
    """Assemble a sum of Pauli strings on ``n_sites`` qubits.

    Parameters
    ----------
    n_sites : int
    terms : iterable of (coef, {site: 'X' | 'Y' | 'Z'})
        Sites are 1-based; site 1 is the leftmost Kronecker factor.
    """
    impl = backend or _backend
    flips, masks, nys, coefs = [], [], [], []
    for c, ops in terms:
        flip = mask = ny = 0
        for site, name in ops.items():
            if not 1 <= site <= n_sites:
                raise ValueError(f"site {site} outside 1..{n_sites}")
            bit = 1 << (n_sites - site)
            if name == "X":
                flip |= bit
            elif name == "Z":
                mask |= bit
            elif name == "Y":
                flip |= bit
                mask |= bit
                ny += 1
            else:
                raise ValueError(f"unknown Pauli label {name!r}")
        flips.append(flip)
        masks.append(mask)
        nys.append(ny)
        coefs.append(c)
    return impl.pauli_sum(
        int(n_sites),
        np.array(flips, dtype=np.int64),
        np.array(masks, dtype=np.int64),
        np.array(nys, dtype=np.int_),
        np.array(coefs, dtype=np.complex128),
    )
