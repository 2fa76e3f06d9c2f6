"""Small dense complex linear algebra and special functions.

Matrices are plain ``numpy`` complex128 arrays throughout the package.
"""
from dataclasses import dataclass
import math

import numpy as np
import scipy.linalg

MAX_DIM = 4096
#: Largest 1-norm accepted by :func:`expm`; beyond it e^M can overflow.
EXPM_MAX_NORM = 1.0e4
DEFECTIVE_TOL = 1e-8
#: Eigenvector-matrix condition number above which :func:`expm` switches to Pade.
EXPM_EIG_COND = 1.0e3


def as_matrix(M, name="M"):
    """Validate and convert to a square finite complex128 array."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    if M.shape[0] > MAX_DIM:
        raise ValueError(f"{name} dimension {M.shape[0]} exceeds {MAX_DIM}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


@dataclass(frozen=True)
class EigenDecomposition:
    """Two-sided eigensystem of a square matrix.

    ``right[:, i]`` and ``left[:, i]`` belong to ``values[i]``. When the
    matrix is not defective, ``left[:, i].conj() @ right[:, j] == delta_ij``.
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    defective: bool


def sort_order(values):
    """Indices sorting complex values by (real, imag) ascending."""
    values = np.asarray(values)
    return np.lexsort((values.imag, values.real))


def eig_complex(M, left=True):
    """Eigenvalues with right and (biorthonormal) left eigenvectors.

    Values are sorted by real part, then imaginary part. Right vectors have
    unit norm. A matrix is flagged defective when the column-normalized
    eigenvector matrix has smallest singular value below ``1e-8``; in that
    case the left vectors are the raw unit-norm LAPACK ones.
    """
    M = as_matrix(M)
    n = M.shape[0]
    if n == 0:
        empty = np.zeros((0, 0), dtype=np.complex128)
        return EigenDecomposition(np.zeros(0, np.complex128), empty, empty, False)
    if left:
        w, vl, vr = scipy.linalg.eig(M, left=True, right=True)
    else:
        w, vr = scipy.linalg.eig(M, right=True)
        vl = None
    order = sort_order(w)
    w = w[order]
    vr = vr[:, order]
    vr = vr / np.linalg.norm(vr, axis=0)
    smin = np.linalg.svd(vr, compute_uv=False)[-1]
    defective = bool(smin < DEFECTIVE_TOL)
    if not left:
        lv = np.zeros_like(vr)
    elif defective:
        lv = vl[:, order]
        lv = lv / np.linalg.norm(lv, axis=0)
    else:
        lv = np.linalg.inv(vr).conj().T
    return EigenDecomposition(w, vr, lv, defective)


# Pade(13) coefficients for scaling and squaring (Higham 2005).
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0,
    670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
    960960.0, 16380.0, 182.0, 1.0,
)
_THETA13 = 5.371920351148152


def expm_pade(M):
    """Matrix exponential by Pade(13) scaling and squaring."""
    M = as_matrix(M)
    n = M.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    norm = np.linalg.norm(M, 1)
    s = max(0, int(math.ceil(math.log2(norm / _THETA13)))) if norm > 0 else 0
    A = M / (2.0 ** s)
    b = _PADE13
    A2 = A @ A
    A4 = A2 @ A2
    A6 = A4 @ A2
    U = A @ (A6 @ (b[13] * A6 + b[11] * A4 + b[9] * A2)
             + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * ident)
    V = (A6 @ (b[12] * A6 + b[10] * A4 + b[8] * A2)
         + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * ident)
    X = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        X = X @ X
    return X


def expm(M):
    """Matrix exponential of a small dense complex matrix.

    Uses the eigendecomposition when the eigenvector matrix is well
    conditioned and falls back to Pade scaling and squaring otherwise
    (defective or nearly defective input, e.g. at exceptional points).

    Raises
    ------
    ValueError
        Non-square or non-finite input.
    OverflowError
        ``||M||_1 > EXPM_MAX_NORM`` or a non-finite result.
    """
    M = as_matrix(M)
    if M.shape[0] == 0:
        return M.copy()
    norm = np.linalg.norm(M, 1)
    if norm > EXPM_MAX_NORM:
        raise OverflowError(f"||M||_1 = {norm:.3g} exceeds {EXPM_MAX_NORM:g}")
    if norm == 0.0:
        return np.eye(M.shape[0], dtype=np.complex128)
    w, V = np.linalg.eig(M)
    sv = np.linalg.svd(V, compute_uv=False)
    if sv[-1] > 0 and sv[0] / sv[-1] <= EXPM_EIG_COND:
        with np.errstate(over="ignore", invalid="ignore"):
            out = (V * np.exp(w)) @ np.linalg.inv(V)
    else:
        with np.errstate(over="ignore", invalid="ignore"):
            out = expm_pade(M)
    if not np.all(np.isfinite(out)):
        raise OverflowError("matrix exponential overflowed")
    return out


def elliptic_E(modulus):
    """Complete elliptic integral of the second kind, E(k).

    ``E(k) = int_0^{pi/2} sqrt(1 - k^2 sin^2 t) dt`` with *modulus* ``k``
    (not the parameter ``m = k^2``), evaluated by the arithmetic-geometric
    mean.
    """
    k = float(modulus)
    if not 0.0 <= k <= 1.0 or math.isnan(k):
        raise ValueError(f"modulus must lie in [0, 1], got {modulus!r}")
    if k == 1.0:
        return 1.0
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    c = k
    total = 0.5 * c * c
    power = 0.5
    # quadratic convergence; the cap guards against c stalling at one ulp
    for _ in range(64):
        if abs(c) <= 1e-16 * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        power *= 2.0
        total += power * c * c
    return math.pi / (2.0 * a) * (1.0 - total)
