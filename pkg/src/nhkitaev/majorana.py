"""Majorana ladder with a resonant impurity on the dimer ``(2N, 1)``.

Basis ordering follows ``phi^dag = (-i a_1, b_1, -i a_2, b_2, ...)``: site
``l`` (1-based) contributes ``|l, A>`` at index ``2(l-1)`` and ``|l, B>`` at
``2(l-1) + 1``. ``lambda = 0`` is the periodic ladder and ``lambda = 1`` the
open one.
"""
from dataclasses import dataclass
import math

import numpy as np

from .model import ModelParams
from .numerics import eig_complex, elliptic_E


def site_index(l, sublattice, N):
    """Matrix index of ``|l, sublattice>``; ``l`` is taken modulo ``2N``."""
    l = (l - 1) % (2 * N) + 1
    return 2 * (l - 1) + (0 if sublattice == "A" else 1)


@dataclass(frozen=True)
class MajoranaLattice:
    params: ModelParams
    lam: float
    matrix: np.ndarray

    @property
    def kappa_plus(self):
        return 0.25 * (2.0 * self.params.J + self.params.pair_sum)

    @property
    def kappa_minus(self):
        return 0.25 * (2.0 * self.params.J - self.params.pair_sum)

    @property
    def dimension(self):
        return self.matrix.shape[0]


def _require_zero_mu(p):
    if p.mu != 0.0:
        raise ValueError(f"the Majorana ladder is defined at mu = 0 (got mu = {p.mu})")


def build_majorana(p, lam=0.0):
    """Assemble the ``4N x 4N`` single-particle matrix with impurity strength ``lam``."""
    _require_zero_mu(p)
    N = p.N
    L = 2 * N
    kp = 0.25 * (2.0 * p.J + p.pair_sum)
    km = 0.25 * (2.0 * p.J - p.pair_sum)
    g = p.imbalance / 8.0
    M = np.zeros((4 * N, 4 * N), dtype=np.complex128)
    A = lambda l: site_index(l, "A", N)
    B = lambda l: site_index(l, "B", N)

    # intra-sublattice unidirectional terms minus their conjugate transposes
    for j in range(1, N + 1):
        for row, col in ((A(2 * j), A(2 * j + 1)), (B(2 * j + 1), B(2 * j)),
                         (A(2 * j), A(2 * j - 1)), (B(2 * j - 1), B(2 * j))):
            M[row, col] += g
            M[col, row] -= g
    for l in range(1, L + 1):
        for row, col, v in ((B(l), A(l + 1), 0.5 * kp), (B(l + 1), A(l), 0.5 * km)):
            M[row, col] += v
            M[col, row] += v
    # impurity: remove lam times the bonds closing the ring
    for row, col, v in ((B(L), A(1), 0.5 * kp), (B(1), A(L), 0.5 * km)):
        M[row, col] -= lam * v
        M[col, row] -= lam * v
    for row, col in ((A(L), A(1)), (B(1), B(L))):
        M[row, col] -= lam * g
        M[col, row] += lam * g
    return MajoranaLattice(p, float(lam), M)


def ladder_spectrum(p):
    """Closed-form ``lambda = 0`` spectrum: four branches at each ``K = m pi / N``.

    Returns ``4N`` complex values ordered by ``m``, then by the real and
    imaginary sign branches ``(+,+), (+,-), (-,+), (-,-)``.
    """
    _require_zero_mu(p)
    K = np.arange(p.N) * math.pi / p.N
    radial = 0.25 * np.sqrt((2.0 * p.J * np.cos(K)) ** 2 + (p.pair_sum * np.sin(K)) ** 2)
    imag = 0.25 * p.imbalance * np.cos(K)
    out = np.empty((p.N, 4), dtype=np.complex128)
    for col, (sr, si) in enumerate(((1, 1), (1, -1), (-1, 1), (-1, -1))):
        out[:, col] = sr * radial + 1j * si * imag
    return out.ravel()


def half_filled_sum(values):
    """Sum of real parts of the values with negative real part.

    Values with vanishing real part come in ``+/- i`` pairs and contribute
    nothing, so they are left out symmetrically.
    """
    values = np.asarray(values)
    scale = max(1.0, float(np.abs(values).max(initial=0.0)))
    neg = values.real < -1e-12 * scale
    return float(values.real[neg].sum())


@dataclass(frozen=True)
class LadderEnergy:
    closed_form: float
    numeric: float
    eccentricity: float

    @property
    def relative_error(self):
        return abs(self.numeric - self.closed_form) / abs(self.closed_form)


def ladder_ground_energy(p, method="closed"):
    """Half-filled ladder energy: elliptic closed form and the numeric sum.

    Parameters
    ----------
    method : {"closed", "eig"}
        Source of the branch values for the numeric sum: the closed-form
        ``ladder_spectrum`` or an eigensolve of ``build_majorana(p, 0)``.
    """
    _require_zero_mu(p)
    a, b = abs(2.0 * p.J), abs(p.pair_sum)
    big, small = max(a, b), min(a, b)
    ecc = math.sqrt(max(0.0, 1.0 - (small / big) ** 2)) if big > 0 else 0.0
    closed = -(p.N / math.pi) * big * elliptic_E(ecc)
    if method == "closed":
        values = ladder_spectrum(p)
    elif method == "eig":
        values = eig_complex(build_majorana(p, 0.0).matrix, left=False).values
    else:
        raise ValueError(f"unknown method {method!r}")
    return LadderEnergy(closed, half_filled_sum(values), ecc)


@dataclass(frozen=True)
class ResonanceData:
    """Decay factor ``gamma``, mixing ``beta`` and the resonant strengths.

    ``lambda_plus = 1 - gamma**-N`` and ``lambda_minus = 1 - gamma**N``.
    """

    gamma: float
    beta: float
    lambda_plus: float
    lambda_minus: float


def _signed_power(x, n):
    """``x**n`` via logs so huge/tiny magnitudes saturate instead of raising."""
    if x == 0.0:
        if n > 0:
            return 0.0
        raise ZeroDivisionError("gamma = 0 has no negative powers")
    mag = n * math.log(abs(x))
    sign = -1.0 if (x < 0 and n % 2) else 1.0
    if mag > 709.0:
        return sign * math.inf
    return sign * math.exp(mag)


def resonance(p):
    """Resonance data of the impurity problem.

    Raises
    ------
    ValueError
        When ``J**2 == delta_a * delta_b`` (singular ``gamma``).
    """
    _require_zero_mu(p)
    J, da, db = p.J, p.delta_a, p.delta_b
    den = 2.0 * (J * J - da * db)
    if abs(den) < 1e-14:
        raise ValueError("gamma is singular at J**2 == delta_a * delta_b")
    gamma = (abs(da + db) * math.sqrt((da - db) ** 2 + 4 * J * J)
             - 2 * J * J - da * da - db * db) / den
    if da == db:
        beta = 0.0
    else:
        beta = (math.sqrt(4 * J * J + (db - da) ** 2) - 2 * J) / (db - da)
    lam_minus = 1.0 - _signed_power(gamma, p.N)
    lam_plus = 1.0 - _signed_power(gamma, -p.N) if gamma != 0.0 else -math.inf
    return ResonanceData(gamma, beta, lam_plus, lam_minus)


@dataclass(frozen=True)
class ZeroModePair:
    psi_L: np.ndarray
    psi_R: np.ndarray
    branch: str
    lam: float


def _geometric(gamma, exponents):
    """``gamma**e`` for integer exponents, divided by the largest magnitude."""
    exponents = np.asarray(exponents)
    if gamma == 0.0:
        out = (exponents == 0).astype(float)
        if not out.any():
            raise ValueError("gamma = 0 leaves the zero mode empty")
        return out
    logmag = exponents * math.log(abs(gamma))
    mags = np.exp(logmag - logmag.max())
    signs = np.where((gamma < 0) & (exponents % 2 == 1), -1.0, 1.0)
    return signs * mags


def zero_modes(p, branch):
    """Closed-form zero modes at ``lambda = lambda_plus`` or ``lambda_minus``.

    Parameters
    ----------
    branch : {"minus", "plus"}

    Notes
    -----
    Each mode occupies one cell per dimer, ``j = 1..N``, with amplitude
    ratio ``gamma`` between neighbouring dimers. Vectors are scaled so the
    largest geometric factor is one.
    """
    if branch not in ("minus", "plus"):
        raise ValueError(f"branch must be 'minus' or 'plus', got {branch!r}")
    res = resonance(p)
    N = p.N
    g, b = res.gamma, res.beta
    j = np.arange(1, N + 1)
    left = _geometric(g, j - 1)
    right = _geometric(g, N - j)
    psi_L = np.zeros(4 * N, dtype=np.complex128)
    psi_R = np.zeros(4 * N, dtype=np.complex128)
    odd, even = 2 * j - 1, 2 * j
    iA = lambda l: 2 * (l - 1)
    iB = lambda l: 2 * (l - 1) + 1
    if branch == "minus":
        psi_L[iA(odd)] = left
        psi_L[iB(odd)] = b * left
        psi_R[iB(even)] = right
        psi_R[iA(even)] = b * right
        lam = res.lambda_minus
    else:
        psi_R[iB(odd)] = right
        psi_R[iA(odd)] = -b * right
        psi_L[iA(even)] = left
        psi_L[iB(even)] = -b * left
        lam = res.lambda_plus
    return ZeroModePair(psi_L, psi_R, branch, lam)


def zero_mode_residuals(p, branch):
    """Relative residuals ``||h_D psi|| / ||psi||`` at the resonant ``lambda``."""
    pair = zero_modes(p, branch)
    h = build_majorana(p, pair.lam).matrix
    return {
        "L": float(np.linalg.norm(h @ pair.psi_L) / np.linalg.norm(pair.psi_L)),
        "R": float(np.linalg.norm(h @ pair.psi_R) / np.linalg.norm(pair.psi_R)),
    }


def edge_state(pair):
    """``psi_R / (sqrt2 |psi_R|) + psi_L / (sqrt2 |psi_L|)``."""
    nL = np.linalg.norm(pair.psi_L)
    nR = np.linalg.norm(pair.psi_R)
    if nL == 0 or nR == 0:
        raise ValueError("zero modes must have nonzero norm")
    return pair.psi_R / (math.sqrt(2.0) * nR) + pair.psi_L / (math.sqrt(2.0) * nL)


def profile_rows(vector):
    """Per-site table rows ``(site, sublattice, re, im, abs)`` for a ``4N`` vector."""
    vector = np.asarray(vector)
    rows = []
    for idx, amp in enumerate(vector):
        rows.append((idx // 2 + 1, "A" if idx % 2 == 0 else "B",
                     float(amp.real), float(amp.imag), float(abs(amp))))
    return rows


def cell_decay_slope(psi, sublattice_offset, parity):
    """Least-squares slope of ``log|psi|`` per dimer on one sublattice.

    ``parity`` selects odd (1) or even (0) sites; ``sublattice_offset`` is 0
    for A and 1 for B.
    """
    psi = np.asarray(psi)
    n_sites = psi.size // 2
    sites = np.arange(1, n_sites + 1)
    sites = sites[sites % 2 == parity]
    amps = np.abs(psi[2 * (sites - 1) + sublattice_offset])
    keep = amps > 0
    cells = (sites[keep] + 1) // 2
    slope, _ = np.polyfit(cells, np.log(amps[keep]), 1)
    return float(slope)
