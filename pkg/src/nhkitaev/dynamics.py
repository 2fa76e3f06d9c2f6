"""Non-unitary fidelity dynamics in the block-diagonal representation.

The state is kept as one vector per momentum block (the two 4-dim boundary
blocks and one 16-dim block per pair ``(k, -k)``). Blocks evolve
independently, so the fidelity is a product of block factors. Each block
vector is renormalized as it evolves and its log-norm is tracked
separately, which keeps exponential growth from overflowing.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from . import model, spectral
from .numerics import expm

NORMALIZED = "normalized"
RAW = "raw"
# relative size below which a modal amplitude of the initial state is roundoff
ROUNDOFF_FLOOR = 1e-13
# log of the largest finite double, used to decide when the raw value overflows
_LOG_MAX = math.log(np.finfo(float).max)


@dataclass(frozen=True)
class FidelitySeries:
    """Fidelity on a time grid.

    ``values`` follows ``normalization_policy``. ``log_raw`` is always the
    natural log of the unnormalized ``|<Phi(0)|Phi(t)>|**2``; ``raw`` is its
    exponential and turns infinite from ``overflow_time`` on.
    """

    times: np.ndarray
    values: np.ndarray
    normalization_policy: str
    raw: np.ndarray
    log_raw: np.ndarray
    overflow_time: Optional[float] = None
    convergence_estimate: Optional[float] = None
    converged: Optional[bool] = None


@dataclass(frozen=True)
class DriveSpec:
    """Time-dependent pair strengths sampled on ``[0, T]`` with step ``dt``."""

    delta_a_of_t: Callable[[float], float]
    delta_b_of_t: Callable[[float], float]
    zeta: float = 0.0
    dt: float = 1e-3
    T: float = 2.0

    def __post_init__(self):
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.T >= 0 and math.isfinite(self.T)):
            raise ValueError(f"T must be non-negative, got {self.T}")

    @property
    def steps(self):
        return int(round(self.T / self.dt))


def sine_drive(zeta=0.0, dt=1e-3, T=2.0):
    """``delta_a = 1 + sin(t**2)``, ``delta_b = 1 - sin(t**2 + zeta)``.

    The pair sum ``delta_a + delta_b`` stays at 2 only for ``zeta = 0``.
    """
    return DriveSpec(lambda t: 1.0 + math.sin(t * t),
                     lambda t: 1.0 - math.sin(t * t + zeta),
                     zeta=float(zeta), dt=dt, T=T)


def drive_params(base, drive, t):
    """``base`` with the pair strengths replaced by the drive values at ``t``."""
    return base.with_(delta_a=float(drive.delta_a_of_t(t)),
                      delta_b=float(drive.delta_b_of_t(t)))


@dataclass(frozen=True)
class _Block:
    name: object
    terms: tuple   # coefficient matrices for (J, delta_a, delta_b, mu)
    initial: np.ndarray

    def hamiltonian(self, p):
        J, a, b, m = p.J, p.delta_a, p.delta_b, p.mu
        return J * self.terms[0] + a * self.terms[1] + b * self.terms[2] + m * self.terms[3]


def _blocks(pre):
    """Block list in fixed order: k = 0, k = pi, then the pairs by increasing k."""
    gs = spectral.ground_state(pre)
    H0t, Hpit = model.boundary_block_terms()
    blocks = [_Block("zero", H0t, gs.zero_factor.amplitudes),
              _Block("pi", Hpit, gs.pi_factor.amplitudes)]
    for k, vec in gs.pair_vectors.items():
        blocks.append(_Block(k, model.pair_block_terms(k), vec.amplitudes))
    return blocks


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("times must be a non-empty 1-d grid")
    if not np.all(np.isfinite(times)) or np.any(times < 0):
        raise ValueError("times must be finite and non-negative")
    return times


def _finish(times, log_overlap, log_norm, policy, **extra):
    """Turn summed block logs into a :class:`FidelitySeries`.

    ``log_overlap`` is ``sum_b log|<phi_b(0)|phi_b(t)>|`` and ``log_norm``
    is ``sum_b log||phi_b(t)||``.
    """
    if policy not in (NORMALIZED, RAW):
        raise ValueError(f"normalization policy must be {NORMALIZED!r} or {RAW!r}")
    # the initial state is normalized, so t = 0 is exactly 1 under both policies
    at_start = times == 0.0
    log_overlap = np.where(at_start, 0.0, log_overlap)
    log_norm = np.where(at_start, 0.0, log_norm)
    log_raw = 2.0 * log_overlap
    log_norm_f = 2.0 * (log_overlap - log_norm)
    with np.errstate(over="ignore", under="ignore"):
        raw = np.exp(log_raw)
        normalized = np.exp(log_norm_f)
    over = np.flatnonzero(log_raw > _LOG_MAX)
    overflow_time = float(times[over[0]]) if over.size else None
    values = normalized if policy == NORMALIZED else raw
    return FidelitySeries(times, values, policy, raw, log_raw, overflow_time, **extra)


def _safe_log_abs(z):
    with np.errstate(divide="ignore"):
        return np.log(np.abs(z))


def _evolve_static_block(H, phi0, times):
    """``(log|<phi0|phi(t)>|, log||phi(t)||)`` for ``phi(t) = exp(-iHt) phi0``.

    Uses the eigendecomposition with every time scaled by its dominant
    term; falls back to exact matrix exponentials when ``H`` is close to
    defective.

    Modal amplitudes below ``ROUNDOFF_FLOOR * cond(V)`` relative to the
    largest are dropped. They are rounding noise of the initial vector,
    and growing modes would otherwise amplify them without bound (an exact
    eigenstate would stop being stationary).
    """
    w, V = np.linalg.eig(H)
    sv = np.linalg.svd(V, compute_uv=False)
    if sv[-1] > 0 and sv[0] / sv[-1] < 1e8:
        c = np.linalg.solve(V, phi0)
        mag = np.abs(c)
        keep = mag > ROUNDOFF_FLOOR * (sv[0] / sv[-1]) * mag.max()
        w, V, c = w[keep], V[:, keep], c[keep]
        # log of each modal amplitude at each time: log|c| + Im(w) t
        logmag = np.log(np.abs(c))[None, :] + np.outer(times, w.imag)
        shift = logmag.max(axis=1)
        phase = np.angle(c)[None, :] - np.outer(times, w.real)
        coeff = np.exp(logmag - shift[:, None] + 1j * phase)
        psi = coeff @ V.T
        log_norm = np.log(np.linalg.norm(psi, axis=1)) + shift
        log_ov = _safe_log_abs(psi @ phi0.conj()) + shift
        return log_ov, log_norm
    log_ov = np.empty(times.size)
    log_norm = np.empty(times.size)
    for i, t in enumerate(times):
        psi = expm(-1j * H * t) @ phi0
        n = np.linalg.norm(psi)
        log_norm[i] = math.log(n)
        log_ov[i] = _safe_log_abs(np.vdot(phi0, psi / n)) + math.log(n)
    return log_ov, log_norm


def evolve_quench(pre, pos, times, policy=NORMALIZED):
    """Fidelity after a sudden quench from the ground state of ``pre`` to ``pos``.

    Parameters
    ----------
    pre : ModelParams
        Pre-quench parameters; must have ``mu == 0``.
    pos : ModelParams
        Post-quench parameters (any ``mu``), same ``N``.
    times : array_like
        Non-negative time grid.
    policy : {"normalized", "raw"}
        ``values`` of the result; the other form is available as ``raw``.
    """
    if pre.N != pos.N:
        raise ValueError(f"pre.N = {pre.N} and pos.N = {pos.N} differ")
    times = _check_times(times)
    log_ov = np.zeros(times.size)
    log_norm = np.zeros(times.size)
    for block in _blocks(pre):
        ov, nm = _evolve_static_block(block.hamiltonian(pos), block.initial, times)
        log_ov += ov
        log_norm += nm
    return _finish(times, log_ov, log_norm, policy)


def evolve_quench_fock(pre, pos, times, policy=NORMALIZED):
    """Brute-force quench fidelity on the full real-space Fock space.

    The initial state is the eigenvector of ``fock_hamiltonian(pre)`` with
    the lowest real eigenvalue, which must be non-degenerate. Intended as
    an oracle for :func:`evolve_quench` at small ``N``.
    """
    if pre.N != pos.N:
        raise ValueError(f"pre.N = {pre.N} and pos.N = {pos.N} differ")
    times = _check_times(times)
    w, V = scipy.linalg.eig(model.fock_hamiltonian(pre))
    order = np.argsort(w.real)
    if abs(w[order[1]] - w[order[0]]) < 1e-8:
        raise ValueError("the real-space ground state is degenerate")
    phi0 = V[:, order[0]] / np.linalg.norm(V[:, order[0]])
    H = model.fock_hamiltonian(pos)
    log_ov = np.empty(times.size)
    log_norm = np.empty(times.size)
    for i, t in enumerate(times):
        psi = scipy.linalg.expm(-1j * t * H) @ phi0
        n = np.linalg.norm(psi)
        log_norm[i] = math.log(n)
        log_ov[i] = _safe_log_abs(np.vdot(phi0, psi))
    return _finish(times, log_ov, log_norm, policy)


def _driven_logs(pre, drive, dt, steps, stride):
    """Midpoint stepping; returns logs at every ``stride``-th step (step 0 included)."""
    if pre.mu != 0.0:
        raise ValueError(f"driven evolution requires mu = 0 (got {pre.mu})")
    blocks = _blocks(pre)
    phis = [b.initial.copy() for b in blocks]
    log_norms = np.zeros(len(blocks))
    n_out = steps // stride + 1
    log_ov = np.zeros(n_out)
    log_norm = np.zeros(n_out)
    for n in range(1, steps + 1):
        p = drive_params(pre, drive, (n - 0.5) * dt)
        for i, b in enumerate(blocks):
            # tiny-norm steps: Pade scaling and squaring needs no eigensolve
            psi = scipy.linalg.expm(-1j * dt * b.hamiltonian(p)) @ phis[i]
            nrm = np.linalg.norm(psi)
            phis[i] = psi / nrm
            log_norms[i] += math.log(nrm)
        if n % stride == 0:
            j = n // stride
            log_norm[j] = log_norms.sum()
            log_ov[j] = sum(_safe_log_abs(np.vdot(b.initial, phi)) for b, phi in zip(blocks, phis)) \
                + log_norm[j]
    return log_ov, log_norm


def evolve_driven(pre, drive, policy=NORMALIZED, check_convergence=True, tol=1e-8):
    """Fidelity under a time-dependent drive of the pair strengths.

    The time-ordered propagator is approximated by the product of
    ``expm(-i H((n + 1/2) dt) dt)`` over steps. The initial state is the
    ground state of ``pre``, whose ``J``, ``mu`` and ``N`` are kept
    throughout.

    With ``check_convergence`` the run is repeated at ``dt/2`` and the
    largest difference on the common grid is stored as
    ``convergence_estimate``; ``converged`` is False when it exceeds ``tol``.
    """
    dt, steps = drive.dt, drive.steps
    times = np.arange(steps + 1) * dt
    log_ov, log_norm = _driven_logs(pre, drive, dt, steps, 1)
    series = _finish(times, log_ov, log_norm, policy)
    if not check_convergence:
        return series
    fine_ov, fine_norm = _driven_logs(pre, drive, dt / 2, 2 * steps, 2)
    fine = _finish(times, fine_ov, fine_norm, policy)
    with np.errstate(invalid="ignore"):
        est = float(np.max(np.abs(series.values - fine.values)))
    converged = bool(np.isfinite(est) and est <= tol)
    return FidelitySeries(series.times, series.values, policy, series.raw, series.log_raw,
                          series.overflow_time, est, converged)


def detect_drop(series, threshold=0.5):
    """First time the fidelity falls below ``threshold``, linearly interpolated.

    Returns None when the series never crosses.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    times = np.asarray(series.times, dtype=float)
    values = np.asarray(series.values, dtype=float)
    if values.size == 0:
        raise ValueError("empty series")
    below = np.flatnonzero(values < threshold)
    if below.size == 0:
        return None
    i = int(below[0])
    if i == 0:
        return float(times[0])
    t0, t1, f0, f1 = times[i - 1], times[i], values[i - 1], values[i]
    return float(t0 + (f0 - threshold) / (f0 - f1) * (t1 - t0))


@dataclass(frozen=True)
class ScanResult:
    """Fidelity over ``times x params``; ``values[i, j]`` is at ``times[i]``, ``params[j]``.

    ``failures`` maps a column index to the error that aborted that column,
    whose cells are NaN.
    """

    times: np.ndarray
    params: np.ndarray
    values: np.ndarray
    drop_times: list
    threshold: float
    failures: dict = field(default_factory=dict)


def mu_family(J, delta_a, delta_b, N):
    """Quench families over ``mu``: ground state at ``mu = 0``, evolve at ``mu``."""
    base = model.ModelParams(J=J, delta_a=delta_a, delta_b=delta_b, mu=0.0, N=N)
    return (lambda mu: base), (lambda mu: base.with_(mu=float(mu)))


def ratio_family(J, pair_sum, mu, N):
    """Quench families over ``delta_a / delta_b`` at fixed ``delta_a + delta_b``."""
    def pre(r):
        db = pair_sum / (1.0 + r)
        return model.ModelParams(J=J, delta_a=pair_sum - db, delta_b=db, mu=0.0, N=N)
    return pre, (lambda r: pre(r).with_(mu=float(mu)))


def scan_quench(pre_family, pos_family, time_grid, param_grid, threshold=0.5,
                workers=None, policy=NORMALIZED):
    """Quench fidelity for every parameter in ``param_grid``.

    Columns are independent; with ``workers > 1`` they run on a thread pool
    and are stored by index, so the result does not depend on scheduling.
    A column that raises is filled with NaN and recorded in ``failures``.
    """
    times = _check_times(time_grid)
    params = np.asarray(param_grid, dtype=float)
    values = np.full((times.size, params.size), np.nan)
    drops = [None] * params.size
    failures = {}

    def column(j):
        x = float(params[j])
        return evolve_quench(pre_family(x), pos_family(x), times, policy)

    def run(j):
        try:
            return j, column(j), None
        except (ValueError, OverflowError, ArithmeticError, np.linalg.LinAlgError) as exc:
            return j, None, f"{type(exc).__name__}: {exc}"

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(params.size)))
    else:
        results = [run(j) for j in range(params.size)]
    for j, series, err in results:
        if err is not None:
            failures[j] = err
            continue
        values[:, j] = series.values
        drops[j] = detect_drop(series, threshold)
    return ScanResult(times, params, values, drops, threshold, failures)
