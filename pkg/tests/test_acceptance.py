"""Acceptance criteria 1-13, one test each (criterion 5 per drive phase).

Each test records a one-line verdict; the lines are printed at the end of
the pytest run and also when this file is executed directly.
"""
import math

import numpy as np
import pytest

from conftest import multiset_distance
from nhkitaev import dynamics, majorana, model, spectral, spin
from nhkitaev.model import ModelParams
from nhkitaev.numerics import eig_complex

RESULTS = {}


def record(key, passed, detail):
    RESULTS[key] = (bool(passed), detail)
    assert passed, detail


def parity_blocks(H):
    """Split a parity-conserving Fock matrix into its even and odd blocks."""
    counts = np.array([bin(s).count("1") for s in range(H.shape[0])])
    for parity in (0, 1):
        idx = np.flatnonzero(counts % 2 == parity)
        off = np.flatnonzero(counts % 2 != parity)
        assert not np.any(H[np.ix_(idx, off)])
        yield H[np.ix_(idx, idx)]


def fock_minimum(p):
    return min(np.linalg.eigvals(block).real.min() for block in parity_blocks(model.fock_hamiltonian(p)))


SWEEP = (0.0, 0.5, 1.0, 2.0)


def test_criterion_01_fixed_line_energy():
    energies = [spectral.ground_energy(ModelParams(J=1.0, N=8).with_imbalance(d)) for d in SWEEP]
    spread = max(energies) - min(energies)
    err = max(abs(e + 16.0) for e in energies)
    oracle = 0.0
    for N, imbalances in ((2, SWEEP), (4, SWEEP), (6, (1.0,))):
        for d in imbalances:
            p = ModelParams(J=1.0, N=N).with_imbalance(d)
            oracle = max(oracle, abs(fock_minimum(p) - spectral.ground_energy(p)))
    record(1, spread <= 1e-12 and err <= 1e-12 and oracle <= 1e-9,
           f"spread {spread:.1e}, |E+16| {err:.1e}, Fock oracle (N<=6) {oracle:.1e}")


def test_criterion_02_fixed_line_state():
    ref = spectral.ground_state(ModelParams(J=1.0, N=8))
    worst = 0.0
    for d in SWEEP:
        other = spectral.ground_state(ModelParams(J=1.0, N=8).with_imbalance(d))
        worst = max(worst, max(abs(o - 1.0) for o in spectral.block_overlaps(ref, other).values()))
    record(2, worst <= 1e-10, f"max per-block |1 - |<G|G'>|| = {worst:.1e}")


def test_criterion_03_spectrum_transcription():
    worst = 0.0
    for p in (ModelParams(J=1.0, delta_a=1.5, delta_b=0.5, N=64),
              ModelParams(J=0.7, delta_a=2.3, delta_b=-0.6, N=64)):
        for k in model.momentum_grid(64).pairs:
            closed = [spectral.quasiparticle_energy(p, k, b) for b in spectral.BANDS]
            worst = max(worst, multiset_distance(closed, eig_complex(model.core_matrix(p, k)).values))
    record(3, worst <= 1e-10, f"max multiset mismatch on the N=64 grid {worst:.1e}")


def test_criterion_04_canonical_algebra():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(20):
        p = ModelParams(J=rng.uniform(0.2, 2.0), delta_a=rng.uniform(-2.5, 2.5),
                        delta_b=rng.uniform(-2.5, 2.5))
        k = rng.uniform(0.05, math.pi - 0.05)
        worst = max(worst, spectral.canonical_deviation(spectral.mode_basis(p, k)))
    record(4, worst <= 1e-12, f"max anticommutator deviation over 20 points {worst:.1e}")


@pytest.mark.slow
@pytest.mark.parametrize("zeta", [0.0, 0.5, 1.0])
def test_criterion_05_driven_fidelity(zeta):
    drive = dynamics.sine_drive(zeta, dt=1e-3, T=2.0)
    pre = dynamics.drive_params(ModelParams(J=1.0, N=8), drive, 0.0)
    s = dynamics.evolve_driven(pre, drive, tol=1e-8)
    dev = float(np.abs(s.values - 1.0).max())
    record(f"5 (zeta={zeta:g})", dev <= 1e-6 and s.convergence_estimate <= 1e-8,
           f"max |F-1| {dev:.1e}, step-halving {s.convergence_estimate:.1e}")


def test_criterion_06_zero_modes():
    worst = 0.0
    for J, da, db in ((1.0, 2.0, 0.0), (1.0, 1.5, 0.5), (1.0, 0.5, 0.5)):
        for N in (4, 8, 16):
            for branch in ("minus", "plus"):
                res = majorana.zero_mode_residuals(ModelParams(J=J, delta_a=da, delta_b=db, N=N), branch)
                worst = max(worst, *res.values())
    lam = majorana.resonance(ModelParams(J=1.0, delta_a=2.0, delta_b=0.0, N=4)).lambda_minus
    record(6, worst <= 1e-10 and abs(lam - 0.9991334) <= 1e-6,
           f"max residual {worst:.1e}, lambda_minus(N=4) = {lam:.7f}")


def test_criterion_07_skin_profile():
    worst = 0.0
    for J, da, db in ((1.0, 2.0, 0.0), (1.0, 1.5, 0.5), (1.0, 0.5, 0.5)):
        p = ModelParams(J=J, delta_a=da, delta_b=db, N=8)
        psi = majorana.zero_modes(p, "minus").psi_L
        slope = majorana.cell_decay_slope(psi, 0, 1)
        worst = max(worst, abs(slope - math.log(abs(majorana.resonance(p).gamma))))
    record(7, worst <= 1e-6, f"max |slope - log|gamma|| {worst:.1e}")


def test_criterion_08_ladder_energy():
    errs = {N: majorana.ladder_ground_energy(ModelParams(J=1.0, delta_a=3.0, delta_b=1.0, N=N)).relative_error
            for N in (2, 4, 512)}
    improving = errs[2] > errs[4] >= errs[512] or errs[4] <= 1e-13
    flat = majorana.ladder_ground_energy(ModelParams(J=1.0, delta_a=1.3, delta_b=0.7, N=512))
    exact = abs(flat.closed_form + 512) <= 1e-9 and abs(flat.numeric + 512) <= 1e-9
    record(8, errs[512] <= 1e-3 and improving and exact,
           f"rel. error N=2/4/512: {errs[2]:.1e}/{errs[4]:.1e}/{errs[512]:.1e}; flat band "
           f"{flat.numeric:.12g}")


def test_criterion_09_spin_fermion():
    worst = 0.0
    for d in (0.0, 1.0):
        p = ModelParams(J=1.0, N=4).with_imbalance(d)
        worst = max(worst, multiset_distance(np.linalg.eigvals(spin.spin_hamiltonian(p).matrix),
                                             np.linalg.eigvals(model.fock_hamiltonian(p))))
    record(9, worst <= 1e-9, f"max spectral mismatch at 2N=8 {worst:.1e}")


def test_criterion_10_ghz_suite():
    failed = [(L, c.name) for L in (4, 6, 8) for c in spin.ghz_report(L, imbalances=(0.5, 1.0, 2.0))
              if not c.passed]
    worst = max(c.residual for L in (4, 6, 8) for c in spin.ghz_report(L))
    record(10, not failed, f"{'all identities hold' if not failed else failed}, max residual {worst:.1e}")


def test_criterion_11_quench_oracle():
    pre = ModelParams(J=1.0, delta_a=1.5, delta_b=0.5, N=2)
    pos = pre.with_(mu=0.05)
    times = np.linspace(0.0, 10.0, 201)
    diff = float(np.abs(dynamics.evolve_quench(pre, pos, times).values
                        - dynamics.evolve_quench_fock(pre, pos, times).values).max())
    record(11, diff <= 1e-9, f"max |F_blocks - F_Fock| {diff:.1e}")


def test_criterion_12_drop_phenomenology():
    times = np.linspace(0.0, 20.0, 2001)
    pre = ModelParams(J=1.0, delta_a=2.4, delta_b=0.6, N=8)
    shapes = []
    for mu in (0.001, 0.01):
        f = dynamics.evolve_quench(pre, pre.with_(mu=mu), times).values
        drop = dynamics.detect_drop(dynamics.FidelitySeries(times, f, "normalized", f, np.log(f)))
        plateau_end = times[np.argmax(f < 0.99)]
        low = np.flatnonzero(f >= 0.01)
        settled = low[-1] + 1 < times.size
        shapes.append(bool(drop is not None and plateau_end >= 0.5 * drop and settled))
    res_mu = dynamics.scan_quench(*dynamics.mu_family(1.0, 2.4, 0.6, 8), times, [0.001, 0.01])
    res_ratio = dynamics.scan_quench(*dynamics.ratio_family(1.0, 3.0, 0.01, 8), times, [1.5, 2.0, 3.0, 4.0])
    dm, dr = res_mu.drop_times, res_ratio.drop_times
    mu_ok = None not in dm and dm[1] < dm[0]
    ratio_ok = None not in dr and all(a > b for a, b in zip(dr, dr[1:]))
    record(12, all(shapes) and mu_ok and ratio_ok,
           f"plateau/decay {shapes}, drop(mu=0.001,0.01) = {dm[0]:.3f}, {dm[1]:.3f}; "
           f"drop(ratio 1.5..4) = {', '.join(f'{d:.3f}' for d in dr)}")


def test_criterion_13_heisenberg_ring():
    checks = spin.heisenberg_ring_check(6)
    ann = max(c.residual for c in checks if "annihilates" in c.name)
    record(13, ann <= 1e-14 and all(c.passed for c in checks), f"annihilation residual {ann:.1e}")


def summary_lines():
    def order(key):
        head = str(key).split()[0]
        return (int(head), str(key))
    return [f"CRITERION {key}: {'PASS' if ok else 'FAIL'} - {detail}"
            for key, (ok, detail) in sorted(RESULTS.items(), key=lambda kv: order(kv[0]))]


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
