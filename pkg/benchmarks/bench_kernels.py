"""Compare the Cython and numpy kernels on many-body operator assembly.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import time

import numpy as np

from nhkitaev import _kernels_py, kernels
from nhkitaev.model import ModelParams, fock_hamiltonian
from nhkitaev.spin import calH_terms, h0_terms

try:
    from nhkitaev import _kernels as _kernels_cy
except ImportError:
    _kernels_cy = None


def chain_terms(p):
    """Ladder-operator terms of the periodic chain (same as the Fock oracle)."""
    L = p.sites
    terms = []
    for l in range(L):
        r = (l + 1) % L
        terms += [(p.J, (l, True), (r, False)), (p.J, (r, True), (l, False))]
    for j in range(p.N):
        a, b, c = 2 * j, 2 * j + 1, (2 * j + 2) % L
        terms += [(p.delta_a, (b, True), (c, True)), (p.delta_b, (c, False), (b, False)),
                  (p.delta_a, (b, False), (a, False)), (p.delta_b, (a, True), (b, True))]
    return terms


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels_cy is None:
        print("Cython extension not built; only the numpy fallback is available")
    p = ModelParams(J=1.0, delta_a=1.5, delta_b=0.5, N=6)
    cases = [
        ("fock H, 12 sites", lambda b: kernels.quadratic_form(p.sites, chain_terms(p), backend=b)),
        ("spin H0, 12 sites", lambda b: kernels.pauli_sum(12, h0_terms(12), backend=b)),
        ("spin calH, 12 sites", lambda b: kernels.pauli_sum(12, calH_terms(12), backend=b)),
    ]
    ref = fock_hamiltonian(p)
    print(f"{'case':<22}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, fn in cases:
        t_py, out_py = best_of(lambda: fn(_kernels_py), args.repeat)
        if name.startswith("fock"):
            assert np.array_equal(out_py, ref)
        if _kernels_cy is None:
            print(f"{name:<22}{1e3 * t_py:>14.2f}{'-':>14}{'-':>10}")
            continue
        t_cy, out_cy = best_of(lambda: fn(_kernels_cy), args.repeat)
        assert np.array_equal(out_py, out_cy), name
        print(f"{name:<22}{1e3 * t_py:>14.2f}{1e3 * t_cy:>14.2f}{t_py / t_cy:>10.1f}x")


if __name__ == "__main__":
    main()
