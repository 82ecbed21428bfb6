#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallback.

Runs the two hot paths (chain transfer-matrix grid, steady-state
concurrence batch) on identical inputs through both implementations,
checks they agree, and prints best-of-N wall times.

    python3 benchmarks/bench_kernels.py [--cells N] [--omegas M] [--batch B]
"""

import argparse
import time

import numpy as np

from jjline import _purepy
from jjline.openqubits import liouvillian_basis

try:
    from jjline import _core
except ImportError:
    _core = None


def make_chain_inputs(n_cells, n_omegas, rng):
    # alternating junction / segment, mild parameter scatter
    n_el = 2 * n_cells
    kinds = np.zeros(n_el, dtype=np.int8)
    kinds[0::2] = 1
    p1 = np.empty(n_el)
    p2 = np.zeros(n_el)
    p1[0::2] = rng.uniform(0.9, 1.1, n_cells)      # omega_p
    p2[0::2] = rng.uniform(5.0, 15.0, n_cells)     # z_ratio
    p1[1::2] = rng.uniform(0.05, 0.15, n_cells)    # segment length
    omegas = np.linspace(0.3, 1.8, n_omegas)
    return kinds, p1, p2, omegas


def make_batch_inputs(n_rows, rng):
    g11 = rng.uniform(0.2, 2.0, n_rows)
    g22 = rng.uniform(0.2, 2.0, n_rows)
    g12 = rng.uniform(-0.95, 0.95, n_rows) * np.sqrt(g11 * g22)
    J12 = rng.uniform(-0.5, 0.5, n_rows)
    f = rng.uniform(0.01, 0.5, n_rows)
    det = rng.uniform(-0.2, 0.2, n_rows)
    return np.column_stack([g11, g22, g12, J12, f, det])


def best_of(fn, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=100)
    ap.add_argument("--omegas", type=int, default=4000)
    ap.add_argument("--batch", type=int, default=4000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(42)
    kinds, p1, p2, omegas = make_chain_inputs(args.cells, args.omegas, rng)
    coeffs = make_batch_inputs(args.batch, rng)
    basis = liouvillian_basis()

    impls = [("purepy", _purepy)]
    if _core is not None:
        impls.insert(0, ("core", _core))
    else:
        print("compiled extension not available, timing fallback only")

    print("chain_transfer_grid: %d elements x %d frequencies"
          % (len(kinds), len(omegas)))
    ref_T = None
    times = {}
    for name, mod in impls:
        dt, (T, ok) = best_of(
            lambda m=mod: m.chain_transfer_grid(kinds, p1, p2, omegas, 1.0, 1e-12),
            args.repeats)
        times[name] = dt
        if ref_T is None:
            ref_T = T
        else:
            # entries grow exponentially inside gaps, compare relatively
            err = np.nanmax(np.abs(T - ref_T) / (1.0 + np.abs(ref_T)))
            assert err < 1e-10, "implementations disagree: %g" % err
        print("  %-6s %8.2f ms" % (name, 1e3 * dt))
    if len(times) == 2:
        print("  speedup %.1fx" % (times["purepy"] / times["core"]))

    print("steady_concurrence_batch: %d rows" % args.batch)
    ref_C = None
    times = {}
    for name, mod in impls:
        dt, (C, status) = best_of(
            lambda m=mod: m.steady_concurrence_batch(coeffs, basis, 1e-8),
            args.repeats)
        times[name] = dt
        if ref_C is None:
            ref_C = C
        else:
            err = np.nanmax(np.abs(C - ref_C))
            assert err < 1e-8, "implementations disagree: %g" % err
        print("  %-6s %8.2f ms" % (name, 1e3 * dt))
    if len(times) == 2:
        print("  speedup %.1fx" % (times["purepy"] / times["core"]))


if __name__ == "__main__":
    main()
