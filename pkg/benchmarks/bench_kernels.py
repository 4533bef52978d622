#!/usr/bin/env python3
"""Timing comparison of the numpy and numba kernel backends.

Runs every hot kernel on representative 128^2 data with both backends and
prints a table plus a short end-to-end stepper comparison.  numpy's SIMD
transcendentals win on the log-heavy kernels; the numba twins win where
fusion avoids temporaries or the loop carries a data-dependent reduction
(step-limit search, peak magnitudes).  Select the backend for production
runs with PHASEFLOW_NUMBA=0/1/auto accordingly.

Usage: python benchmarks/bench_kernels.py [--n 128] [--repeat 300]
"""

import argparse
import time

import numpy as np

from phaseflow import backend


def timeit(fn, repeat):
    fn()  # warm-up / jit compile
    best = np.inf
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeat):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeat)
    return best * 1e6  # microseconds


def kernel_cases(n, rng):
    phi = rng.uniform(-0.95, 0.95, (n, n))
    wide = phi * 1.3
    ux = rng.standard_normal((n, n))
    uy = rng.standard_normal((n, n))
    lap = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    dphi = rng.standard_normal((n, n)) * 0.01
    rho = np.abs(phi) + 1.0
    return [
        ("convex_prime", lambda K: K.convex_prime(phi, 1.0)),
        ("convex_second", lambda K: K.convex_second(phi, 1.0)),
        ("reg_prime", lambda K: K.reg_prime(wide, 1.0, 0.1)),
        ("newton_residual", lambda K: K.newton_residual(
            phi, lap, b, 1e-3, 0.1, K.convex_prime(phi, 1.0))),
        ("max_interior_step", lambda K: K.max_interior_step(phi, dphi, -0.99, 0.99)),
        ("interp_clamped", lambda K: K.interp_clamped(wide, 1.0, 3.0)),
        ("entropy_sums", lambda K: K.entropy_sums(phi, 1.0)),
        ("kinetic_sum", lambda K: K.kinetic_sum(ux, uy, rho)),
        ("psi_sum", lambda K: K.psi_sum(phi, 1.0, 2.0)),
        ("abs_max_vec", lambda K: K.abs_max_vec(ux, uy)),
    ]


def bench_kernels(n, repeat):
    rng = np.random.default_rng(0)
    cases = kernel_cases(n, rng)
    numpy_k = backend.get("numpy")
    try:
        numba_k = backend.get("numba")
    except ImportError:
        numba_k = None
        print("numba unavailable; timing the numpy backend only")

    print(f"\nkernel timings at {n}x{n} (best of 3 x {repeat}, microseconds)")
    header = f"{'kernel':<20}{'numpy':>10}" + (f"{'numba':>10}{'speedup':>10}" if numba_k else "")
    print(header)
    print("-" * len(header))
    for name, call in cases:
        t_np = timeit(lambda: call(numpy_k), repeat)
        if numba_k is not None:
            t_nb = timeit(lambda: call(numba_k), repeat)
            print(f"{name:<20}{t_np:>10.1f}{t_nb:>10.1f}{t_np / t_nb:>9.2f}x")
        else:
            print(f"{name:<20}{t_np:>10.1f}")


def bench_stepper(n, steps):
    from phaseflow.config import bubble_profile, random_velocity
    from phaseflow.grid import Grid, ScalarField, VectorField
    from phaseflow.material import FluidParams
    from phaseflow.nsac import NsacSchemeParams, SimState, step
    from phaseflow.potential import PotentialParams

    g = Grid(n, n)
    phi = bubble_profile(g, np.pi, np.pi, 1.5, 0.3, 0.9, -0.9)
    ux, uy = random_velocity(g, 0.5, seed=3, band=3)
    fl = FluidParams(1.0, 2.0, 0.1, 0.1)
    sch = NsacSchemeParams(dt=1e-3)

    names = ["numpy"]
    try:
        backend.get("numba")
        names.append("numba")
    except ImportError:
        pass
    print(f"\nfull step at {n}x{n} ({steps} steps, ms/step)")
    original = backend.backend_name
    try:
        for name in names:
            backend.use(name)
            st = SimState(0.0, VectorField(g, ux.copy(), uy.copy()),
                          ScalarField(g, phi.copy()), PotentialParams(), fl)
            st = step(st, sch)  # warm-up
            t0 = time.perf_counter()
            for _ in range(steps):
                st = step(st, sch)
            print(f"  {name:<8}{(time.perf_counter() - t0) / steps * 1e3:8.2f}")
    finally:
        backend.use(original)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--repeat", type=int, default=300)
    ap.add_argument("--steps", type=int, default=50)
    args = ap.parse_args()
    bench_kernels(args.n, args.repeat)
    bench_stepper(args.n, args.steps)


if __name__ == "__main__":
    main()
