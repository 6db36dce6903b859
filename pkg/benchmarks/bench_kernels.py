"""Time the hot kernels under the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is warmed up once (JIT compilation is excluded) and then timed as
the best of N runs.
"""
import argparse
import time

import numpy as np

from twoatom import _backend, _kernels
from twoatom.dynamics import SystemParams, _product_generator, collective_vector
from twoatom.entanglement import concurrence
from twoatom.hilbert import DensityMatrix, pure_state_density
from twoatom.scenario import figure_preset, run_scenario

PARAMS = SystemParams(0.79, 1.12, delta=1.0)
N_STEPS = 8000


def _random_hermitian(rng, n):
    z = rng.normal(size=(n, 4, 4)) + 1j * rng.normal(size=(n, 4, 4))
    return z + np.conj(np.swapaxes(z, 1, 2))


def cases():
    rho0 = pure_state_density([0, 1, 0, 0])
    heff, jl, jr, jc = _product_generator(PARAMS)
    y0 = collective_vector(rho0)
    steps = _kernels.store_schedule(N_STEPS, 10)
    mats = _random_hermitian(np.random.default_rng(0), 500)
    p = PARAMS
    z = np.random.default_rng(1).normal(size=(4, 4)) + 1j * np.random.default_rng(2).normal(size=(4, 4))
    state = DensityMatrix(z @ z.conj().T / np.trace(z @ z.conj().T).real)
    return {
        f"rk4 product ({N_STEPS} steps)": lambda: _kernels.rk4_product(
            rho0.entries, heff, jl, jr, jc, 1e-3, N_STEPS, steps),
        f"rk4 collective ({N_STEPS} steps)": lambda: _kernels.rk4_collective(
            y0, p.gamma, p.gamma12, p.omega12, p.delta, p.omega0, 1e-3, N_STEPS, steps),
        "jacobi eigh (500 matrices)": lambda: [_kernels.jacobi_eigh(m) for m in mats],
        "eigh dispatch (500 matrices)": lambda: [_kernels.eigh(m) for m in mats],
        "concurrence (200 states)": lambda: [concurrence(state) for _ in range(200)],
        "figure 3 end to end": lambda: run_scenario(figure_preset(3)),
    }


def best_of(fn, repeat):
    fn()  # warm-up / JIT
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = [b for b in _backend.BACKENDS if b == "numpy" or _backend.numba is not None]
    results = {}
    for name in backends:
        previous = _backend.set_backend(name)
        try:
            for label, fn in cases().items():
                results.setdefault(label, {})[name] = best_of(fn, args.repeat)
        finally:
            _backend.set_backend(previous)
    width = max(map(len, results))
    print(f"{'kernel':<{width}}  " + "  ".join(f"{b:>10}" for b in backends) + "   speedup")
    for label, row in results.items():
        cells = "  ".join(f"{row[b] * 1e3:8.2f}ms" for b in backends)
        speed = row["numpy"] / row["numba"] if "numba" in row else float("nan")
        print(f"{label:<{width}}  {cells}   {speed:6.1f}x")


if __name__ == "__main__":
    main()
