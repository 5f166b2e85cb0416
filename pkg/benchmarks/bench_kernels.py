#!/usr/bin/env python3
"""Compare the numba and pure-numpy backends of the hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

The numba column is only meaningful when numba is importable and
FREEQUBIT_DISABLE_NUMBA is unset.
"""

import argparse
import timeit

import numpy as np

from freequbit import _accel
from freequbit.kernels import dicke_rk4, ordered_product, rk4_propagate


def _cases():
    rng = np.random.default_rng(0)
    n = 40000
    w = 1e-3 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    kz = 1e-6 * rng.standard_normal(n)
    f_nodes = 0.1 * (rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1))
    f_mid = 0.1 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    nq = 16
    p0 = np.zeros(nq + 1)
    p0[-1] = 1.0
    m = np.arange(nq + 1)
    rates = m * (nq - m + 1.0)
    t_out = np.linspace(0.0, 1.0, 201)
    hmax = 0.01 / nq**2
    return {
        f"ordered product ({n} SU(2) steps)": lambda b: ordered_product(w, kz, backend=b),
        f"RK4 propagator ({n} steps)": lambda b: rk4_propagate(f_nodes, f_mid, 2e-3, backend=b),
        f"Dicke cascade (N={nq}, {int(1 / hmax)} steps)": lambda b: dicke_rk4(p0, rates, t_out, hmax, backend=b),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    backends = ["numpy"] + (["numba"] if _accel.USE_NUMBA else [])
    print(f"numba available: {_accel.HAS_NUMBA}, enabled: {_accel.USE_NUMBA}")
    print(f"{'kernel':45s} " + " ".join(f"{b:>12s}" for b in backends) + "   speed-up")
    for name, fn in _cases().items():
        times = {}
        ref = None
        for b in backends:
            out = fn(b)  # warm-up, includes JIT compilation
            if ref is None:
                ref = out
            else:
                a = ref if not isinstance(ref, tuple) else ref[0]
                c = out if not isinstance(out, tuple) else out[0]
                assert np.allclose(a, c, rtol=1e-9, atol=1e-12), f"{name}: backends disagree"
            times[b] = min(timeit.repeat(lambda: fn(b), number=1, repeat=args.repeat))
        cols = " ".join(f"{times[b] * 1e3:10.2f}ms" for b in backends)
        speed = f"{times['numpy'] / times['numba']:8.1f}x" if "numba" in times else "       -"
        print(f"{name:45s} {cols} {speed}")


if __name__ == "__main__":
    main()
