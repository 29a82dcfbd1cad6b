"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import math
import timeit

import numpy as np

from ultrakit import _kernels
from ultrakit import gaussalg as ga
from ultrakit import tmib
from ultrakit import weightseq as ws


def cases():
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=(8, 6)) + 0j
    rates = rng.uniform(0.5, 3.0, 8)
    lin = rng.normal(size=8) + 0j
    const = np.zeros(8, complex)
    x = np.linspace(-20, 20, 40_001)
    M = ws.gevrey(1.0, 256)
    rel = M.log_values - M.log_values[0]
    logt = np.log(np.geomspace(0.1, 1e3, 20_000))
    E = tmib.parse_space("lp:2:exp:1:1")
    t = ga.GaussSum.gaussian(math.pi, [1.0, 0.5j]).terms[0]
    nodes = np.linspace(-6, 6, 401)
    weights = np.exp(-nodes ** 2) + 0j
    xs = np.linspace(-8, 8, 4001)
    return {
        "eval_terms": lambda: _kernels.eval_terms(coeffs, rates, lin, const, x),
        "assoc_brute": lambda: _kernels.assoc_brute(rel, logt),
        "maxplus_shift": lambda: tmib._ratio_sup_table(E.weight, E.grid, 1),
        "lattice_eval": lambda: _kernels.lattice_eval(t.coeffs, t.a, t.b, t.c, nodes, weights, xs, True),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        print("numba not importable; only the numpy backend is available")
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, fn in cases().items():
        row = {}
        for backend in ("numpy", "numba") if _kernels.HAS_NUMBA else ("numpy",):
            with _kernels.use_backend(backend):
                fn()  # warm-up, includes JIT compilation
                row[backend] = min(timeit.repeat(fn, number=1, repeat=args.repeat)) * 1e3
        nb = row.get("numba", float("nan"))
        print(f"{name:<16}{row['numpy']:>12.2f}{nb:>12.2f}{row['numpy'] / nb:>10.1f}")


if __name__ == "__main__":
    main()
