"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Times each kernel on identical inputs, then two end-to-end workloads (the
energy of the F1 polygon's Guillemin potential and a delta LP on the square) with
the backend swapped in place.
"""

import argparse
import timeit
from fractions import Fraction

import numpy as np

from toricstab import _pykernels, catalog, kernels
from toricstab.kahler import energy_M, guillemin
from toricstab.kahler.potential import _cauchy_binet_data
from toricstab.polytope import subdivide
from toricstab.stability import delta_on_subdivision

try:
    from toricstab import _ckernels
except ImportError:
    _ckernels = None


def kernel_cases(points=20000):
    P = catalog.cube()
    u = guillemin(P)
    rng = np.random.default_rng(0)
    x = rng.uniform(0.05, 0.95, size=(points, 3))
    ell = np.ascontiguousarray(u.ell(x))
    normals = np.ascontiguousarray(u.normals)
    subsets, sq = _cauchy_binet_data(P)
    h = _pykernels.guillemin_hessians(ell, normals)
    rows = [[Fraction(int(a), int(b)) for a, b in zip(rng.integers(-9, 10, 40), rng.integers(1, 7, 40))] for _ in range(30)]

    def pivot(impl):
        work = [list(r) for r in rows]
        impl.pivot(work, 0, 0)

    return {
        "pivot (30x40 rationals)": pivot,
        "guillemin_hessians": lambda impl: impl.guillemin_hessians(ell, normals),
        "guillemin_logdet": lambda impl: impl.guillemin_logdet(ell, subsets, sq),
        "sym_inverse": lambda impl: impl.sym_inverse(h),
        "sym_logdet": lambda impl: impl.sym_logdet(h),
    }


def end_to_end():
    F, S = catalog.hirzebruch_fano(), catalog.square()
    mesh = subdivide(S, 2)
    return {
        "energy_M hirzebruch_fano": lambda: energy_M(F, guillemin(F)),
        "delta square depth 2": lambda: delta_on_subdivision(S, mesh),
    }


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation` first")
        return
    print(f"{'workload':28s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in kernel_cases().items():
        tp = best(lambda: fn(_pykernels), args.repeat)
        tc = best(lambda: fn(_ckernels), args.repeat)
        print(f"{name:28s} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms {tp / tc:7.1f}x")
    saved = kernels._impl
    try:
        for name, fn in end_to_end().items():
            kernels._impl = _pykernels
            tp = best(fn, args.repeat)
            kernels._impl = _ckernels
            tc = best(fn, args.repeat)
            print(f"{name:28s} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms {tp / tc:7.1f}x")
    finally:
        kernels._impl = saved


if __name__ == "__main__":
    main()
