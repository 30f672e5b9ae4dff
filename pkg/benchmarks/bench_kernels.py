#!/usr/bin/env python3
"""Benchmark: compiled kernels vs the pure-Python fallback.

Times the three hot loops (closed trace, Fresnel-weighted open trace,
anisotropic trace) on representative workloads and prints a table with the
speedup.  Run after `pip install -e . --no-build-isolation`:

    python3 benchmarks/bench_kernels.py [--quick]
"""

import argparse
import math
import time

from cavphase import anisotropic as aniso
from cavphase import backend, geometry


def launch(shape, phi, p):
    bp = shape.boundary_point(phi)
    cos_chi = math.sqrt(1 - p * p)
    d = p * bp.tangent - cos_chi * bp.normal
    return bp.position[0], bp.position[1], d[0], d[1], bp.phi


def bench(fn, repeat=3):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads (for CI smoke runs)")
    args = parser.parse_args()
    scale = 10 if args.quick else 1

    names = backend.available_backends()
    if "compiled" not in names:
        print("compiled kernels not built; showing python fallback only")
    kernel_sets = [(name, backend.get_kernels(name)) for name in names]

    quad = geometry.quadrupole(0.05)
    lim = geometry.limacon(0.43)
    circ = geometry.circle()
    tri = aniso.trigonal_contour(0.2)

    n_closed = 200_000 // scale
    n_open = 40_000 // scale
    n_aniso = 20_000 // scale

    x, y, dx, dy, phi0 = launch(quad, 0.3, 0.2)
    jobs = [(f"closed trace, quadrupole, {n_closed} bounces",
             lambda k: k.trace_closed(*quad.tables, x, y, dx, dy, phi0, n_closed))]

    xo, yo, dxo, dyo, phio = launch(lim, 1.2, 0.5)
    jobs.append((f"open trace, limacon TE n=3.3, {n_open} bounces",
                 lambda k: k.trace_open(*lim.tables, xo, yo, dxo, dyo, phio,
                                        3.3, True, n_open, 0.0)))

    st = aniso.aniso_launch(circ, tri, 0.8, 2.1)
    bp = circ.boundary_point(0.8)
    jobs.append((f"aniso trace, trigonal contour, {n_aniso} bounces",
                 lambda k: k.trace_aniso(*circ.tables, *tri.tables,
                                         bp.position[0], bp.position[1],
                                         st.wavevector[0], st.wavevector[1],
                                         st.group_direction[0],
                                         st.group_direction[1], bp.phi, n_aniso)))

    width = max(len(label) for label, _ in jobs)
    header = f"{'workload':<{width}}  " + "".join(f"{n:>12}" for n, _ in kernel_sets)
    if len(kernel_sets) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, job in jobs:
        times = [bench(lambda k=k: job(k)) for _, k in kernel_sets]
        row = f"{label:<{width}}  " + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
