"""Benchmark: compiled kernels vs the pure-numpy fallback.

Times the three sequential kernels on representative workloads and a full
optimization run under each backend. Usage:

    python benchmarks/backend_bench.py [--quick]
"""

import argparse
import time

import numpy as np

from eopulse import _backend
from eopulse.gates import HADAMARD
from eopulse.grape import GrapeConfig, optimize
from eopulse.qmath import haar_random_unitary, pauli
from eopulse.system import (
    OneQubitZ,
    PulseSet,
    SystemSpec,
    TwoQubitZZ,
    build_drift,
    kraus_stack,
    slice_propagators,
)


def _timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _make_system(n_qubits, n_slices, t1=np.inf, t2=np.inf):
    if n_qubits == 1:
        spec = SystemSpec(1, build_drift(OneQubitZ(2 * np.pi), 1),
                          (pauli("x", 0, 1), pauli("y", 0, 1)), ("sx", "sy"),
                          2 * np.pi, n_slices, t1, t2)
    else:
        sx = pauli("x", 0, 1)
        spec = SystemSpec(2, build_drift(TwoQubitZZ(1.0, 1.0, 0.1), 2),
                          (np.kron(sx, np.eye(2)), np.kron(np.eye(2), sx),
                           np.kron(sx, sx)), ("sx1", "sx2", "sxsx"),
                          5 * np.pi, n_slices, t1, t2)
    pulses = PulseSet.random(spec.n_controls, n_slices, 0.8, seed=0)
    return spec, pulses


def bench_kernels(n_slices, repeats):
    rows = []
    for n_qubits in (1, 2):
        spec, pulses = _make_system(n_qubits, n_slices, t1=20.0, t2=20.0)
        props = slice_propagators(spec, pulses)
        kraus = kraus_stack(spec)
        rho = np.eye(spec.dim, dtype=complex) / spec.dim
        tail = haar_random_unitary(spec.dim, 0)
        cases = {
            f"chain_forward   d={spec.dim} N={n_slices}":
                lambda: _backend.chain_forward(props),
            f"chain_backward  d={spec.dim} N={n_slices}":
                lambda: _backend.chain_backward(props, tail),
            f"evolve_density  d={spec.dim} N={n_slices}":
                lambda: _backend.evolve_density(props, kraus, rho),
        }
        for label, fn in cases.items():
            timings = {}
            for name in _backend.available_backends():
                _backend.use(name)
                timings[name] = _timeit(fn, repeats)
            rows.append((label, timings))
    return rows


def bench_optimize(n_iterations, repeats):
    rows = []
    for n_qubits, label in ((1, "optimize 1q Hadamard N=100"),
                            (2, "optimize 2q Haar    N=100")):
        spec, _ = _make_system(n_qubits, 100)
        target = HADAMARD if n_qubits == 1 else haar_random_unitary(4, 18)
        cfg = GrapeConfig(w_f=0.9, w_e=0.1, n_iterations=n_iterations, seed=0)
        timings = {}
        for name in _backend.available_backends():
            _backend.use(name)
            timings[name] = _timeit(lambda: optimize(spec, cfg, target), repeats)
        rows.append((f"{label} N_G={n_iterations}", timings))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true",
                        help="fewer repeats and iterations")
    args = parser.parse_args()

    repeats = 3 if args.quick else 7
    n_slices = 500
    n_iterations = 50 if args.quick else 200

    backends = _backend.available_backends()
    print(f"backends available: {', '.join(backends)}")
    if len(backends) < 2:
        print("note: compiled extension not built; timing the fallback only")

    rows = bench_kernels(n_slices, repeats) + bench_optimize(n_iterations, repeats)
    width = max(len(label) for label, _ in rows)
    header = f"{'case'.ljust(width)}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, timings in rows:
        cells = "  ".join(f"{timings[b] * 1e3:>10.3f}ms" for b in backends)
        line = f"{label.ljust(width)}  {cells}"
        if len(backends) == 2:
            line += f"  {timings['python'] / timings['compiled']:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
