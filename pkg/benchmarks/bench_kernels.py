"""Compare the compiled and numpy kernels on state simulation and noisy sampling.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--qubits 4 8 12]
"""
import argparse
import time

import numpy as np

from qborn import _backend
from qborn.circuit import GateCircuit, NoiseSpec, cnot, ry, rz, sample_shots_noisy, simulate
from qborn.stateprep import prepare_circuit
from qborn.statevec import StateVector


def random_layered_circuit(rng, n, layers):
    gates = []
    for _ in range(layers):
        for q in range(n):
            gates += [ry(q, rng.uniform(-np.pi, np.pi)), rz(q, rng.uniform(-np.pi, np.pi))]
        for q in range(n - 1):
            gates.append(cnot(q, q + 1))
    return GateCircuit(n, tuple(gates))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--qubits", type=int, nargs="+", default=[4, 8, 12, 16])
    ap.add_argument("--shots", type=int, default=4096)
    args = ap.parse_args()

    backends = _backend.available()
    if len(backends) < 2:
        print("compiled kernels not built; only the numpy backend is available")
    rng = np.random.default_rng(0)
    print(f"{'task':<32}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))

    rows = []
    for n in args.qubits:
        circ = random_layered_circuit(rng, n, 10)
        rows.append((f"simulate n={n} ({len(circ)} gates)", lambda b, c=circ: simulate(c, backend=b)))
    for n in (3, 5):
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        prep = prepare_circuit(StateVector.from_unnormalized(amps))
        noise = NoiseSpec(0.01, 0.02, 0.01, 0.01)
        rows.append((f"trajectories n={n} M={args.shots}",
                     lambda b, c=prep: sample_shots_noisy(c, noise, args.shots, seed=1, backend=b)))

    for label, fn in rows:
        times = [best_of(lambda: fn(b), args.repeat) for b in backends]
        line = f"{label:<32}" + "".join(f"{t * 1e3:>10.3f}ms" for t in times)
        if len(times) > 1:
            line += f"{times[1] / times[0]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
