#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Times each kernel on the 4-qubit workloads that dominate the pipelines,
plus one end-to-end model forward pass per backend. Usage:

    python benchmarks/bench_kernels.py [--repeats 20000]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qtclab import _kernels
from qtclab.qml import ModelSpec, model_forward
from qtclab.splines import BSplineBasis


def _time(fn, repeats: int) -> float:
    fn()  # warm-up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def kernel_cases(rng: np.random.Generator):
    amps = rng.normal(size=16) + 1j * rng.normal(size=16)
    amps = np.ascontiguousarray(amps / np.linalg.norm(amps))
    dense = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    dense = np.ascontiguousarray(dense)
    phases = np.ascontiguousarray(np.exp(1j * rng.uniform(0, 2 * np.pi, 16)))
    return {
        "apply_ry": lambda m: m.apply_ry(amps, 2, 0.8),
        "apply_cry": lambda m: m.apply_cry(amps, 0, 3, -0.5),
        "apply_dense": lambda m: m.apply_dense(amps, dense),
        "apply_phases": lambda m: m.apply_phases(amps, phases),
        "expect_zmask": lambda m: m.expect_zmask(amps, 0b0011),
        "expect_pauli": lambda m: m.expect_pauli(amps, 0b0101, 0b0110, 1),
    }


def bench_kernels(repeats: int) -> None:
    rng = np.random.default_rng(0)
    cases = kernel_cases(rng)
    backends = [(_kernels.get_backend(name), name)
                for name in _kernels.available_backends()]
    print(f"{'kernel':14s}" + "".join(f"{name:>12s}" for _, name in backends)
          + f"{'speedup':>10s}")
    for label, call in cases.items():
        times = [_time(lambda m=mod: call(m), repeats) for mod, _ in backends]
        row = f"{label:14s}" + "".join(f"{t * 1e6:10.2f}us" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


def bench_forward(repeats: int) -> None:
    rng = np.random.default_rng(1)
    basis = BSplineBasis(0.0, 0.25)
    specs = {
        "qnn": ModelSpec(kind="qnn", half_period=6.0),
        "vqkan": ModelSpec(kind="vqkan", half_period=6.0, basis=basis,
                           h1_fixed=rng.uniform(-0.1, 0.1, (2, 10))),
    }
    u = np.full(4, 0.2)
    print(f"\n{'model forward':14s}"
          + "".join(f"{name:>12s}" for name in _kernels.available_backends())
          + f"{'speedup':>10s}")
    original = _kernels.backend_name()
    try:
        for kind, spec in specs.items():
            params = rng.normal(scale=0.1, size=spec.dimension)
            times = []
            for name in _kernels.available_backends():
                _kernels.set_backend(name)
                times.append(_time(
                    lambda: model_forward(spec, u, params, "noiseless"), repeats))
            row = f"{kind:14s}" + "".join(f"{t * 1e3:10.3f}ms" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:9.1f}x"
            print(row)
    finally:
        _kernels.set_backend(original)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20000,
                        help="iterations per kernel timing")
    args = parser.parse_args()
    print(f"kernel backends available: {', '.join(_kernels.available_backends())}")
    bench_kernels(args.repeats)
    bench_forward(max(args.repeats // 100, 50))


if __name__ == "__main__":
    main()
