"""Time the compiled and pure-Python kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py --repeat 3
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from bugonomics import kernels


def cases(n_samples: int, n_items: int):
    kinds = np.array([kernels.KIND_UNIFORM, kernels.KIND_TRIANGULAR, kernels.KIND_POINT], dtype=np.int64)
    lo = np.array([0.5, 100.0, 112.0])
    hi = np.array([2.0, 250.0, 112.0])
    mode = np.array([1.0, 150.0, 112.0])
    arrivals = np.sort(np.linspace(0.0, 1680.0, n_items, endpoint=False))
    service = np.full(n_items, 1.0)
    priority = np.zeros(n_items, dtype=np.int64)
    return {
        "sample_block": lambda k: k.sample_block(7, 0, n_samples, kinds, lo, hi, mode),
        "poisson_arrivals": lambda k: k.poisson_arrivals(7, 0, n_items / 1680.0, 1680.0),
        "serve_stage": lambda k: k.serve_stage(arrivals, service, priority, 40.0, 1680.0, 168.0),
    }


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=20_000, help="rows per sample_block call")
    parser.add_argument("--items", type=int, default=5_000, help="items for the queue kernels")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled backend not built; timing the Python fallback only")
    print(f"{'kernel':<18}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for name, fn in cases(args.samples, args.items).items():
        times = []
        outputs = []
        for b in backends:
            mod = kernels.get_backend(b)
            times.append(min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)))
            outputs.append(fn(mod))
        if len(outputs) == 2:
            a, c = outputs
            same = all(np.array_equal(x, y) for x, y in zip(a, c)) if isinstance(a, tuple) else np.array_equal(a, c)
            assert same, f"{name}: backends disagree"
        line = f"{name:<18}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[1] / times[0]:>11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
