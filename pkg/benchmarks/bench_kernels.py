"""Compiled vs pure-Python kernel timings.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

from bgform import _backend, gen_skew_hamiltonian, reduce
from bgform.matrix import Mat, multiply


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat)) * 1e3


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = _backend.available_backends()
    if "cython" not in backends:
        print("compiled extension not built; only the python backend is available")
    cases = []
    for n in (16, 32, 64):
        a = Mat(n, n, [((i * 7919) % 1000) / 1000.0 for i in range(n * n)])
        cases.append((f"matmul {n}x{n}", lambda a=a: multiply(a, a)))
    for n in (6, 10, 16):
        s = gen_skew_hamiltonian(n, 0)
        cases.append((f"reduce n={n}", lambda s=s: reduce(s)))
    print("| case | " + " | ".join(f"{b} (ms)" for b in backends) + " | speedup |")
    print("|---|" + "---|" * (len(backends) + 1))
    prev = _backend.name
    try:
        for label, fn in cases:
            times = {}
            for b in backends:
                _backend.set_backend(b)
                times[b] = _time(fn, args.repeat)
            speed = times["python"] / times["cython"] if "cython" in times else 1.0
            cells = " | ".join(f"{times[b]:.3f}" for b in backends)
            print(f"| {label} | {cells} | {speed:.1f}x |")
    finally:
        _backend.set_backend(prev)


if __name__ == "__main__":
    main()
