"""Per-n median residuals of the reduction for one and two passes.

Usage: python3 benchmarks/residual_trend.py [--n-min 4 --n-max 16 --trials 10]
Prints a markdown table.
"""
import argparse
import statistics

from bgform.cli import run_bench


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-min", type=int, default=4)
    ap.add_argument("--n-max", type=int, default=16)
    ap.add_argument("--trials", type=int, default=10)
    ap.add_argument("--variant", default="householder")
    args = ap.parse_args()
    runs = {p: run_bench(args.n_min, args.n_max, args.trials, args.variant, passes=p) for p in (1, 2)}
    print("| n | median s21 (1 pass) | median s21 (2 passes) | median arme (1 pass) "
          "| median arme (2 passes) | max arme (1 pass) | breakdowns |")
    print("|---|---|---|---|---|---|---|")
    for n in range(args.n_min, args.n_max + 1):
        one = [r for r in runs[1] if r.n == n]
        two = [r for r in runs[2] if r.n == n]
        print(
            f"| {n} | {statistics.median(r.s21_residual for r in one):.2e} "
            f"| {statistics.median(r.s21_residual for r in two):.2e} "
            f"| {statistics.median(r.arme_residual for r in one):.2e} "
            f"| {statistics.median(r.arme_residual for r in two):.2e} "
            f"| {max(r.arme_residual for r in one):.2e} "
            f"| {sum(r.breakdown for r in one)} |"
        )
    for p in (1, 2):
        big = [r.s21_residual for r in runs[p] if r.n > 10]
        small = [r.s21_residual for r in runs[p] if r.n <= 10]
        print(f"\npasses={p}: median s21 n<=10 {statistics.median(small):.2e}, n>10 {statistics.median(big):.2e}")


if __name__ == "__main__":
    main()
