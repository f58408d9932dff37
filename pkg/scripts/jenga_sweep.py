"""Deviation of unions of m-1 matchings from the F_2^m and F_p^m line partitions."""

import argparse
import itertools

from outlawldc.jenga import components, f2_partition, fp_line_partition, pseudorandom_deviation


def sweep(name, part, k):
    values = []
    for combo in itertools.combinations(range(len(part.matchings)), k):
        j = part.union(combo)
        res = pseudorandom_deviation(j, part.base)
        values.append((res.value, len(components(j)), res.heuristic))
    lo = min(v[0] for v in values)
    hi = max(v[0] for v in values)
    heur = any(v[2] for v in values)
    print(f"{name:>12}  draws={k}  unions={len(values):4d}  deviation in [{lo:.4f}, {hi:.4f}]"
          f"  disconnected={sum(v[1] > 1 for v in values)}  heuristic={heur}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--fp", type=int, nargs=2, action="append", metavar=("P", "M"), default=None)
    args = ap.parse_args()
    for m in args.m:
        sweep(f"F_2^{m}", f2_partition(m), m - 1)
    for p, m in args.fp or [(3, 2)]:
        sweep(f"F_{p}^{m}", fp_line_partition(p, m), 1)


if __name__ == "__main__":
    main()
