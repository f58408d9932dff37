"""Exact deviation of the uniform dictator distribution against Monte Carlo and 2(1-1/n)^k."""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

import oracles  # noqa: E402
from outlawldc.outlaw import deviation, dictator_distribution  # noqa: E402


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, nargs="+", default=[3, 4, 6])
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2, 3, 5, 8])
    ap.add_argument("--trials", type=int, default=20000)
    args = ap.parse_args()
    for n in args.n:
        mu = dictator_distribution(n)
        for k in args.k:
            exact = float(oracles.dictator_expected_deviation(n, k))
            est = deviation(mu, k, trials=args.trials, seed=k)
            closed = 2 * (1 - 1 / n) ** k
            print(f"n={n} k={k}  exact {exact:.4f}  sampled {est.mean_deviation:.4f} +- {est.std_error:.4f}"
                  f"  2(1-1/n)^k {closed:.4f}")


if __name__ == "__main__":
    main()
