"""Avoiding-set sizes and line-count outlaw witnesses over small prime fields."""

import argparse

import numpy as np

from outlawldc.geometry import FpVector, construct_avoiding_set, fx_audit, geometry_outlaw, max_interpolable


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", default="3:2,3:3,3:4,5:2,5:3", help="comma separated p:n pairs")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=4)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    for case in args.cases.split(","):
        p, n = (int(v) for v in case.split(":"))
        size = min(3, max_interpolable(p, n))
        A = rng.choice(p ** n, size=size, replace=False)
        av = construct_avoiding_set(p, n, A)
        small = p ** n <= 24
        audit = fx_audit(FpVector(p, (0,) * n)) if small else None
        out = geometry_outlaw(p, n, args.k, trials=200, seed=args.seed) if small else None
        dev = f"{out.deviation:.4f}" if out else "n/a"
        sm = f"{audit.smoothness:.4f} (claimed {audit.claimed_bound:.4f})" if audit else "n/a"
        print(f"p={p} n={n}  |A|={size}  |B|={av.size:4d} (bound {av.size_bound:7.2f})  max hits {av.max_hits}"
              f"  F_x smoothness {sm}  deviation {dev}")


if __name__ == "__main__":
    main()
