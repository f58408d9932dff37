"""Hadamard code -> outlaw distribution -> average-case code -> LDC, for k = 2..4."""

import argparse
import json

from outlawldc.codes import CodeParams, hadamard_code
from outlawldc.outlaw import max_smoothness
from outlawldc.transforms import ldc_to_outlaw, outlaw_to_ldc_pipeline


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rows = []
    for k in args.k:
        code, dec = hadamard_code(k)
        mu, wit = ldc_to_outlaw(code, dec, CodeParams(q=2, eta=0.5, delta=1 / 8), trials=args.trials, seed=args.seed)
        rep = outlaw_to_ldc_pipeline(mu, args.epsilon, seed=args.seed, trials=args.trials)
        rows.append({
            "k": k,
            "outlaw_n": mu.n,
            "outlaw_smoothness": max_smoothness(mu),
            "witness_mean_sup": wit.mean_sup,
            "witness_passed": wit.passed,
            "pipeline_passed": rep.passed,
            "degraded_stage": rep.degraded_stage,
            "final": rep.final,
        })
    print(json.dumps(rows, indent=2, default=float))


if __name__ == "__main__":
    main()
