"""Acceptance criteria, one check per criterion.

Each ``criterion_*`` function returns (passed, detail). Under pytest every
criterion is a test and a PASS/FAIL line per criterion is printed in the
terminal summary; ``python tests/test_acceptance.py`` prints the same lines.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import math
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import oracles  # noqa: E402
from outlawldc.cli import run  # noqa: E402
from outlawldc.codes import (  # noqa: E402
    CodeParams,
    adversarial_success,
    certify_average_smooth_code,
    hadamard_code,
    query_distribution,
    success_table,
)
from outlawldc.fourier import (  # noqa: E402
    FourierSpectrum,
    cube_points,
    identity_checks,
    inverse_transform,
    popcounts,
    smoothness,
    sup_norm,
    truncate_degree,
)
from outlawldc.geometry import (  # noqa: E402
    all_points,
    avoiding_size_bound,
    construct_avoiding_set,
    dlsz_bound,
)
from outlawldc.jenga import (  # noqa: E402
    components,
    f2_partition,
    f2_rank,
    jenga_outlaw,
    jenga_test,
    pseudorandom_deviation,
)
from outlawldc.outlaw import max_smoothness  # noqa: E402
from outlawldc.transforms import (  # noqa: E402
    PointCloud,
    avg_to_ldc,
    build_code,
    build_decoders,
    fix_family,
    gaussian_width,
    ldc_to_outlaw,
    vc_search,
)

HADAMARD_LDC = CodeParams(q=2, eta=0.5, delta=1 / 8)


def criterion_1():
    """Fourier identities on 1000 random functions for n in {4, 8, 12}."""
    reps = [identity_checks(n, 1000, seed=n, tol=1e-9) for n in (4, 8, 12)]
    worst = max(max(r["worst"].values()) for r in reps)
    return all(r["passed"] for r in reps), f"worst violation {worst:.2e} (tol 1e-9)"


def criterion_2():
    """sup |f - f^{<=q}| <= 1/q for random 1-smooth f on 10 variables."""
    n = 10
    rng = np.random.default_rng(2)
    pop = popcounts(n)
    worst_ratio = 0.0
    ok = True
    for r in range(200):
        decay = rng.uniform(0.3, 1.0)
        c = rng.standard_normal(1 << n) * decay ** pop * (rng.random(1 << n) < 0.5)
        spec = FourierSpectrum(n, c)
        s = smoothness(spec)
        if s == 0:
            continue
        f = inverse_transform(FourierSpectrum(n, c / s))
        for q in (2, 4, 8):
            gap = sup_norm(f - truncate_degree(f, q))
            ok &= gap <= 1 / q + 1e-9
            worst_ratio = max(worst_ratio, gap * q)
    return ok, f"max q*sup|f - f^<=q| = {worst_ratio:.4f} (must be <= 1)"


def criterion_3():
    """Hadamard k=3: exact success 1 / >=3/4 / >=1/2 at 0/1/2 flips, load 2/n."""
    code, dec = hadamard_code(3)
    words, odec = oracles.hadamard(3)
    ok = bool(np.all(success_table(code, dec) == 1.0))
    mins = {}
    for flips in (1, 2):
        vals = [adversarial_success(code, dec, i, x, flips / 8).success for x in range(8) for i in range(3)]
        ref = [oracles.worst_success(words, odec, i, x, flips) for x in range(8) for i in range(3)]
        ok &= np.allclose(vals, ref)
        mins[flips] = min(vals)
    ok &= mins[1] >= 0.75 - 1e-12 and mins[2] >= 0.5 - 1e-12
    loads = np.array([query_distribution(dec, i, 8) for i in range(3)])
    ok &= bool(np.all(loads == 2 / 8))
    return ok, f"min success 1 flip {mins[1]}, 2 flips {mins[2]}, loads {sorted(set(loads.ravel().tolist()))}"


def criterion_4():
    """Family + code + decoders from the Hadamard-derived outlaw: average success >= 1/2 + eps/8."""
    code, dec = hadamard_code(3)
    mu, _ = ldc_to_outlaw(code, dec, HADAMARD_LDC, trials=100)
    fam = fix_family(mu, 3, rounds=64, seed=0, trials=2000)
    eps = fam.deviation.mean_deviation
    c2 = build_code(fam)
    d2 = build_decoders(fam)
    rep = certify_average_smooth_code(c2, d2, CodeParams(q=2, c=1.0, eta=eps / 8))
    load = max(query_distribution(d2, i, c2.n).max() for i in range(d2.k))
    ok = rep.exact and rep.average_success >= 0.5 + eps / 8 - 1e-6
    ok &= load <= 1 / c2.n + 1e-12 and d2.max_query() <= 2
    return ok, (f"exact average success {rep.average_success:.4f} vs 1/2 + eps/8 = {0.5 + eps / 8:.4f} "
                f"(eps = {eps:.4f}), max load {load:.4f} <= {1 / c2.n}, query size {d2.max_query()}")


def criterion_5():
    """ldc_to_outlaw on Hadamard k in {3, 4}: 1-smooth, degree <= 2, witness >= eta."""
    ok, parts = True, []
    for k in (3, 4):
        code, dec = hadamard_code(k)
        mu, wit = ldc_to_outlaw(code, dec, HADAMARD_LDC, trials=1000, seed=k)
        lower = wit.mean_sup - 2 * wit.sup_std_error
        ok &= max_smoothness(mu) <= 1 + 1e-9 and wit.max_degree <= 2 and lower >= wit.eta - 1e-12
        parts.append(f"k={k}: smooth {max_smoothness(mu):.3f}, deg {wit.max_degree}, "
                     f"witness {wit.mean_sup:.4f} - 2se = {lower:.4f} >= {wit.eta}")
    return ok, "; ".join(parts)


def criterion_6():
    """vc_search on full cubes at w=2 and the Gaussian width of {-1, 1}."""
    sizes = [vc_search(PointCloud.from_points(cube_points(k)), 2.0).size for k in range(1, 7)]
    gw = gaussian_width(np.array([[-1.0], [1.0]]), trials=100_000, seed=6)
    target = math.sqrt(2 / math.pi)
    ok = sizes == list(range(1, 7)) and abs(gw.estimate - target) <= 3 * gw.std_error
    return ok, f"sizes {sizes}; width {gw.estimate:.4f} vs {target:.4f} (3se = {3 * gw.std_error:.4f})"


def criterion_7():
    """avg_to_ldc on Hadamard: per-pattern bias >= w/4 and the exhaustive LDC check."""
    code, dec = hadamard_code(3)
    res = avg_to_ldc(code, dec, CodeParams(q=2, c=2.0, eta=0.25), verify="exhaustive")
    w = res.structure.width
    bias = 2 * success_table(res.code, res.decoders) - 1
    ok = bool(bias.min() >= w / 4 - 1e-9) and res.ldc_report.passed and not res.ldc_report.heuristic
    p = res.ldc_params
    return ok, (f"|sigma| = {res.structure.size}, w = {w}, min bias {bias.min():.4f} >= {w / 4}; "
                f"LDC (q, delta, eta) = ({p.q}, {p.delta}, {p.eta}) success {res.ldc_report.min_success:.4f}")


def criterion_8():
    """Avoiding sets for p=3 n=4 and p=5 n=2 with |A| = 3, verified line by line."""
    ok, parts = True, []
    for p, n, bound in ((3, 4, 15.58), (5, 2, 1.49)):
        rng = np.random.default_rng(p * 10 + n)
        for _ in range(5):
            A = rng.choice(p ** n, size=3, replace=False)
            av = construct_avoiding_set(p, n, A)
            coords = [tuple(c) for c in all_points(p, n)[list(av.B)]]
            a_coords = [tuple(c) for c in all_points(p, n)[A]]
            hits = oracles.max_hits_through(p, n, a_coords, coords)
            ok &= hits <= p - 2 and av.certified and av.size >= avoiding_size_bound(p, n) >= bound
            ok &= av.level_counts[0] <= dlsz_bound(p, n, p - 2)
        parts.append(f"p={p} n={n}: |B| = {av.size} >= {avoiding_size_bound(p, n):.2f}, max hits {hits} <= {p - 2}")
    return ok, "; ".join(parts)


def criterion_9():
    """F_2^m jenga checks for m in {2, 3, 4}."""
    ok, parts = True, []
    for m in (2, 3, 4):
        part = f2_partition(m)
        worst = math.inf
        for combo in itertools.combinations(range(len(part.matchings)), m - 1):
            if f2_rank([part.directions[c] for c in combo]) == m:
                continue
            j = part.union(combo)
            ok &= len(components(j)) > 1
            worst = min(worst, pseudorandom_deviation(j, part.base, "exhaustive").value)
        ok &= worst >= 0.25
        test = jenga_test(part, m - 1, 0.25, trials=50, seed=m)
        ok &= test.probability - 2 * test.std_error >= 1.0 - 1e-12
        _, wit = jenga_outlaw(part, 1, seed=m)
        ok &= wit.smoothness <= 4 + 1e-9
        parts.append(f"m={m}: min deviation {worst:.4f}, Pr {test.probability}, f_M smoothness {wit.smoothness}")
    return ok, "; ".join(parts)


CLI_RUNS = [
    ["fourier", "suite", "--n", "4", "8", "--trials", "50"],
    ["ldc", "audit", "--code", "hadamard3", "--delta", "0.125"],
    ["ldc", "adversary", "--code", "hadamard3", "--delta", "0.25", "--mode", "greedy", "--seed", "5"],
    ["outlaw", "deviation", "--mu", "hadamard3", "--k", "3", "--trials", "300", "--seed", "3"],
    ["outlaw", "kappa", "--mu", "dictator6", "--epsilon", "1.0", "--trials", "300"],
    ["pipeline", "outlaw-to-ldc", "--mu", "hadamard3", "--epsilon", "0.5", "--trials", "300", "--seed", "9"],
    ["pipeline", "ldc-to-outlaw", "--code", "hadamard3", "--trials", "300", "--seed", "2"],
    ["pipeline", "avg-to-ldc", "--code", "hadamard3"],
    ["geom", "avoid", "--p", "5", "--n", "2"],
    ["geom", "outlaw", "--p", "3", "--n", "2", "--k", "4", "--seed", "8"],
    ["jenga", "test", "--k", "2", "--epsilon", "0.25", "--trials", "20", "--seed", "4"],
    ["jenga", "f2", "--m", "3"],
    ["jenga", "fp", "--p", "3", "--m", "2", "--format", "csv"],
]


def criterion_10():
    """Every CLI run repeated with the same seed yields identical report bytes."""
    bad = []
    with tempfile.TemporaryDirectory() as tmp:
        for r, argv in enumerate(CLI_RUNS):
            outs = []
            for rep in range(2):
                path = Path(tmp) / f"{r}_{rep}.out"
                with contextlib.redirect_stderr(io.StringIO()):
                    code = run(argv + ["--out", str(path)])
                outs.append((code, path.read_bytes()))
            if outs[0] != outs[1] or outs[0][0] != 0:
                bad.append(" ".join(argv[:2]))
    return not bad, f"{len(CLI_RUNS)} commands replayed, mismatched or failing: {bad or 'none'}"


CRITERIA = [
    (1, criterion_1, 30), (2, criterion_2, 10), (3, criterion_3, 5), (4, criterion_4, 120),
    (5, criterion_5, 660), (6, criterion_6, 60), (7, criterion_7, 120), (8, criterion_8, 60),
    (9, criterion_9, 300), (10, criterion_10, 600),
]


def evaluate(number, fn, limit):
    start = time.perf_counter()
    passed, detail = fn()
    elapsed = time.perf_counter() - start
    passed = bool(passed) and elapsed < limit
    line = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail} [{elapsed:.1f}s, limit {limit}s]"
    return passed, line


@pytest.mark.parametrize("number,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(number, fn, limit, request):
    passed, line = evaluate(number, fn, limit)
    lines = getattr(request.config, "_acceptance_lines", [])
    lines.append(line)
    request.config._acceptance_lines = lines
    print(line)
    assert passed, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(p for p, _ in results) else 1)
