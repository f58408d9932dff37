"""Conversions between outlaw distributions, average-case smooth codes and LDCs.

* outlaw -> average-case smooth code: pick a good tuple of support functions
  (:func:`fix_family`), encode each sign vector by a maximizer of the signed sum
  (:func:`build_code`), decode by sampling Fourier characters
  (:func:`build_decoders`).
* average-case smooth code -> LDC: find a cube-like structure in the image of
  the expected decoders (:func:`vc_search`), restrict messages to it and
  re-randomize the decoder outputs (:func:`avg_to_ldc`).
* LDC -> outlaw: the expected decoding functions themselves
  (:func:`ldc_to_outlaw`).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .codes import (
    Branch,
    CodeParams,
    DecoderSpec,
    LocalCode,
    certify_average_smooth_code,
    certify_ldc,
    certify_smooth_code,
    expected_output,
    ldc_to_smooth,
    smooth_to_ldc,
    success_table,
)
from .config import LIMITS, TOL, CapacityError, DegradedError, VerificationError
from .fourier import BooleanFunction, cube_points, fourier_transform, popcounts, smoothness
from .outlaw import (
    DeviationEstimate,
    OutlawDistribution,
    deviation,
    kappa_scan,
    max_smoothness,
    normalize_smooth,
    truncate_distribution,
    truncation_degree,
)

SMOOTH_TOL = 1e-7  # slack on "1-smooth" gates, absorbing rescaling round-off
SYMMETRIZATION_SLACK = 3.0  # standard errors allowed below deviation/2


def _require_smooth(mu: OutlawDistribution, what: str) -> None:
    sigma = max_smoothness(mu)
    if sigma > 1.0 + SMOOTH_TOL:
        raise ValueError(f"{what}: support is not 1-smooth (sigma = {sigma:.6g})")


@dataclass
class FixedFamily:
    """A fixed k-tuple of support functions chosen for a large signed sum.

    ``score`` is E_x || (1/k) sum x_i f_i ||_inf and ``achieved_value`` is
    E_x max_z (1/k) sum x_i f_i(z); the latter is exactly twice the average
    decoding advantage of the code built from the family.
    """

    n: int
    table: np.ndarray
    support_indices: tuple[int, ...]
    score: float
    achieved_value: float
    deviation: DeviationEstimate
    threshold: float
    exact_x: bool
    degraded: bool
    reason: str = ""

    @property
    def k(self) -> int:
        return self.table.shape[0]

    @property
    def functions(self) -> list[BooleanFunction]:
        return [BooleanFunction(self.n, row) for row in self.table]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "n": self.n,
            "support_indices": list(self.support_indices),
            "score": self.score,
            "achieved_value": self.achieved_value,
            "deviation": self.deviation.to_dict(),
            "threshold": self.threshold,
            "exact_x": self.exact_x,
            "degraded": self.degraded,
            "reason": self.reason,
        }


def _sign_vectors(k: int, x_budget: int, rng: np.random.Generator) -> tuple[np.ndarray, bool]:
    if (1 << k) <= x_budget:
        return cube_points(k).astype(np.float64), True
    return rng.choice([-1.0, 1.0], size=(x_budget, k)), False


def _signed_sums(xs: np.ndarray, table: np.ndarray):
    """Yield chunks of (1/k) sum_i x_i f_i over all points, one row per x."""
    k = table.shape[0]
    step = max(1, (1 << 22) // table.shape[1])
    for start in range(0, len(xs), step):
        yield (xs[start:start + step] @ table) / k


def family_values(xs: np.ndarray, table: np.ndarray) -> tuple[float, float]:
    """(E_x sup-norm, E_x signed max) of (1/k) sum x_i f_i over the rows of xs."""
    sup = signed = 0.0
    for g in _signed_sums(xs, table):
        sup += float(np.abs(g).max(axis=1).sum())
        signed += float(g.max(axis=1).sum())
    return sup / len(xs), signed / len(xs)


def fix_family(
    mu: OutlawDistribution,
    k: int,
    rounds: int = 64,
    x_budget: int = 4096,
    seed: int = 0,
    trials: int = 1000,
) -> FixedFamily:
    """Sample candidate k-tuples from mu and keep the best-scoring one.

    Scores are exact over all 2^k sign vectors when 2^k <= x_budget. The family
    is flagged degraded when mu shows no positive deviation at k, or when the
    best score falls below deviation/2 minus the symmetrization slack.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    _require_smooth(mu, "fix_family")
    ss = np.random.SeedSequence(seed)
    dev_seed, draw_seed = (int(s) for s in ss.generate_state(2, dtype=np.uint64))
    dev = deviation(mu, k, trials, dev_seed)
    rng = np.random.default_rng(draw_seed)
    xs, exact = _sign_vectors(k, x_budget, rng)
    best = None
    for _ in range(max(rounds, 1)):
        idx = rng.choice(len(mu.weights), size=k, p=mu.weights)
        sup, signed = family_values(xs, mu.table[idx])
        if best is None or sup > best[0] + 1e-15:
            best = (sup, signed, idx)
    sup, signed, idx = best
    threshold = dev.mean_deviation / 2 - SYMMETRIZATION_SLACK * dev.std_error
    reason = ""
    if dev.mean_deviation - LIMITS.slack_sigmas * dev.std_error <= TOL:
        reason = "no positive deviation at this k"
    elif sup < threshold - TOL:
        reason = "best score below deviation/2"
    return FixedFamily(mu.n, mu.table[idx].copy(), tuple(int(i) for i in idx), sup, signed, dev,
                       threshold, exact, bool(reason), reason)


def build_code(family: FixedFamily, cap: int | None = None, tol: float = TOL) -> LocalCode:
    """C(x) = argmax_z sum_i x_i f_i(z), ties to the smallest mask."""
    cap = LIMITS.code_message_bits if cap is None else cap
    if family.k > cap:
        raise CapacityError(f"k={family.k} exceeds cap {cap}")
    xs = cube_points(family.k).astype(np.float64)
    picks = []
    for g in _signed_sums(xs, family.table):
        top = g.max(axis=1, keepdims=True)
        picks.append(np.argmax(g >= top - tol, axis=1))
    z = np.concatenate(picks)
    return LocalCode(family.k, family.n, cube_points(family.n)[z])


def decoder_from_function(f: BooleanFunction, tol: float = 1e-15) -> tuple[Branch, ...]:
    """Branches whose expected output is f, for f of spectral norm at most 1.

    Character chi_S is read with probability |f_hat(S)| and reported with the
    sign of f_hat(S); the remaining mass outputs a uniform sign.
    """
    spec = fourier_transform(f)
    c = spec.coeffs
    total = float(np.abs(c).sum())
    if total > 1.0 + SMOOTH_TOL:
        raise ValueError(f"spectral norm {total:.6g} exceeds 1")
    scale = 1.0 / total if total > 1.0 else 1.0
    branches = []
    for s in np.flatnonzero(np.abs(c) > tol):
        s = int(s)
        queries = tuple(i for i in range(f.n) if s >> i & 1)
        sign = 1.0 if c[s] > 0 else -1.0
        table = sign * (1.0 - 2.0 * (popcounts(len(queries)) & 1))
        branches.append(Branch(abs(c[s]) * scale, queries, table))
    rest = 1.0 - sum(b.p for b in branches)
    if rest > 1e-15:
        branches.append(Branch(rest, (), np.zeros(1)))
    elif branches:
        # absorb round-off so the probabilities sum to exactly one
        b = branches[-1]
        branches[-1] = Branch(b.p + rest, b.queries, b.table)
    return tuple(branches)


def build_decoders(family: FixedFamily) -> DecoderSpec:
    decs = tuple(decoder_from_function(f) for f in family.functions)
    q = max((len(b.queries) for d in decs for b in d), default=0)
    return DecoderSpec(max(q, 1), decs)


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Distinct points of [-1,1]^k together with one preimage mask for each."""

    k: int
    points: np.ndarray
    preimages: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, self.k)
        if np.any(np.abs(pts) > 1 + TOL):
            raise ValueError("points must lie in [-1, 1]^k")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "preimages", np.asarray(self.preimages, dtype=np.int64).reshape(-1))

    @classmethod
    def from_points(cls, points) -> "PointCloud":
        pts = np.asarray(points, dtype=np.float64)
        return cls(pts.shape[1], pts, np.arange(len(pts)))


def point_cloud(dec: DecoderSpec, n: int) -> PointCloud:
    """T = {(f_1(z), ..., f_k(z))} for the expected decoding functions f_i."""
    z = cube_points(n)
    vals = np.stack([expected_output(dec, i, z) for i in range(dec.k)], axis=1)
    _, first = np.unique(np.round(vals, 12), axis=0, return_index=True)
    first = np.sort(first)
    return PointCloud(dec.k, vals[first], first)


@dataclass(frozen=True)
class CubeStructure:
    """Coordinates sigma, shift s and width w such that every sign pattern on
    sigma is realized by some point t with (t_i - s_i) x_i >= w/2.

    ``assignment[u]`` is the point index used for pattern mask u (bit r set
    means x at sigma[r] is -1).
    """

    sigma: tuple[int, ...]
    shift: tuple[float, ...]
    width: float
    assignment: tuple[int, ...]
    exhaustive: bool = True
    checks: int = 0

    @property
    def size(self) -> int:
        return len(self.sigma)

    def verify(self, cloud: PointCloud, tol: float = TOL) -> bool:
        s = np.array(self.shift)
        for u, t in enumerate(self.assignment):
            x = 1.0 - 2.0 * ((u >> np.arange(self.size)) & 1)
            if np.any((cloud.points[t, list(self.sigma)] - s) * x < self.width / 2 - tol):
                return False
        return len(self.assignment) == 1 << self.size

    def to_dict(self) -> dict:
        return asdict(self)


def _feasible_shift(pts: np.ndarray, sigma: tuple[int, ...], w: float, tol: float, budget: list[int]):
    """Backtracking search for a shift on sigma; returns (shift, assignment) or None."""
    half = w / 2

    def rec(depth, groups, shift):
        budget[0] -= 1
        if budget[0] < 0:
            return None
        if depth == len(sigma):
            return shift, groups
        c = sigma[depth]
        col = pts[:, c]
        lo, hi = -1.0, 1.0
        for g in groups.values():
            vals = col[g]
            lo = max(lo, vals.min() + half)
            hi = min(hi, vals.max() - half)
        if lo > hi + tol:
            return None
        grid = np.concatenate([col - half, col + half, [lo, hi]])
        grid = np.unique(grid[(grid >= lo - tol) & (grid <= hi + tol)])
        seen = set()
        for s in grid:
            new = {}
            for u, g in groups.items():
                vals = col[g]
                new[u] = g[vals - s >= half - tol]
                new[u | (1 << depth)] = g[s - vals >= half - tol]
            key = tuple(tuple(new[u]) for u in sorted(new))
            if key in seen or any(len(g) == 0 for g in new.values()):
                continue
            seen.add(key)
            found = rec(depth + 1, new, shift + [float(s)])
            if found is not None:
                return found
            if budget[0] < 0:
                return None
        return None

    found = rec(0, {0: np.arange(len(pts))}, [])
    if found is None:
        return None
    shift, groups = found
    return tuple(shift), tuple(int(groups[u][0]) for u in range(1 << len(sigma)))


def vc_search(
    cloud: PointCloud,
    w: float,
    max_size: int | None = None,
    max_checks: int = 200_000,
    tol: float = TOL,
) -> CubeStructure:
    """Largest certified cube structure of width w, searched level by level.

    Candidate coordinate sets grow one coordinate at a time and are kept only
    if all their subsets were feasible. For each candidate set the shift is
    searched over the finite grid {t_i +- w/2}, which loses no feasible shift.
    When the work budget runs out the best structure so far is returned with
    ``exhaustive=False``; it is still a valid lower-bound certificate.
    """
    if not 0 < w <= 2 + TOL:
        raise ValueError("width must lie in (0, 2]")
    if len(cloud.points) == 0:
        raise ValueError("empty point cloud")
    k = cloud.k
    max_size = k if max_size is None else min(max_size, k)
    budget = [max_checks]
    best = CubeStructure((), (), w, (0,), True, 0)
    level = {(): best}
    exhaustive = True
    for size in range(1, max_size + 1):
        nxt = {}
        for sig in level:
            for c in range((sig[-1] + 1) if sig else 0, k):
                cand = sig + (c,)
                if size > 1 and any(cand[:r] + cand[r + 1:] not in level for r in range(size)):
                    continue
                found = _feasible_shift(cloud.points, cand, w, tol, budget)
                if budget[0] < 0:
                    exhaustive = False
                    break
                if found is not None:
                    nxt[cand] = CubeStructure(cand, found[0], w, found[1], True, 0)
            if not exhaustive:
                break
        if nxt:
            best = nxt[min(nxt)]
        if not exhaustive or not nxt:
            break
        level = nxt
    used = max_checks - max(budget[0], 0)
    return CubeStructure(best.sigma, best.shift, w, best.assignment, exhaustive, used)


@dataclass
class GaussianWidth:
    estimate: float
    std_error: float
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def gaussian_width(cloud: PointCloud | np.ndarray, trials: int = 10_000, seed: int = 0) -> GaussianWidth:
    """Monte Carlo E_g sup_t <g, t> with an exact sup per Gaussian draw."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.asarray(cloud, dtype=np.float64)
    if pts.size == 0 or len(pts) == 0:
        raise ValueError("empty point set")
    pts = pts.reshape(len(pts), -1)
    rng = np.random.default_rng(seed)
    vals = np.empty(trials)
    step = max(1, (1 << 22) // len(pts))
    for start in range(0, trials, step):
        m = min(step, trials - start)
        g = rng.standard_normal((m, pts.shape[1]))
        vals[start:start + m] = (g @ pts.T).max(axis=1)
    se = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return GaussianWidth(float(vals.mean()), se, trials, seed)


def width_grid(levels: int = 7) -> list[float]:
    return [2.0 ** (1 - j) for j in range(levels)]


@dataclass
class AvgToLdcResult:
    code: LocalCode
    decoders: DecoderSpec
    structure: CubeStructure
    smooth_params: CodeParams
    ldc_params: CodeParams
    min_bias: float
    smooth_report: object
    ldc_report: object
    width_scan: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "message_length": self.code.k,
            "n": self.code.n,
            "structure": self.structure.to_dict(),
            "smooth_params": asdict(self.smooth_params),
            "ldc_params": asdict(self.ldc_params),
            "min_bias": self.min_bias,
            "smooth_report": self.smooth_report.to_dict(),
            "ldc_report": self.ldc_report.to_dict(),
            "width_scan": self.width_scan,
        }


def wrap_decoders(dec: DecoderSpec, structure: CubeStructure) -> DecoderSpec:
    """Re-randomize outputs so that E[A'_i] = (E[A_i] - s_i) / 2 on sigma."""
    out = []
    for i, s in zip(structure.sigma, structure.shift):
        out.append(tuple(Branch(b.p, b.queries, (b.table - s) / 2) for b in dec.decoders[i]))
    return DecoderSpec(dec.q, tuple(out))


def avg_to_ldc(
    code: LocalCode,
    dec: DecoderSpec,
    params: CodeParams,
    w: float | None = None,
    widths: list[float] | None = None,
    verify: str = "exhaustive",
    seed: int = 0,
    max_checks: int = 200_000,
    tol: float = TOL,
) -> AvgToLdcResult:
    """Turn an average-case smooth code into an LDC on a cube structure.

    With ``w`` unset, every width in the grid is searched and the structure
    maximizing |sigma| * w is kept. The wrapped code is certified as a
    (q, c, w/8)-smooth code (per-pattern bias at least w/4) and then passed
    through the smooth-to-LDC conversion, whose claim is re-checked by the
    adversary in mode ``verify``.
    """
    if params.c is None:
        raise ValueError("avg_to_ldc needs params.c")
    cloud = point_cloud(dec, code.n)
    grid = [w] if w is not None else (widths or width_grid())
    scan, best = [], None
    for width in grid:
        st = vc_search(cloud, width, max_checks=max_checks, tol=tol)
        scan.append({"w": width, "size": st.size, "exhaustive": st.exhaustive})
        if st.size and (best is None or st.size * width > best.size * best.width + TOL):
            best = st
    if best is None:
        raise DegradedError("no cube structure of positive size at any width")
    if not best.verify(cloud, tol):
        raise VerificationError("cube structure failed re-verification")
    z = cloud.preimages[list(best.assignment)]
    new_code = LocalCode(best.size, code.n, cube_points(code.n)[z])
    new_dec = wrap_decoders(dec, best)
    bias = 2 * success_table(new_code, new_dec) - 1
    min_bias = float(bias.min())
    if min_bias < best.width / 4 - tol:
        raise VerificationError(f"wrapped bias {min_bias:.6g} below w/4 = {best.width / 4:.6g}")
    smooth_params = CodeParams(q=params.q, eta=min(best.width / 8, 0.5), c=params.c)
    smooth_report = certify_smooth_code(new_code, new_dec, smooth_params, tol)
    if not smooth_report.passed:
        raise VerificationError("wrapped code failed the smooth-code check")
    ldc_params = smooth_to_ldc(new_code, new_dec, smooth_params, verify=None)
    ldc_report = certify_ldc(new_code, new_dec, ldc_params, mode=verify, seed=seed)
    return AvgToLdcResult(new_code, new_dec, best, smooth_params, ldc_params, min_bias,
                          smooth_report, ldc_report, scan)


@dataclass
class OutlawWitness:
    """Evidence that the expected decoders of an LDC form an outlaw."""

    passed: bool
    eta: float
    l: int
    k: int
    trials: int
    seed: int
    mean_sup: float
    sup_std_error: float
    mean_witness: float
    min_witness: float
    min_codeword_bias: float
    max_degree: int
    max_smoothness: float
    smoothness_bound: float
    normalization: float
    normalized_epsilon: float
    guaranteed_epsilon: float
    reason: str = ""

    def to_dict(self) -> dict:
        return asdict(self)


def ldc_to_outlaw(
    code: LocalCode,
    dec: DecoderSpec,
    params: CodeParams,
    trials: int = 1000,
    seed: int = 0,
    tol: float = TOL,
) -> tuple[OutlawDistribution, OutlawWitness]:
    """Uniform distribution over the expected decoding functions of an LDC.

    Decoders are first made smooth, then each f_i(z) = E[A_i(z)] is tabulated
    and audited (degree <= q, sigma <= q 2^{q/2} / delta). The returned
    distribution is rescaled to be 1-smooth. The witness replays the lower
    bound argument on the unscaled functions: for l = floor(eta k) random
    indices, the message that is +1 exactly on the drawn indices is encoded
    and the deviation of the drawn average is evaluated there and as a full
    sup-norm.
    """
    if params.delta is None:
        raise ValueError("ldc_to_outlaw needs params.delta")
    sdec, _ = ldc_to_smooth(code, dec, params)
    z = cube_points(code.n)
    table = np.stack([expected_output(sdec, i, z) for i in range(code.k)])
    spectra = [fourier_transform(BooleanFunction(code.n, row)) for row in table]
    max_deg = max(s.degree() for s in spectra)
    sigmas = [smoothness(s) for s in spectra]
    bound = params.q * 2 ** (params.q / 2) / params.delta
    if max_deg > params.q:
        raise VerificationError(f"expected decoder has degree {max_deg} > q={params.q}")
    if max(sigmas) > bound * (1 + 1e-9) + tol:
        raise VerificationError(f"expected decoder smoothness {max(sigmas):.6g} exceeds {bound:.6g}")
    raw = OutlawDistribution(code.n, np.full(code.k, 1.0 / code.k), table)
    mu = normalize_smooth(raw)
    norm = max(max(sigmas), 1.0)

    signs = cube_points(code.k).astype(np.float64)
    bias = np.array([[signs[x, i] * table[i, _mask_index(code.codewords[x])] for i in range(code.k)]
                     for x in range(1 << code.k)])
    min_bias = float(bias.min())

    l = int(math.floor(params.eta * code.k + 1e-9))
    ss = np.random.SeedSequence(seed)
    rng = np.random.default_rng(ss)
    reason = ""
    if l < 1:
        reason = "eta * k < 1, no witness sample size"
        sups = wits = np.zeros(1)
    else:
        gbar = table.mean(axis=0)
        sups = np.empty(trials)
        wits = np.empty(trials)
        for t in range(trials):
            picks = rng.integers(code.k, size=l)
            avg = table[picks].mean(axis=0) - gbar
            sups[t] = np.abs(avg).max()
            drawn = np.zeros(code.k, dtype=bool)
            drawn[picks] = True
            x = int(sum(1 << i for i in range(code.k) if not drawn[i]))
            wits[t] = avg[_mask_index(code.codewords[x])]
    se = float(sups.std(ddof=1) / math.sqrt(len(sups))) if len(sups) > 1 else 0.0
    mean_sup = float(sups.mean())
    if not reason and mean_sup - LIMITS.slack_sigmas * se < params.eta - tol:
        reason = "witness deviation below eta"
    witness = OutlawWitness(
        passed=not reason,
        eta=params.eta,
        l=l,
        k=code.k,
        trials=trials if l >= 1 else 0,
        seed=seed,
        mean_sup=mean_sup,
        sup_std_error=se,
        mean_witness=float(wits.mean()),
        min_witness=float(wits.min()),
        min_codeword_bias=min_bias,
        max_degree=max_deg,
        max_smoothness=float(max(sigmas)),
        smoothness_bound=bound,
        normalization=norm,
        normalized_epsilon=params.eta / norm,
        guaranteed_epsilon=params.eta * params.delta / (params.q * 2 ** (params.q / 2)),
        reason=reason,
    )
    return mu, witness


def _mask_index(word) -> int:
    word = np.asarray(word)
    return int(np.sum((word < 0).astype(np.int64) << np.arange(len(word))))


@dataclass
class PipelineReport:
    passed: bool
    degraded_stage: str | None
    epsilon: float
    seed: int
    stages: list = field(default_factory=list)
    final: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def outlaw_to_ldc_pipeline(
    mu: OutlawDistribution,
    epsilon: float,
    seed: int = 0,
    k: int | None = None,
    k_max: int = 8,
    rounds: int = 64,
    x_budget: int = 4096,
    trials: int = 1000,
    verify: str = "exhaustive",
) -> PipelineReport:
    """Outlaw -> truncated outlaw -> average-case smooth code -> LDC.

    ``k`` defaults to the conservative kappa estimate of the truncated
    distribution at epsilon/2 (at least 1). Stages stop at the first degraded
    certificate; a non-1-smooth input is rejected with ``ValueError``.
    """
    _require_smooth(mu, "pipeline")
    seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(4, dtype=np.uint64)]
    report = PipelineReport(False, None, epsilon, seed)

    q = truncation_degree(epsilon)
    mu_t = truncate_distribution(mu, epsilon)
    report.stages.append({"stage": "truncate", "passed": True, "degree": q,
                          "max_degree": max(s.degree() for s in mu_t.spectra())})

    if k is None:
        scan = kappa_scan(mu_t, epsilon / 2, trials, seeds[0], k_max)
        k = max(scan.conservative, 1)
        report.stages.append({"stage": "kappa", "passed": scan.conservative >= 1, **scan.to_dict()})

    fam = fix_family(mu_t, k, rounds, x_budget, seeds[1], trials)
    report.stages.append({"stage": "fix_family", "passed": not fam.degraded, **fam.to_dict()})
    if fam.degraded:
        report.degraded_stage = "fix_family"
        return report

    code = build_code(fam)
    dec = build_decoders(fam)
    eps_k = fam.deviation.mean_deviation - LIMITS.slack_sigmas * fam.deviation.std_error
    avg_params = CodeParams(q=dec.q, eta=min(eps_k / 8, 0.5), c=1.0)
    avg = certify_average_smooth_code(code, dec, avg_params, seed=seeds[2])
    report.stages.append({"stage": "average_code", **avg.to_dict(), "eta": avg_params.eta})
    if not avg.passed:
        report.degraded_stage = "average_code"
        return report

    try:
        res = avg_to_ldc(code, dec, CodeParams(q=dec.q, eta=avg_params.eta, c=1.0), verify=verify, seed=seeds[3])
    except (DegradedError, VerificationError) as exc:
        report.stages.append({"stage": "avg_to_ldc", "passed": False, "error": str(exc)})
        report.degraded_stage = "avg_to_ldc"
        return report
    report.stages.append({"stage": "avg_to_ldc", "passed": res.ldc_report.passed, **res.to_dict()})
    p = res.ldc_params
    report.final = {"q": p.q, "delta": p.delta, "eta": p.eta, "l": res.code.k, "n": res.code.n}
    report.passed = bool(res.ldc_report.passed)
    if not report.passed:
        report.degraded_stage = "avg_to_ldc"
    return report
