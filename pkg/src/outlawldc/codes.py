"""Codes with randomized non-adaptive local decoders, evaluated exactly.

Messages and codewords live in {-1,1}. A message x in {-1,1}^k is addressed by
its k-bit mask (bit i set means x_i = -1), matching the cube convention of
:mod:`outlawldc.fourier`. A decoder for index i is a finite list of branches;
each branch is taken with probability ``p``, reads the coordinates ``queries``
of the received word and outputs a random sign whose mean is
``table[pattern]``, where bit r of ``pattern`` is set iff the r-th queried
coordinate reads -1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np

from .config import LIMITS, TOL, BudgetExceeded, CapacityError, VerificationError
from .fourier import BooleanFunction, cube_points


@dataclass(frozen=True, eq=False)
class LocalCode:
    k: int
    n: int
    codewords: np.ndarray

    def __post_init__(self):
        cw = np.asarray(self.codewords, dtype=np.int8)
        if cw.shape != (1 << self.k, self.n):
            raise ValueError(f"codewords must have shape {(1 << self.k, self.n)}, got {cw.shape}")
        if not np.all(np.abs(cw) == 1):
            raise ValueError("codeword entries must be +-1")
        cw = cw.copy()
        cw.setflags(write=False)
        object.__setattr__(self, "codewords", cw)

    def encode(self, x: int) -> np.ndarray:
        return self.codewords[x]


def message_sign(x: int, i: int) -> int:
    """x_i for the message with mask ``x``."""
    return -1 if (x >> i) & 1 else 1


@dataclass(frozen=True, eq=False)
class Branch:
    p: float
    queries: tuple[int, ...]
    table: np.ndarray

    def __post_init__(self):
        q = tuple(int(j) for j in self.queries)
        t = np.asarray(self.table, dtype=np.float64).reshape(-1)
        if t.shape != (1 << len(q),):
            raise ValueError(f"table for {len(q)} queries needs {1 << len(q)} entries, got {t.size}")
        if len(set(q)) != len(q):
            raise ValueError(f"repeated query coordinate in {q}")
        if self.p < -TOL:
            raise ValueError(f"negative branch probability {self.p}")
        if np.any(np.abs(t) > 1 + TOL):
            raise ValueError("output table values must lie in [-1, 1]")
        t = t.copy()
        t.setflags(write=False)
        object.__setattr__(self, "queries", q)
        object.__setattr__(self, "table", t)
        object.__setattr__(self, "p", float(self.p))


@dataclass(frozen=True, eq=False)
class DecoderSpec:
    """Per-index branch lists; ``q`` is the declared query bound."""

    q: int
    decoders: tuple[tuple[Branch, ...], ...]

    def __post_init__(self):
        decs = tuple(tuple(d) for d in self.decoders)
        object.__setattr__(self, "decoders", decs)
        for i, branches in enumerate(decs):
            total = sum(b.p for b in branches)
            if abs(total - 1.0) > TOL:
                raise ValueError(f"branch probabilities for index {i} sum to {total}, not 1")
            for b in branches:
                if len(b.queries) > self.q:
                    raise ValueError(f"index {i} has a branch with {len(b.queries)} > q={self.q} queries")

    @property
    def k(self) -> int:
        return len(self.decoders)

    @cached_property
    def _compiled(self):
        # per index: list of (probs (B,), queries (B, s), tables (B, 2^s)) grouped by s
        out = []
        for branches in self.decoders:
            groups: dict[int, list[Branch]] = {}
            for b in branches:
                groups.setdefault(len(b.queries), []).append(b)
            out.append([
                (
                    np.array([b.p for b in bs]),
                    np.array([b.queries for b in bs], dtype=np.int64).reshape(len(bs), s),
                    np.array([b.table for b in bs]).reshape(len(bs), 1 << s),
                )
                for s, bs in sorted(groups.items())
            ])
        return out

    def max_query(self) -> int:
        return max((len(b.queries) for d in self.decoders for b in d), default=0)


@dataclass(frozen=True)
class CodeParams:
    """(q, delta, eta) for an LDC, (q, c, eta) for a smooth code."""

    q: int
    eta: float
    delta: float | None = None
    c: float | None = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be at least 1")
        if not 0 < self.eta <= 0.5 + TOL:
            raise ValueError(f"eta must lie in (0, 1/2], got {self.eta}")
        if self.delta is not None and not 0 < self.delta <= 0.5 + TOL:
            raise ValueError(f"delta must lie in (0, 1/2], got {self.delta}")
        if self.c is not None and not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")


def expected_output(dec: DecoderSpec, i: int, words) -> np.ndarray:
    """E[A_i(y)] for every +-1 word y along the last axis of ``words``."""
    words = np.asarray(words)
    neg = words < 0
    total = np.zeros(words.shape[:-1])
    for probs, queries, tables in dec._compiled[i]:
        s = queries.shape[1]
        if s == 0:
            total = total + float(probs @ tables[:, 0])
            continue
        idx = (neg[..., queries].astype(np.int64) << np.arange(s)).sum(-1)
        vals = tables[np.arange(len(probs)), idx]
        total = total + vals @ probs
    return total


def expected_function(dec: DecoderSpec, i: int, n: int) -> BooleanFunction:
    """The expected decoding function z -> E[A_i(z)] on {-1,1}^n."""
    return BooleanFunction(n, expected_output(dec, i, cube_points(n)))


def sample_decoder(dec: DecoderSpec, i: int, y, rng: np.random.Generator) -> int:
    """Draw one +-1 output of A_i(y)."""
    branches = dec.decoders[i]
    b = branches[rng.choice(len(branches), p=[br.p for br in branches])]
    y = np.asarray(y)
    pattern = sum(1 << r for r, j in enumerate(b.queries) if y[j] < 0)
    return 1 if rng.random() < (1 + b.table[pattern]) / 2 else -1


def decode_success(code: LocalCode, dec: DecoderSpec, i: int, x: int, y) -> float:
    """Exact Pr[A_i(y) = x_i]."""
    y = np.asarray(y)
    if y.shape[-1] != code.n:
        raise ValueError(f"word length {y.shape[-1]} != n={code.n}")
    return 0.5 + 0.5 * message_sign(x, i) * float(expected_output(dec, i, y))


def success_table(code: LocalCode, dec: DecoderSpec) -> np.ndarray:
    """(2^k, k) array of Pr[A_i(C(x)) = x_i] on uncorrupted codewords."""
    signs = cube_points(code.k).astype(np.float64)
    out = np.empty((1 << code.k, code.k))
    for i in range(code.k):
        out[:, i] = 0.5 + 0.5 * signs[:, i] * expected_output(dec, i, code.codewords)
    return out


def query_distribution(dec: DecoderSpec, i: int, n: int) -> np.ndarray:
    """Probability that A_i reads coordinate j, for each j < n."""
    load = np.zeros(n)
    for b in dec.decoders[i]:
        for j in b.queries:
            load[j] += b.p
    return load


def hadamard_code(k: int, cap: int | None = None) -> tuple[LocalCode, DecoderSpec]:
    """Hadamard code: position S holds chi_S(x); decoder i reads {S, S xor i}."""
    cap = LIMITS.code_message_bits if cap is None else cap
    if k > cap:
        raise CapacityError(f"k={k} exceeds cap {cap}")
    n = 1 << k
    x = np.arange(n)[:, None]
    s = np.arange(n)[None, :]
    par = np.zeros((n, n), dtype=np.int64)
    for b in range(k):
        par ^= ((x & s) >> b) & 1
    codewords = 1 - 2 * par
    parity_table = np.array([1.0, -1.0, -1.0, 1.0])
    decoders = tuple(
        tuple(Branch(1.0 / n, (S, S ^ (1 << i)), parity_table) for S in range(n))
        for i in range(k)
    )
    return LocalCode(k, n, codewords), DecoderSpec(2, decoders)


def identity_code(k: int) -> tuple[LocalCode, DecoderSpec]:
    """C(x) = x with decoder i reading coordinate i."""
    code = LocalCode(k, k, cube_points(k))
    read = np.array([1.0, -1.0])
    return code, DecoderSpec(1, tuple((Branch(1.0, (i,), read),) for i in range(k)))


@dataclass
class SmoothCodeReport:
    passed: bool
    min_success: float
    threshold: float
    worst_message: int
    worst_index: int
    max_load: float
    load_bound: float
    worst_coordinate: int
    max_query_size: int
    q: int

    def to_dict(self) -> dict:
        return asdict(self)


def _load_audit(code: LocalCode, dec: DecoderSpec) -> tuple[float, int]:
    loads = np.array([query_distribution(dec, i, code.n) for i in range(dec.k)])
    if loads.size == 0:
        return 0.0, 0
    flat = int(np.argmax(loads))
    return float(loads.flat[flat]), flat % code.n


def certify_smooth_code(code: LocalCode, dec: DecoderSpec, params: CodeParams, tol: float = TOL) -> SmoothCodeReport:
    """Check every clause of the (q, c, eta)-smooth code definition exhaustively."""
    if params.c is None:
        raise ValueError("smooth-code certification needs params.c")
    if dec.k != code.k:
        raise ValueError(f"decoder count {dec.k} != k={code.k}")
    succ = success_table(code, dec)
    flat = int(np.argmin(succ)) if succ.size else 0
    min_success = float(succ.flat[flat]) if succ.size else 1.0
    max_load, worst_j = _load_audit(code, dec)
    threshold = 0.5 + params.eta
    bound = params.c / code.n
    maxq = dec.max_query()
    passed = min_success >= threshold - tol and max_load <= bound + tol and maxq <= params.q
    return SmoothCodeReport(
        passed=bool(passed),
        min_success=min_success,
        threshold=threshold,
        worst_message=flat // max(code.k, 1),
        worst_index=flat % max(code.k, 1),
        max_load=max_load,
        load_bound=bound,
        worst_coordinate=worst_j,
        max_query_size=maxq,
        q=params.q,
    )


@dataclass
class AverageCaseReport:
    passed: bool
    average_success: float
    std_error: float
    exact: bool
    samples: int
    threshold: float
    max_load: float
    load_bound: float
    max_query_size: int
    q: int

    def to_dict(self) -> dict:
        return asdict(self)


def certify_average_smooth_code(
    code: LocalCode,
    dec: DecoderSpec,
    params: CodeParams,
    budget: int | None = None,
    samples: int = 20_000,
    seed: int = 0,
    tol: float = TOL,
) -> AverageCaseReport:
    """Average of Pr[A_i(C(x)) = x_i] over uniform x and i, exact within ``budget``.

    Above the budget the average is estimated from ``samples`` random (x, i)
    pairs and the check subtracts the configured number of standard errors.
    """
    if params.c is None:
        raise ValueError("average-case certification needs params.c")
    budget = LIMITS.average_pairs if budget is None else budget
    if (1 << code.k) * code.k <= budget:
        avg, se, exact, m = float(success_table(code, dec).mean()), 0.0, True, (1 << code.k) * code.k
    else:
        rng = np.random.default_rng(seed)
        xs = rng.integers(0, 1 << code.k, size=samples)
        idx = rng.integers(0, code.k, size=samples)
        vals = np.empty(samples)
        for i in range(code.k):
            sel = idx == i
            if sel.any():
                e = expected_output(dec, i, code.codewords[xs[sel]])
                sign = 1 - 2 * ((xs[sel] >> i) & 1)
                vals[sel] = 0.5 + 0.5 * sign * e
        avg, se, exact, m = float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)), False, samples
    max_load, _ = _load_audit(code, dec)
    threshold = 0.5 + params.eta
    bound = params.c / code.n
    lower = avg - LIMITS.slack_sigmas * se
    passed = lower >= threshold - tol and max_load <= bound + tol and dec.max_query() <= params.q
    return AverageCaseReport(bool(passed), avg, se, exact, m, threshold, max_load, bound, dec.max_query(), params.q)


@dataclass
class AdversaryResult:
    success: float
    witness: tuple[int, ...]
    mode: str
    heuristic: bool
    flips_allowed: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = list(self.witness)
        return d


def max_flips(delta: float, n: int) -> int:
    return int(math.floor(delta * n + 1e-9))


def _exhaustive_count(n: int, r: int) -> int:
    return sum(math.comb(n, j) for j in range(r + 1))


def adversarial_success(
    code: LocalCode,
    dec: DecoderSpec,
    i: int,
    x: int,
    delta: float,
    mode: str = "exhaustive",
    budget: int | None = None,
    restarts: int = 8,
    seed: int = 0,
) -> AdversaryResult:
    """Worst success of A_i over words within distance floor(delta n) of C(x).

    ``exhaustive`` returns the exact minimum; ``greedy`` returns the best value
    found by greedy flip trajectories, which upper-bounds the true minimum.
    """
    if mode not in ("exhaustive", "greedy"):
        raise ValueError(f"unknown adversary mode {mode!r}")
    r = max_flips(delta, code.n)
    cw = code.codewords[x].astype(np.int64)
    sign = message_sign(x, i)

    def succ(words):
        return 0.5 + 0.5 * sign * expected_output(dec, i, words)

    if mode == "exhaustive":
        budget = LIMITS.exhaustive_patterns if budget is None else budget
        total = _exhaustive_count(code.n, r)
        if total > budget:
            raise BudgetExceeded(f"{total} corruption patterns exceed budget {budget}")
        best, witness = float(succ(cw)), ()
        for j in range(1, r + 1):
            combos = np.array(list(itertools.combinations(range(code.n), j)), dtype=np.int64)
            for start in range(0, len(combos), 4096):
                chunk = combos[start:start + 4096]
                words = np.tile(cw, (len(chunk), 1))
                rows = np.arange(len(chunk))[:, None]
                words[rows, chunk] *= -1
                vals = succ(words)
                a = int(np.argmin(vals))
                if vals[a] < best - 1e-15:
                    best, witness = float(vals[a]), tuple(int(c) for c in chunk[a])
        return AdversaryResult(best, witness, mode, False, r)

    rng = np.random.default_rng(seed)
    best, witness = float(succ(cw)), ()
    for restart in range(max(restarts, 1)):
        y = cw.copy()
        flipped: list[int] = []
        if restart > 0 and r > 0:
            j = int(rng.integers(code.n))
            y[j] *= -1
            flipped.append(j)
            v = float(succ(y))
            if v < best - 1e-15:
                best, witness = v, tuple(sorted(flipped))
        while len(flipped) < r:
            cand = np.array([j for j in range(code.n) if j not in flipped], dtype=np.int64)
            words = np.tile(y, (len(cand), 1))
            words[np.arange(len(cand)), cand] *= -1
            vals = succ(words)
            low = vals.min()
            ties = np.flatnonzero(vals <= low + 1e-12)
            pick = int(cand[ties[0]] if restart == 0 else cand[rng.choice(ties)])
            y[pick] *= -1
            flipped.append(pick)
            if low < best - 1e-15:
                best, witness = float(low), tuple(sorted(flipped))
    return AdversaryResult(best, witness, mode, True, r)


@dataclass
class LdcReport:
    passed: bool
    min_success: float
    threshold: float
    worst_message: int
    worst_index: int
    witness: tuple[int, ...]
    mode: str
    heuristic: bool
    flips_allowed: int
    max_query_size: int

    def to_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = list(self.witness)
        return d


def certify_ldc(
    code: LocalCode,
    dec: DecoderSpec,
    params: CodeParams,
    mode: str = "exhaustive",
    budget: int | None = None,
    restarts: int = 8,
    seed: int = 0,
    tol: float = TOL,
) -> LdcReport:
    """Run the adversary on every (x, i) and compare with 1/2 + eta."""
    if params.delta is None:
        raise ValueError("LDC certification needs params.delta")
    worst = None
    for x in range(1 << code.k):
        for i in range(code.k):
            res = adversarial_success(code, dec, i, x, params.delta, mode, budget, restarts, seed)
            if worst is None or res.success < worst[0].success - 1e-15:
                worst = (res, x, i)
    res, x, i = worst if worst else (AdversaryResult(1.0, (), mode, mode == "greedy", 0), 0, 0)
    threshold = 0.5 + params.eta
    passed = res.success >= threshold - tol and dec.max_query() <= params.q
    return LdcReport(bool(passed), res.success, threshold, x, i, res.witness, mode, res.heuristic,
                     res.flips_allowed, dec.max_query())


def _restrict_branch(b: Branch, heavy: set[int]) -> Branch:
    """Drop heavy coordinates from a branch, reading them as the fixed value +1."""
    keep = [r for r, j in enumerate(b.queries) if j not in heavy]
    if len(keep) == len(b.queries):
        return b
    table = np.empty(1 << len(keep))
    for u in range(1 << len(keep)):
        table[u] = b.table[sum(1 << r for t, r in enumerate(keep) if u >> t & 1)]
    return Branch(b.p, tuple(b.queries[r] for r in keep), table)


def ldc_to_smooth(code: LocalCode, dec: DecoderSpec, params: CodeParams) -> tuple[DecoderSpec, CodeParams]:
    """Katz-Trevisan: an LDC's decoders become (q, q/delta, eta)-smooth.

    Coordinates read with probability above q/(delta n) are no longer queried;
    the decoder answers them with a fixed +1. Since fewer than delta n such
    coordinates exist, this is the original decoder run on a word within the
    corruption radius, so the success guarantee carries over.
    """
    if params.delta is None:
        raise ValueError("ldc_to_smooth needs params.delta")
    cap = params.q / (params.delta * code.n)
    new = []
    for i in range(dec.k):
        load = query_distribution(dec, i, code.n)
        heavy = {int(j) for j in np.flatnonzero(load > cap + TOL)}
        new.append(tuple(_restrict_branch(b, heavy) for b in dec.decoders[i]) if heavy else dec.decoders[i])
    return DecoderSpec(dec.q, tuple(new)), CodeParams(q=params.q, eta=params.eta, c=params.q / params.delta)


def smooth_to_ldc(
    code: LocalCode,
    dec: DecoderSpec,
    params: CodeParams,
    verify: str | None = "exhaustive",
    **adversary,
) -> CodeParams:
    """Katz-Trevisan converse: a (q, c, eta)-smooth code is a (q, eta/2c, eta/2)-LDC.

    With ``verify`` set, the claimed LDC property is re-checked by the adversary
    and a :class:`VerificationError` is raised if it fails.
    """
    if params.c is None:
        raise ValueError("smooth_to_ldc needs params.c")
    out = CodeParams(q=params.q, eta=params.eta / 2, delta=min(params.eta / (2 * params.c), 0.5))
    if verify:
        rep = certify_ldc(code, dec, out, mode=verify, **adversary)
        if not rep.passed:
            raise VerificationError(
                f"LDC check failed: success {rep.min_success:.6g} < {rep.threshold:.6g} "
                f"at x={rep.worst_message}, i={rep.worst_index}"
            )
    return out
