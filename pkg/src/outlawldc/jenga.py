"""Matching-partitioned hypergraphs and relative pseudorandomness.

Edge densities use ordered tuples: e_H(W_1..W_t) counts (v_1..v_t) with
v_r in W_r and {v_1..v_t} an edge, so one edge contributes up to t! tuples.
The deviation of J relative to H is max_W |e_J(W)/|E_J| - e_H(W)/|E_H||.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .config import LIMITS, TOL, CapacityError
from .geometry import all_points, line_index_table
from .outlaw import OutlawDistribution


@dataclass(frozen=True)
class Hypergraph:
    """t-uniform multi-hypergraph on vertices 0..v-1."""

    v: int
    t: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.t < 1 or self.v < 0:
            raise ValueError("need t >= 1 and v >= 0")
        edges = tuple(tuple(sorted(int(u) for u in e)) for e in self.edges)
        for e in edges:
            if len(e) != self.t or len(set(e)) != self.t:
                raise ValueError(f"edge {e} does not have {self.t} distinct vertices")
            if e and not (0 <= e[0] and e[-1] < self.v):
                raise ValueError(f"edge {e} has a vertex out of range")
        object.__setattr__(self, "edges", edges)

    def tensor(self) -> np.ndarray:
        """Dense ordered-tuple count tensor of shape (v,)*t."""
        if self.v ** self.t > 1 << 24:
            raise CapacityError(f"dense tensor with {self.v}^{self.t} entries is too large")
        out = np.zeros((self.v,) * self.t)
        for e in self.edges:
            for perm in permutations(e):
                out[perm] += 1
        return out

    def duplicated(self, times: int = 2) -> "Hypergraph":
        return Hypergraph(self.v, self.t, self.edges * times)

    def to_dict(self) -> dict:
        return {"v": self.v, "t": self.t, "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class MatchingPartition:
    """A hypergraph whose edges are split into perfect matchings."""

    base: Hypergraph
    matchings: tuple[tuple[int, ...], ...]
    directions: tuple = ()

    def __post_init__(self):
        ms = tuple(tuple(int(i) for i in m) for m in self.matchings)
        used = sorted(i for m in ms for i in m)
        if used != list(range(len(self.base.edges))):
            raise ValueError("matchings must partition the edge list")
        for m in ms:
            cover = sorted(u for i in m for u in self.base.edges[i])
            if cover != list(range(self.base.v)):
                raise ValueError("each matching must cover every vertex exactly once")
        object.__setattr__(self, "matchings", ms)

    def union(self, draws) -> Hypergraph:
        """Multiset union of the drawn matchings (repeats give parallel edges)."""
        return Hypergraph(self.base.v, self.base.t,
                          tuple(self.base.edges[i] for j in draws for i in self.matchings[j]))

    def to_dict(self) -> dict:
        d = self.base.to_dict()
        d["matchings"] = [list(m) for m in self.matchings]
        return d


def _indicator(v: int, w) -> np.ndarray:
    w = np.asarray(w)
    if w.dtype == bool:
        if w.shape != (v,):
            raise ValueError("boolean indicator has the wrong length")
        return w.astype(np.float64)
    out = np.zeros(v)
    idx = w.astype(np.int64).reshape(-1)
    if len(idx) and (idx.min() < 0 or idx.max() >= v):
        raise ValueError("vertex out of range")
    out[idx] = 1.0
    return out


def induced_count(h: Hypergraph, ws) -> int:
    """Ordered-tuple count e_H(W_1..W_t); each W_r is a vertex list or a boolean mask."""
    if len(ws) != h.t:
        raise ValueError(f"need {h.t} vertex subsets")
    ind = [_indicator(h.v, w) for w in ws]
    total = 0
    for e in h.edges:
        for perm in permutations(e):
            total += all(ind[r][u] for r, u in enumerate(perm))
    return int(total)


def _contract(d: np.ndarray, vecs) -> np.ndarray:
    out = d
    for x in vecs:
        out = np.tensordot(x, out, axes=(0, 0))
    return out


@dataclass
class DeviationResult:
    value: float
    witness: tuple[tuple[int, ...], ...]
    mode: str
    heuristic: bool

    def to_dict(self) -> dict:
        return {"value": self.value, "witness": [list(w) for w in self.witness],
                "mode": self.mode, "heuristic": self.heuristic}


def deviation_tensor(j: Hypergraph, h: Hypergraph) -> np.ndarray:
    if j.v != h.v or j.t != h.t:
        raise ValueError("hypergraphs must share vertices and uniformity")
    if not j.edges or not h.edges:
        raise ValueError("edge sets must be nonempty")
    return j.tensor() / len(j.edges) - h.tensor() / len(h.edges)


def _best_last(c: np.ndarray, tol: float) -> tuple[float, np.ndarray]:
    """max_W |sum_{u in W} c_u| and a maximizing W."""
    pos, neg = c[c > tol].sum(), -c[c < -tol].sum()
    if pos >= neg:
        return float(pos), c > tol
    return float(neg), c < -tol


def _exhaustive(d: np.ndarray, v: int, t: int, tol: float) -> tuple[float, list[np.ndarray]]:
    if t == 1:
        val, w = _best_last(d, tol)
        return val, [w]
    bits = (np.arange(1 << v)[:, None] >> np.arange(v)) & 1
    xs = bits.astype(np.float64)
    best, arg = -1.0, None
    chunk = max(1, (1 << 20) // max(v ** (t - 1), 1))
    if t == 2:
        for start in range(0, 1 << v, chunk):
            c = xs[start:start + chunk] @ d
            pos = np.where(c > tol, c, 0).sum(axis=1)
            neg = -np.where(c < -tol, c, 0).sum(axis=1)
            val = np.maximum(pos, neg)
            i = int(np.argmax(val))
            if val[i] > best + 1e-15:
                best, arg = float(val[i]), start + i
        c = xs[arg] @ d
        _, last = _best_last(c, tol)
        return best, [xs[arg] > 0, last]
    best_ws = None
    for m in range(1 << v):
        sub = np.tensordot(xs[m], d, axes=(0, 0))
        val, ws = _exhaustive(sub, v, t - 1, tol)
        if val > best + 1e-15:
            best, best_ws = val, [xs[m] > 0] + ws
    return best, best_ws


def _local(d: np.ndarray, v: int, t: int, starts, tol: float) -> tuple[float, list[np.ndarray]]:
    """Alternating exact block maximization of +-D(1_W1..1_Wt) from each start."""
    best, arg = -1.0, None
    for start in starts:
        for sign in (1.0, -1.0):
            ws = [np.asarray(w, dtype=np.float64).copy() for w in start]
            cur = sign * float(_contract(d, ws))
            for _ in range(4 * v + 8):
                improved = False
                for r in range(t):
                    others = ws[:r] + ws[r + 1:]
                    c = sign * _contract(np.moveaxis(d, r, -1), others)
                    new = (c > tol).astype(np.float64)
                    val = float(c[c > tol].sum())
                    if val > cur + 1e-12:
                        ws[r], cur, improved = new, val, True
                if not improved:
                    break
            if cur > best + 1e-15:
                best, arg = cur, [w > 0 for w in ws]
    return best, arg


def component_witness(j: Hypergraph) -> np.ndarray:
    """Union of connected components of J holding about half of the vertices.

    Components are added largest first while the union stays at or below v/2.
    """
    parent = list(range(j.v))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for e in j.edges:
        for u in e[1:]:
            ra, rb = find(e[0]), find(u)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, list[int]] = {}
    for u in range(j.v):
        comps.setdefault(find(u), []).append(u)
    w = np.zeros(j.v, dtype=bool)
    size = 0
    for comp in sorted(comps.values(), key=lambda c: (-len(c), c[0])):
        if size + len(comp) <= j.v // 2:
            w[comp] = True
            size += len(comp)
    return w


def components(j: Hypergraph) -> list[list[int]]:
    w_all = []
    seen = np.zeros(j.v, dtype=bool)
    adj = [[] for _ in range(j.v)]
    for e in j.edges:
        for a in e:
            adj[a].extend(u for u in e if u != a)
    for s in range(j.v):
        if seen[s]:
            continue
        stack, comp = [s], []
        seen[s] = True
        while stack:
            a = stack.pop()
            comp.append(a)
            for b in adj[a]:
                if not seen[b]:
                    seen[b] = True
                    stack.append(b)
        w_all.append(sorted(comp))
    return w_all


def pseudorandom_deviation(
    j: Hypergraph,
    h: Hypergraph,
    mode: str = "auto",
    restarts: int = 16,
    seed: int = 0,
    starts=None,
    tol: float = TOL,
) -> DeviationResult:
    """max over subset tuples W of |e_J(W)/|E_J| - e_H(W)/|E_H||.

    ``exhaustive`` enumerates W_1..W_{t-1} and solves the last block exactly,
    which needs (t-1)|V| <= the subset-bit cap. ``local`` returns a certified
    lower bound from alternating block maximization started at all-V, at the
    component witness of J, at any ``starts`` and at random tuples.
    ``auto`` picks exhaustive when it fits.
    """
    d = deviation_tensor(j, h)
    v, t = h.v, h.t
    fits = (t - 1) * v <= LIMITS.subset_bits
    if mode == "auto":
        mode = "exhaustive" if fits else "local"
    if mode == "exhaustive":
        if not fits:
            raise CapacityError(f"(t-1)|V| = {(t - 1) * v} exceeds {LIMITS.subset_bits}")
        val, ws = _exhaustive(d, v, t, tol)
        heuristic = False
    elif mode == "local":
        rng = np.random.default_rng(seed)
        comp = component_witness(j)
        init = [[np.ones(v, dtype=bool)] * t, [comp] * t]
        init += [list(s) for s in (starts or [])]
        init += [list(rng.random((t, v)) < 0.5) for _ in range(restarts)]
        val, ws = _local(d, v, t, [[_indicator(v, w) > 0 for w in s] for s in init], tol)
        heuristic = True
    else:
        raise ValueError(f"unknown mode {mode!r}")
    val = max(val, 0.0)
    witness = tuple(tuple(int(u) for u in np.flatnonzero(w)) for w in ws)
    return DeviationResult(val, witness, mode, heuristic)


@dataclass
class JengaTestResult:
    k: int
    epsilon: float
    trials: int
    seed: int
    probability: float
    std_error: float
    is_jenga: bool
    mode: str
    min_deviation: float
    max_deviation: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def jenga_test(
    part: MatchingPartition,
    k: int,
    epsilon: float,
    trials: int = 100,
    seed: int = 0,
    mode: str = "auto",
    tol: float = TOL,
) -> JengaTestResult:
    """Estimate Pr[deviation(J, H) >= epsilon] for J a union of k matchings
    drawn uniformly with replacement. Trial r uses the r-th spawned seed."""
    if k < 1:
        raise ValueError("k must be at least 1")
    children = np.random.SeedSequence(seed).spawn(trials)
    cache: dict[tuple[int, ...], DeviationResult] = {}
    devs = np.empty(trials)
    used_mode = mode
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        draws = tuple(sorted(int(x) for x in rng.integers(len(part.matchings), size=k)))
        if draws not in cache:
            cache[draws] = pseudorandom_deviation(part.union(draws), part.base, mode, seed=r)
        devs[r] = cache[draws].value
        used_mode = cache[draws].mode
    hits = (devs >= epsilon - tol).astype(np.float64)
    prob = float(hits.mean())
    se = float(math.sqrt(prob * (1 - prob) / trials)) if trials > 1 else 0.0
    return JengaTestResult(k, epsilon, trials, seed, prob, se, prob - 2 * se >= 0.5, used_mode,
                           float(devs.min()), float(devs.max()))


def f2_partition(m: int, cap: int = 10) -> MatchingPartition:
    """Complete graph on F_2^m split into the matchings {x, x+y}, y != 0."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if m > cap:
        raise CapacityError(f"m = {m} exceeds cap {cap}")
    v = 1 << m
    edges, matchings = [], []
    for y in range(1, v):
        idx = []
        for x in range(v):
            if x < x ^ y:
                idx.append(len(edges))
                edges.append((x, x ^ y))
        matchings.append(tuple(idx))
    return MatchingPartition(Hypergraph(v, 2, tuple(edges)), tuple(matchings), tuple(range(1, v)))


def f2_rank(vectors) -> int:
    basis: list[int] = []
    for vec in vectors:
        for b in basis:
            vec = min(vec, vec ^ b)
        if vec:
            basis.append(vec)
    return len(basis)


def f2_connectivity_check(m: int, size: int | None = None) -> dict:
    """For every set of directions (or those of a given size), check that the
    union of their matchings is connected exactly when they span F_2^m."""
    part = f2_partition(m)
    n_dir = len(part.matchings)
    sizes = range(n_dir + 1) if size is None else [size]
    checked = mismatches = 0
    for s in sizes:
        for combo in combinations(range(n_dir), s):
            connected = len(components(part.union(combo))) == 1
            spans = f2_rank([part.directions[c] for c in combo]) == m
            checked += 1
            mismatches += connected != spans
    return {"m": m, "checked": checked, "mismatches": mismatches, "passed": mismatches == 0}


def fp_line_partition(p: int, m: int) -> MatchingPartition:
    """Unordered lines of F_p^m grouped by projective direction."""
    from .geometry import _check_points

    _check_points(p, m)
    pts = all_points(p, m)
    dirs = [d for d in range(1, p ** m) if pts[d][np.flatnonzero(pts[d])[0]] == 1]
    table = line_index_table(p, m, directions=dirs)
    edges, matchings = [], []
    for c in range(len(dirs)):
        seen = set()
        idx = []
        for x in range(p ** m):
            line = tuple(sorted(int(u) for u in table[x, c]))
            if line not in seen:
                seen.add(line)
                idx.append(len(edges))
                edges.append(line)
        matchings.append(tuple(idx))
    return MatchingPartition(Hypergraph(p ** m, p, tuple(edges)), tuple(matchings), tuple(dirs))


def f_m_monomials(part: MatchingPartition, j: int) -> dict[int, float]:
    """Monomials of f_M as {variable mask: coefficient}; variable r*|V| + u is x[r]_u."""
    v = part.base.v
    m = part.matchings[j]
    coef = 1.0 / len(m)
    out: dict[int, float] = {}
    for i in m:
        for perm in permutations(part.base.edges[i]):
            mask = sum(1 << (r * v + u) for r, u in enumerate(perm))
            out[mask] = out.get(mask, 0.0) + coef
    return out


def monomial_smoothness(monos: dict[int, float], n: int) -> float:
    """n * max_i sum of |c_S| over monomials S containing variable i."""
    load = np.zeros(n)
    for mask, c in monos.items():
        for i in range(n):
            if mask >> i & 1:
                load[i] += abs(c)
    return float(n * load.max()) if n else 0.0


def f_m_values(part: MatchingPartition, j: int) -> np.ndarray:
    n = part.base.t * part.base.v
    if n > LIMITS.boolean_dim:
        raise CapacityError(f"t|V| = {n} exceeds Boolean cap {LIMITS.boolean_dim}")
    masks = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n)
    for mono, c in f_m_monomials(part, j).items():
        par = np.zeros(1 << n, dtype=np.int64)
        for i in range(n):
            if mono >> i & 1:
                par ^= (masks >> i) & 1
        out += c * (1 - 2 * par)
    return out


def evaluate_monomials(monos: dict[int, float], x: np.ndarray) -> float:
    """Multilinear evaluation at an arbitrary real point x."""
    total = 0.0
    for mask, c in monos.items():
        prod = c
        i = 0
        while mask:
            if mask & 1:
                prod *= x[i]
            mask >>= 1
            i += 1
        total += prod
    return total


@dataclass
class JengaWitness:
    k: int
    seed: int
    draws: tuple[int, ...]
    t: int
    v: int
    subsets: tuple[tuple[int, ...], ...]
    witness_value: float
    count_identity: float
    sup_deviation: float | None
    degree: int
    smoothness: float
    smoothness_formula: float
    sup_norm: float
    each_variable_once: bool
    heuristic: bool = True

    def to_dict(self) -> dict:
        d = self.__dict__.copy()
        d["draws"] = list(self.draws)
        d["subsets"] = [list(w) for w in self.subsets]
        return d


def jenga_outlaw(part: MatchingPartition, k: int, seed: int = 0, draws=None,
                 mode: str = "auto") -> tuple[OutlawDistribution | None, JengaWitness]:
    """The uniform distribution over {f_M : M in the partition} and a witness.

    The witness evaluates (1/k) sum f_{M_j} - mean f_M at the 0/1 indicators of
    the subsets maximizing the relative deviation of J = union of the drawn
    matchings. This equals e_J/(k|M|) - e_H/|E|, and since the functions are
    multilinear it lower-bounds the sup-norm deviation on the cube. The dense
    distribution is only built when t|V| fits the Boolean cap (else None).
    """
    v, t = part.base.v, part.base.t
    n = t * v
    if draws is None:
        if k < 1:
            raise ValueError("k must be at least 1")
        rng = np.random.default_rng(seed)
        draws = tuple(int(x) for x in rng.integers(len(part.matchings), size=k))
    draws = tuple(int(x) for x in draws)
    k = len(draws)
    monos = [f_m_monomials(part, j) for j in range(len(part.matchings))]
    sm = [monomial_smoothness(mo, n) for mo in monos]
    var_counts = np.zeros(n, dtype=np.int64)
    for mask in monos[0]:
        for i in range(n):
            var_counts[i] += mask >> i & 1
    once = bool(np.all(var_counts == 1))

    J = part.union(draws)
    res = pseudorandom_deviation(J, part.base, mode, seed=seed)
    x = np.concatenate([_indicator(v, np.array(w, dtype=np.int64)) for w in res.witness])
    vals = np.array([evaluate_monomials(mo, x) for mo in monos])
    wit = float(vals[list(draws)].mean() - vals.mean())
    ident = induced_count(J, [np.array(w, dtype=np.int64) for w in res.witness]) / len(J.edges) \
        - induced_count(part.base, [np.array(w, dtype=np.int64) for w in res.witness]) / len(part.base.edges)

    mu, sup_dev, sup = None, None, float(math.factorial(t))
    if n <= LIMITS.boolean_dim:
        table = np.stack([f_m_values(part, j) for j in range(len(part.matchings))])
        mu = OutlawDistribution(n, np.full(len(table), 1.0 / len(table)), table)
        avg = table[list(draws)].mean(axis=0) - table.mean(axis=0)
        sup_dev = float(np.abs(avg).max())
        sup = float(np.abs(table).max())
    formula = t * t * math.factorial(t - 1)
    witness = JengaWitness(k, seed, draws, t, v, res.witness, abs(wit), ident, sup_dev,
                           t, float(max(sm)), float(formula), sup, once, res.heuristic)
    return mu, witness
