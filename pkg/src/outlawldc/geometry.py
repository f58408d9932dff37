"""Incidence geometry over F_p^n for odd primes p.

Points are either :class:`FpVector` values or integer indices in [0, p^n),
where coordinate i of index j is the i-th base-p digit of j. Most routines
accept any mix of the two and work on index arrays internally.

The line with origin x and direction y is the sequence (x + lam*y) for lam in
F_p; it is nontrivial when y != 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from .config import LIMITS, CapacityError, VerificationError
from .fourier import BooleanFunction, fourier_transform, smoothness


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(math.isqrt(p)) + 1))


def _check_field(p: int) -> None:
    if not is_prime(p) or p == 2:
        raise ValueError(f"p must be an odd prime, got {p}")


def _check_points(p: int, n: int, cap: int | None = None) -> int:
    _check_field(p)
    cap = LIMITS.field_points if cap is None else cap
    size = p ** n
    if size > cap:
        raise CapacityError(f"p^n = {size} exceeds enumeration cap {cap}")
    return size


@dataclass(frozen=True)
class FpVector:
    p: int
    coords: tuple[int, ...]

    def __post_init__(self):
        _check_field(self.p)
        c = tuple(int(v) for v in self.coords)
        if any(not 0 <= v < self.p for v in c):
            raise ValueError("coordinates must be residues in [0, p)")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def index(self) -> int:
        return sum(v * self.p ** i for i, v in enumerate(self.coords))

    @classmethod
    def from_index(cls, p: int, n: int, j: int) -> "FpVector":
        return cls(p, tuple((j // p ** i) % p for i in range(n)))

    def __add__(self, other: "FpVector") -> "FpVector":
        _same_space(self, other)
        return FpVector(self.p, tuple((a + b) % self.p for a, b in zip(self.coords, other.coords)))

    def scale(self, lam: int) -> "FpVector":
        return FpVector(self.p, tuple((lam * a) % self.p for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)


def _same_space(x: FpVector, y: FpVector) -> None:
    if x.p != y.p or x.n != y.n:
        raise ValueError(f"mismatched spaces: F_{x.p}^{x.n} vs F_{y.p}^{y.n}")


def all_points(p: int, n: int) -> np.ndarray:
    """(p^n, n) coordinate array in index order."""
    j = np.arange(p ** n, dtype=np.int64)[:, None]
    return (j // p ** np.arange(n, dtype=np.int64)) % p


def to_index(p: int, coords: np.ndarray) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    return (coords % p) @ (p ** np.arange(coords.shape[-1], dtype=np.int64))


def as_indices(p: int, n: int, points) -> np.ndarray:
    """Normalize a point collection (FpVectors, coordinate rows, or indices) to sorted unique indices."""
    out = []
    for pt in points:
        if isinstance(pt, FpVector):
            if pt.p != p or pt.n != n:
                raise ValueError("point from a different space")
            out.append(pt.index)
        elif isinstance(pt, (int, np.integer)):
            if not 0 <= int(pt) < p ** n:
                raise ValueError(f"index {pt} out of range")
            out.append(int(pt))
        else:
            c = [int(v) for v in pt]
            if len(c) != n or any(not 0 <= v < p for v in c):
                raise ValueError(f"bad coordinates {c}")
            out.append(int(to_index(p, np.array(c))))
    return np.unique(np.array(out, dtype=np.int64))


def line_points(x: FpVector, y: FpVector) -> list[FpVector]:
    """[x + lam*y for lam in 0..p-1]."""
    _same_space(x, y)
    return [x + y.scale(lam) for lam in range(x.p)]


def line_index_table(p: int, n: int, origins=None, directions=None) -> np.ndarray:
    """Indices of x + lam*y as an array of shape (len(origins), len(directions), p).

    Defaults: every point as origin and every nonzero vector as direction.
    """
    pts = all_points(p, n)
    origins = np.arange(p ** n) if origins is None else np.asarray(origins, dtype=np.int64)
    directions = np.arange(1, p ** n) if directions is None else np.asarray(directions, dtype=np.int64)
    lam = np.arange(p)
    coords = pts[origins][:, None, None, :] + lam[None, None, :, None] * pts[directions][None, :, None, :]
    return to_index(p, coords % p)


# ---------------------------------------------------------------- linear algebra mod p


def rref_mod_p(m: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p and the pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if len(nz) == 0:
            continue
        piv = r + int(nz[0])
        a[[r, piv]] = a[[piv, r]]
        a[r] = (a[r] * pow(int(a[r, c]), p - 2, p)) % p
        others = np.flatnonzero(a[:, c])
        others = others[others != r]
        a[others] = (a[others] - np.outer(a[others, c], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def nullspace_mod_p(m: np.ndarray, p: int) -> np.ndarray:
    """Basis of {v : m v = 0 over F_p}, one vector per row."""
    m = np.asarray(m, dtype=np.int64)
    cols = m.shape[1]
    if m.shape[0] == 0:
        return np.eye(cols, dtype=np.int64)
    a, pivots = rref_mod_p(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for b, fcol in enumerate(free):
        basis[b, fcol] = 1
        for r, pc in enumerate(pivots):
            basis[b, pc] = (-a[r, fcol]) % p
    return basis


def solve_mod_p(m: np.ndarray, rhs: np.ndarray, p: int) -> np.ndarray:
    """One solution of m v = rhs over F_p; raises ValueError if inconsistent."""
    m = np.asarray(m, dtype=np.int64)
    aug = np.concatenate([m, np.asarray(rhs, dtype=np.int64).reshape(-1, 1)], axis=1)
    a, pivots = rref_mod_p(aug, p)
    cols = m.shape[1]
    if cols in pivots:
        raise ValueError("inconsistent system")
    v = np.zeros(cols, dtype=np.int64)
    for r, pc in enumerate(pivots):
        v[pc] = a[r, cols]
    return v


# ---------------------------------------------------------------- polynomials


def homogeneous_monomials(n: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors of all degree-d monomials in n variables (C(n+d-1, d) of them)."""
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return out


def _monomial_values(p: int, exps: list[tuple[int, ...]], coords: np.ndarray) -> np.ndarray:
    """(len(coords), len(exps)) table of monomial values mod p."""
    coords = np.asarray(coords, dtype=np.int64) % p
    out = np.ones((len(coords), len(exps)), dtype=np.int64)
    for c, e in enumerate(exps):
        for i, k in enumerate(e):
            if k:
                out[:, c] = out[:, c] * pow_mod(coords[:, i], k, p) % p
    return out


def pow_mod(a: np.ndarray, k: int, p: int) -> np.ndarray:
    out = np.ones_like(a)
    base = a % p
    while k:
        if k & 1:
            out = out * base % p
        base = base * base % p
        k >>= 1
    return out


@dataclass(frozen=True)
class HomogeneousPoly:
    """sum_e c_e x^e over F_p with every exponent vector of total degree d."""

    p: int
    n: int
    d: int
    monomials: tuple[tuple[int, ...], ...]
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_field(self.p)
        mons = tuple(tuple(int(v) for v in e) for e in self.monomials)
        cs = tuple(int(c) % self.p for c in self.coeffs)
        if len(mons) != len(cs):
            raise ValueError("monomials and coefficients differ in length")
        for e in mons:
            if len(e) != self.n or sum(e) != self.d or min(e, default=0) < 0:
                raise ValueError(f"monomial {e} is not of degree {self.d} in {self.n} variables")
        object.__setattr__(self, "monomials", mons)
        object.__setattr__(self, "coeffs", cs)

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def evaluate(self, coords) -> np.ndarray:
        """Values at a (m, n) coordinate array."""
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        if not self.monomials:
            return np.zeros(len(coords), dtype=np.int64)
        return _monomial_values(self.p, list(self.monomials), coords) @ np.array(self.coeffs) % self.p

    def __call__(self, x) -> int:
        if isinstance(x, FpVector):
            x = x.coords
        return int(self.evaluate(np.array(x)[None, :])[0])

    def values(self) -> np.ndarray:
        """Values at every point, in index order."""
        _check_points(self.p, self.n)
        return self.evaluate(all_points(self.p, self.n))

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "d": self.d,
            "monomials": [{"exps": list(e), "c": c} for e, c in zip(self.monomials, self.coeffs) if c],
        }


def interpolate_homogeneous(p: int, n: int, points, d: int) -> HomogeneousPoly:
    """A nonzero homogeneous degree-d polynomial vanishing on every point given.

    Requires |A| <= C(n+d-1, d) - 1 so the evaluation matrix has a kernel. The
    first kernel basis vector is returned and re-checked on A.
    """
    _check_field(p)
    if d < 0:
        raise ValueError("degree must be nonnegative")
    idx = as_indices(p, n, points)
    exps = homogeneous_monomials(n, d)
    if len(idx) > len(exps) - 1:
        raise ValueError(f"|A| = {len(idx)} exceeds C(n+d-1, d) - 1 = {len(exps) - 1}")
    coords = all_points(p, n)[idx] if len(idx) else np.zeros((0, n), dtype=np.int64)
    mat = _monomial_values(p, exps, coords)
    kernel = nullspace_mod_p(mat, p)
    if len(kernel) == 0:
        raise VerificationError("empty kernel under the size condition")
    f = HomogeneousPoly(p, n, d, tuple(exps), tuple(int(c) for c in kernel[0]))
    if len(idx) and np.any(f.evaluate(coords)):
        raise VerificationError("interpolated polynomial does not vanish on A")
    return f


def dlsz_bound(p: int, n: int, d: int) -> float:
    """Upper bound (1 - p^{-d/(p-1)}) p^n on the zero set of a nonzero degree-d polynomial."""
    return (1.0 - p ** (-d / (p - 1))) * p ** n


def level_sets(f: HomogeneousPoly) -> np.ndarray:
    """counts[a] = |f^{-1}(a)| for every residue a, with the DLSZ bound enforced."""
    if f.is_zero:
        raise ValueError("zero polynomial")
    vals = f.values()
    counts = np.bincount(vals, minlength=f.p)
    if counts.sum() != f.p ** f.n:
        raise VerificationError("level sets do not cover the space")
    if counts[0] > dlsz_bound(f.p, f.n, f.d) + 1e-9:
        raise VerificationError(f"|Z(f)| = {counts[0]} exceeds the DLSZ bound")
    return counts


def restrict_to_line(f: HomogeneousPoly, x, y) -> np.ndarray:
    """Coefficients g_0..g_{p-1} (low to high) of g(lam) = f(x + lam*y) over F_p."""
    p = f.p
    x = np.array(x.coords if isinstance(x, FpVector) else x, dtype=np.int64)
    y = np.array(y.coords if isinstance(y, FpVector) else y, dtype=np.int64)
    lam = np.arange(p)
    vals = f.evaluate((x[None, :] + lam[:, None] * y[None, :]) % p)
    vander = np.stack([pow_mod(lam, k, p) if k else np.ones(p, dtype=np.int64) for k in range(p)], axis=1)
    return solve_mod_p(vander, vals, p)


# ---------------------------------------------------------------- lines and avoiding sets


def _membership(p: int, n: int, points) -> np.ndarray:
    size = _check_points(p, n)
    member = np.zeros(size, dtype=bool)
    member[as_indices(p, n, points)] = True
    return member


def _check_line_budget(p: int, n: int, origins: int) -> None:
    if origins * (p ** n) * p > LIMITS.line_cells:
        raise CapacityError(f"line scan over {origins} origins in F_{p}^{n} exceeds budget")


def line_count_in_set(p: int, n: int, points, unordered: bool = False) -> int:
    """Number of (x, y != 0) with x + lam*y in S for every lam.

    With ``unordered`` the count is divided by the p(p-1) parameterizations of
    each line.
    """
    member = _membership(p, n, points)
    idx = np.flatnonzero(member)
    if len(idx) == 0:
        return 0
    _check_line_budget(p, n, len(idx))
    count = 0
    step = max(1, LIMITS.line_cells // (p ** n * p))
    for start in range(0, len(idx), step):
        table = line_index_table(p, n, origins=idx[start:start + step])
        count += int(member[table].all(axis=2).sum())
    if unordered:
        return count // (p * (p - 1))
    return count


def lines_through_max_hits(p: int, n: int, through, inside) -> np.ndarray:
    """For each point a of ``through`` and each y != 0, |{lam : a + lam*y in inside}|."""
    member = _membership(p, n, inside)
    idx = as_indices(p, n, through)
    if len(idx) == 0:
        return np.zeros((0, p ** n - 1), dtype=np.int64)
    _check_line_budget(p, n, len(idx))
    return member[line_index_table(p, n, origins=idx)].sum(axis=2)


@dataclass
class AvoidingSet:
    p: int
    n: int
    A: tuple[int, ...]
    B: tuple[int, ...]
    poly: HomogeneousPoly | None
    level: int | None
    level_counts: tuple[int, ...]
    size_bound: float
    max_hits: int
    certified: bool
    construction: str = "interpolation"

    @property
    def size(self) -> int:
        return len(self.B)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "A": list(self.A),
            "B_size": self.size,
            "B": list(self.B),
            "poly": self.poly.to_dict() if self.poly else None,
            "level": self.level,
            "level_counts": list(self.level_counts),
            "size_bound": self.size_bound,
            "max_hits": self.max_hits,
            "certified": self.certified,
            "construction": self.construction,
        }


def avoiding_size_bound(p: int, n: int) -> float:
    return p ** n / p ** ((2 * p - 3) / (p - 1))


def max_interpolable(p: int, n: int) -> int:
    """Largest |A| accepted by :func:`construct_avoiding_set`."""
    return math.comb(n + p - 3, p - 2) - 1


def construct_avoiding_set(p: int, n: int, A) -> AvoidingSet:
    """A large set B such that every line through a point of A meets B in at most p-2 points.

    f is a degree-(p-2) homogeneous polynomial vanishing on A and B is its
    largest nonzero level set (smallest residue on ties). The line condition
    is then checked exhaustively, together with the size bound.
    """
    _check_points(p, n)
    idx = as_indices(p, n, A)
    if len(idx) > max_interpolable(p, n):
        raise ValueError(f"|A| = {len(idx)} exceeds C(n+p-3, p-2) - 1 = {max_interpolable(p, n)}")
    f = interpolate_homogeneous(p, n, idx, p - 2)
    counts = level_sets(f)
    a = 1 + int(np.argmax(counts[1:]))
    B = np.flatnonzero(f.values() == a)
    hits = lines_through_max_hits(p, n, idx, B)
    max_hits = int(hits.max(initial=0))
    bound = avoiding_size_bound(p, n)
    certified = max_hits <= p - 2 and len(B) >= bound - 1e-9
    return AvoidingSet(p, n, tuple(int(i) for i in idx), tuple(int(b) for b in B), f, a,
                       tuple(int(c) for c in counts), bound, max_hits, certified)


def greedy_avoiding_set(p: int, n: int, A) -> AvoidingSet:
    """Fallback when A is too large to interpolate: add points in index order
    while every line through A keeps at most p-2 points of B."""
    _check_points(p, n)
    idx = as_indices(p, n, A)
    table = line_index_table(p, n, origins=idx) if len(idx) else np.zeros((0, 0, p), dtype=np.int64)
    flat = table.reshape(-1, p)
    # mult[pt][line] = number of parameters lam at which the line visits pt
    hits = np.zeros(len(flat), dtype=np.int64)
    mult = [dict() for _ in range(p ** n)]
    for li, row in enumerate(flat):
        for pt in row.tolist():
            mult[pt][li] = mult[pt].get(li, 0) + 1
    B = []
    for pt in range(p ** n):
        ls = mult[pt]
        if all(hits[li] + c <= p - 2 for li, c in ls.items()):
            for li, c in ls.items():
                hits[li] += c
            B.append(pt)
    max_hits = int(hits.max(initial=0))
    return AvoidingSet(p, n, tuple(int(i) for i in idx), tuple(B), None, None, (),
                       avoiding_size_bound(p, n), max_hits, max_hits <= p - 2, "greedy")


def avoids_directions(p: int, n: int, B, D) -> bool:
    """True when no line with direction in D lies entirely inside B."""
    member = _membership(p, n, B)
    origins = np.flatnonzero(member)
    dirs = as_indices(p, n, D)
    if np.any(dirs == 0):
        raise ValueError("directions must be nonzero")
    if len(origins) == 0 or len(dirs) == 0:
        return True
    return not bool(member[line_index_table(p, n, origins, dirs)].all(axis=2).any())


# ---------------------------------------------------------------- F_x functions


def set_to_mask(p: int, n: int, points) -> int:
    """Cube mask of the +-1 input encoding S: a variable reads +1 iff its point is in S."""
    member = _membership(p, n, points)
    return int(sum(1 << j for j in np.flatnonzero(~member)))


def _fx_line_masks(p: int, n: int, x: int) -> np.ndarray:
    """For each y != 0, the mask of the p-1 non-origin points of the line x + lam*y."""
    table = line_index_table(p, n, origins=[x])[0][:, 1:]
    return np.array([sum(1 << int(v) for v in row) for row in table], dtype=np.int64)


def fx_values(p: int, n: int, x: int) -> np.ndarray:
    """Table of F_x over {-1,1}^{p^n}: the fraction of directions y whose line
    through x has all p-1 other points reading +1."""
    size = _check_points(p, n)
    if size > LIMITS.boolean_dim:
        raise CapacityError(f"F_x needs {size} Boolean variables, cap is {LIMITS.boolean_dim}")
    masks = np.arange(1 << size, dtype=np.int64)
    out = np.zeros(1 << size)
    for m in _fx_line_masks(p, n, x):
        out += (masks & m) == 0
    return out / (size - 1)


def fx_function(x: FpVector) -> BooleanFunction:
    p, n = x.p, x.n
    return BooleanFunction(p ** n, fx_values(p, n, x.index))


def fx_exact_smoothness(p: int, n: int) -> float:
    """Closed form of the smoothness of every F_x: p^n (p-1) / (2 (p^n - 1))."""
    return p ** n * (p - 1) / (2 * (p ** n - 1))


def fx_claimed_smoothness(p: int, n: int) -> float:
    return 2 * (1 - p ** (-n))


@dataclass
class FxAudit:
    p: int
    n: int
    degree: int
    smoothness: float
    exact_formula: float
    claimed_bound: float
    within_claimed: bool

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def fx_audit(x: FpVector) -> FxAudit:
    spec = fourier_transform(fx_function(x))
    s = smoothness(spec)
    claim = fx_claimed_smoothness(x.p, x.n)
    return FxAudit(x.p, x.n, spec.degree(), s, fx_exact_smoothness(x.p, x.n), claim, s <= claim + 1e-9)


def fx_at_set(p: int, n: int, x: int, inside: np.ndarray) -> float:
    """F_x at the input encoding the membership vector ``inside``."""
    table = line_index_table(p, n, origins=[x])[0][:, 1:]
    return float(inside[table].all(axis=1).mean())


def line_density(p: int, n: int, inside: np.ndarray, origins=None) -> np.ndarray:
    """F_x(1_S) for every origin in ``origins`` (default: all points)."""
    origins = np.arange(p ** n) if origins is None else np.asarray(origins, dtype=np.int64)
    _check_line_budget(p, n, len(origins))
    return inside[line_index_table(p, n, origins=origins)[:, :, 1:]].all(axis=2).mean(axis=1)


@dataclass
class GeometryOutlawReport:
    p: int
    n: int
    k: int
    seed: int
    origins: list
    construction: str
    fallback: bool
    B_size: int
    certified: bool
    witness_values: list
    mean: float
    mean_std_error: float
    exact_mean: bool
    deviation: float
    flagged: bool
    reason: str = ""

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def geometry_outlaw(p: int, n: int, k: int, trials: int = 1000, seed: int = 0,
                    exact_budget: int | None = None, origins=None) -> GeometryOutlawReport:
    """Deviation of (1/k) sum F_{z_i} from the mean of F_z at the set avoiding z_1..z_k.

    Origins are drawn uniformly (or taken from ``origins``). Lines through the
    origins meet B in at most p-2 points, so each F_{z_i} vanishes at 1_B and
    the deviation equals the mean line density of B. The mean is exact when
    p^n origins fit the line budget, otherwise a Monte Carlo estimate.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    size = _check_points(p, n)
    rng = np.random.default_rng(seed)
    z = np.asarray(origins, dtype=np.int64) if origins is not None else rng.integers(size, size=k)
    if len(z) != k:
        raise ValueError("need exactly k origins")
    A = np.unique(z)
    if len(A) <= max_interpolable(p, n):
        av = construct_avoiding_set(p, n, A)
    else:
        av = greedy_avoiding_set(p, n, A)
    inside = np.zeros(size, dtype=bool)
    inside[list(av.B)] = True
    wit = line_density(p, n, inside, z)
    budget = LIMITS.line_cells if exact_budget is None else exact_budget
    if size * size * p <= budget:
        dens = line_density(p, n, inside)
        mean, se, exact = float(dens.mean()), 0.0, True
    else:
        sample = rng.integers(size, size=trials)
        dens = np.concatenate([line_density(p, n, inside, sample[s:s + 256]) for s in range(0, trials, 256)])
        mean, se, exact = float(dens.mean()), float(dens.std(ddof=1) / math.sqrt(trials)), False
    dev = abs(float(wit.mean()) - mean)
    reason = ""
    if not av.certified:
        reason = "avoiding set not certified"
    elif dev - LIMITS.slack_sigmas * se <= 1e-12:
        reason = "no positive deviation"
    return GeometryOutlawReport(p, n, k, seed, [int(v) for v in z], av.construction, av.construction != "interpolation",
                                av.size, av.certified, [float(v) for v in wit], mean, se, exact, dev, bool(reason), reason)
