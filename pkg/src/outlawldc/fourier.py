"""Exact Fourier analysis of real functions on the Boolean cube {-1,1}^n.

Points are indexed by n-bit masks: bit i of ``j`` set means x_i = -1, so mask 0
is the all-(+1) point and chi_S(x_j) = (-1)^popcount(S & j). Coordinates are
0-based throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import LIMITS, TOL, CapacityError


def popcounts(n: int) -> np.ndarray:
    """popcount of every mask in [0, 2^n)."""
    j = np.arange(1 << n, dtype=np.int64)
    out = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        out += (j >> i) & 1
    return out


def cube_points(n: int) -> np.ndarray:
    """(2^n, n) array of +-1 points in mask order."""
    j = np.arange(1 << n, dtype=np.int64)[:, None]
    bits = (j >> np.arange(n)) & 1
    return (1 - 2 * bits).astype(np.int8)


def _check_dim(n: int, cap: int | None) -> None:
    cap = LIMITS.boolean_dim if cap is None else cap
    if n < 0:
        raise ValueError(f"dimension must be nonnegative, got {n}")
    if n > cap:
        raise CapacityError(f"dimension {n} exceeds cap {cap}")


def walsh_hadamard(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis.

    The last axis must have length 2^n. Returns a new array; O(n 2^n) per row.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    size = a.shape[-1]
    if size & (size - 1):
        raise ValueError(f"length {size} is not a power of two")
    lead = a.shape[:-1]
    h = 1
    while h < size:
        v = a.reshape(*lead, size // (2 * h), 2, h)
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :]
        v[..., 0, :] = lo + hi
        v[..., 1, :] = lo - hi
        h *= 2
    return a


@dataclass(frozen=True, eq=False)
class BooleanFunction:
    """Real-valued table over {-1,1}^n."""

    n: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} values for n={self.n}, got shape {vals.shape}")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_callable(cls, n: int, fn) -> "BooleanFunction":
        """Tabulate ``fn`` applied to each +-1 point (given as an int array)."""
        pts = cube_points(n)
        return cls(n, np.array([fn(x) for x in pts], dtype=np.float64))

    @classmethod
    def zero(cls, n: int) -> "BooleanFunction":
        return cls(n, np.zeros(1 << n))

    @property
    def boolean_valued(self) -> bool:
        return bool(np.all(np.abs(np.abs(self.values) - 1.0) <= TOL))

    def __add__(self, other: "BooleanFunction") -> "BooleanFunction":
        _same_dim(self, other)
        return BooleanFunction(self.n, self.values + other.values)

    def __sub__(self, other: "BooleanFunction") -> "BooleanFunction":
        _same_dim(self, other)
        return BooleanFunction(self.n, self.values - other.values)

    def __mul__(self, scalar: float) -> "BooleanFunction":
        return BooleanFunction(self.n, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "BooleanFunction":
        return BooleanFunction(self.n, -self.values)

    def allclose(self, other: "BooleanFunction", tol: float = TOL) -> bool:
        return self.n == other.n and bool(np.max(np.abs(self.values - other.values), initial=0.0) <= tol)

    def __call__(self, x) -> float:
        """Evaluate at a +-1 point given as a sequence, or at a mask."""
        if isinstance(x, (int, np.integer)):
            return float(self.values[int(x)])
        x = np.asarray(x)
        mask = int(np.sum(((x < 0).astype(np.int64)) << np.arange(self.n)))
        return float(self.values[mask])


@dataclass(frozen=True, eq=False)
class FourierSpectrum:
    """Coefficient table f_hat(S) indexed by subset mask S."""

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} coefficients for n={self.n}, got shape {c.shape}")
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def degree(self, tol: float = TOL) -> int:
        """Largest |S| with |f_hat(S)| > tol, or -1 for the zero function."""
        nz = np.abs(self.coeffs) > tol
        if not nz.any():
            return -1
        return int(popcounts(self.n)[nz].max())

    def support(self, tol: float = TOL) -> list[int]:
        return [int(s) for s in np.flatnonzero(np.abs(self.coeffs) > tol)]


def _same_dim(f, g) -> None:
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")


def character(n: int, subset) -> BooleanFunction:
    """chi_S for S given as a mask or an iterable of 0-based coordinates."""
    s = subset if isinstance(subset, (int, np.integer)) else sum(1 << i for i in subset)
    par = popcounts(n)[np.arange(1 << n) & int(s)]
    return BooleanFunction(n, 1.0 - 2.0 * (par & 1))


def fourier_transform(f: BooleanFunction, cap: int | None = None) -> FourierSpectrum:
    """f_hat(S) = E_x[f(x) chi_S(x)] via the fast transform."""
    _check_dim(f.n, cap)
    return FourierSpectrum(f.n, walsh_hadamard(f.values) / (1 << f.n))


def inverse_transform(spec: FourierSpectrum, cap: int | None = None) -> BooleanFunction:
    _check_dim(spec.n, cap)
    return BooleanFunction(spec.n, walsh_hadamard(spec.coeffs))


def spectral_norm(spec: FourierSpectrum | BooleanFunction) -> float:
    """Sum of absolute Fourier coefficients. Accepts a function for convenience."""
    if isinstance(spec, BooleanFunction):
        spec = fourier_transform(spec)
    return float(np.sum(np.abs(spec.coeffs)))


def sup_norm(f: BooleanFunction) -> float:
    return float(np.max(np.abs(f.values), initial=0.0))


def discrete_derivative(f: BooleanFunction, i: int) -> BooleanFunction:
    """(D_i f)(x) = (f(x) - f(x^i)) / 2 for a 0-based coordinate ``i``."""
    if not 0 <= i < f.n:
        raise IndexError(f"coordinate {i} out of range for n={f.n}")
    j = np.arange(1 << f.n)
    return BooleanFunction(f.n, (f.values - f.values[j ^ (1 << i)]) / 2.0)


def derivative_norms(spec: FourierSpectrum) -> np.ndarray:
    """||D_i f|| = sum_{S containing i} |f_hat(S)| for every coordinate i."""
    a = np.abs(spec.coeffs)
    masks = np.arange(1 << spec.n)
    return np.array([a[((masks >> i) & 1) == 1].sum() for i in range(spec.n)])


def smoothness(f: BooleanFunction | FourierSpectrum) -> float:
    """Smallest sigma for which f is sigma-smooth: n * max_i ||D_i f||."""
    spec = f if isinstance(f, FourierSpectrum) else fourier_transform(f)
    if spec.n == 0:
        return 0.0
    return float(spec.n * derivative_norms(spec).max())


def truncate_spectrum(spec: FourierSpectrum, q: int) -> FourierSpectrum:
    if q < 0:
        raise ValueError("truncation degree must be nonnegative")
    c = np.where(popcounts(spec.n) <= q, spec.coeffs, 0.0)
    return FourierSpectrum(spec.n, c)


def truncate_degree(f: BooleanFunction, q: int) -> BooleanFunction:
    """Degree-q truncation f^{<=q}."""
    return inverse_transform(truncate_spectrum(fourier_transform(f), q))


def junta_support(spec: FourierSpectrum, tol: float = TOL) -> frozenset[int]:
    """Coordinates appearing in some S with a nonzero coefficient."""
    union = 0
    for s in spec.support(tol):
        union |= s
    return frozenset(i for i in range(spec.n) if union >> i & 1)


def degree(f: BooleanFunction, tol: float = TOL) -> int:
    return fourier_transform(f).degree(tol)


def identity_checks(n: int, count: int, seed: int = 0, tol: float = TOL) -> dict:
    """Worst violations of the basic identities over random Gaussian functions.

    Checks Parseval, exact inversion, sup-norm <= spectral norm, and that the
    spectrum of D_i f is f_hat restricted to sets containing i.
    """
    _check_dim(n, None)
    rng = np.random.default_rng(seed)
    masks = np.arange(1 << n)
    worst = {"parseval": 0.0, "inversion": 0.0, "sup_vs_spectral": 0.0, "derivative": 0.0}
    for _ in range(count):
        f = BooleanFunction(n, rng.standard_normal(1 << n))
        spec = fourier_transform(f)
        worst["parseval"] = max(worst["parseval"], float(abs(np.mean(f.values ** 2) - np.sum(spec.coeffs ** 2))))
        worst["inversion"] = max(worst["inversion"], float(np.abs(inverse_transform(spec).values - f.values).max()))
        worst["sup_vs_spectral"] = max(worst["sup_vs_spectral"], float(sup_norm(f) - spectral_norm(spec)))
        i = int(rng.integers(n)) if n else 0
        if n:
            d_spec = fourier_transform(discrete_derivative(f, i)).coeffs
            want = np.where((masks >> i) & 1, spec.coeffs, 0.0)
            worst["derivative"] = max(worst["derivative"], float(np.abs(d_spec - want).max()))
    passed = all(v <= tol for v in worst.values())
    return {"n": n, "count": count, "seed": seed, "tolerance": tol, "worst": worst, "passed": passed}
