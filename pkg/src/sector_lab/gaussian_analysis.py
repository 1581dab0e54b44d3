"""Gaussian sums, square functions and gamma-type constants on model spaces.

Hilbert models (``p = 2``) have closed forms and are computed exactly.  On
other ``l^p`` spaces all gamma-type quantities are suprema, so the
estimators below return documented lower bounds from seeded searches with
Monte Carlo Gaussian norms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from ._parallel import parallel_map
from .errors import DimensionMismatch, UnsupportedSpace
from .linalg_core import ModelSpace, as_matrix, hermitian_eig, operator_pnorm, pnorm

__all__ = [
    "SquareFunctionSpec",
    "GammaEstimate",
    "GaussNorm",
    "Estimate",
    "gaussian_samples",
    "gauss_norm",
    "lattice_norm",
    "square_function_norm",
    "square_function_constant",
    "gamma_bound_estimate",
    "matricial_gamma_norm",
    "property_alpha_estimate",
    "LATTICE_CAVEAT",
]

LATTICE_CAVEAT = (
    "lattice surrogate ||(sum |x_k|^2)^(1/2)||_p agrees with the Gaussian norm "
    "only up to Khintchine constants depending on p"
)
MEASURES = ("dt", "dt/t", "dt/t*dtheta")
CHUNK = 1 << 15


# sampling ---------------------------------------------------------------


def _box_muller(gen: np.random.Generator, pairs: int) -> tuple[np.ndarray, np.ndarray]:
    u1 = 1.0 - gen.random(pairs)  # (0, 1]
    u2 = gen.random(pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * math.pi * u2
    return r * np.cos(ang), r * np.sin(ang)


def gaussian_samples(seed: int, count: int, dim: int, antithetic: bool = True) -> np.ndarray:
    """Standard normal array of shape ``(count, dim)`` from Box-Muller on a Philox stream.

    With ``antithetic`` the second half of the rows rotates every Box-Muller
    pair of the first half by a quarter turn, ``(z1, z2) -> (-z2, z1)``.
    Sign flips would be useless here because every functional estimated in
    this module is even.  Row ``i`` and row ``i + count // 2`` form a pair.
    """
    if antithetic and count % 2:
        raise ValueError("antithetic sampling needs an even sample count")
    gen = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    base_rows = count // 2 if antithetic else count
    npairs = (dim + 1) // 2
    z1, z2 = _box_muller(gen, base_rows * npairs)
    z1, z2 = z1.reshape(base_rows, npairs), z2.reshape(base_rows, npairs)
    base = np.empty((base_rows, 2 * npairs))
    base[:, 0::2], base[:, 1::2] = z1, z2
    if not antithetic:
        return base[:, :dim]
    partner = np.empty_like(base)
    partner[:, 0::2], partner[:, 1::2] = -z2, z1
    return np.concatenate([base, partner])[:, :dim]


def _check_space(X: ModelSpace) -> None:
    if math.isinf(X.p):
        raise UnsupportedSpace("Gaussian machinery needs finite p (l^inf has no finite cotype)")


def _stack_vectors(vectors, X: ModelSpace) -> np.ndarray:
    v = np.atleast_2d(np.asarray(vectors, dtype=complex))
    if v.shape[-1] != X.dim:
        raise DimensionMismatch(f"vectors of length {v.shape[-1]} in a space of dimension {X.dim}")
    return v


@dataclass(frozen=True)
class GaussNorm:
    """``(E ||sum_k g_k x_k||^2)^(1/2)`` with its standard error.

    ``lattice`` holds the square-function surrogate and ``caveat`` explains
    how it relates to ``value``.
    """

    value: float
    stderr: float
    exact: bool
    samples: int
    seed: int
    lattice: float
    caveat: str = LATTICE_CAVEAT

    def __float__(self) -> float:
        return float(self.value)


def lattice_norm(vectors, X: ModelSpace) -> float:
    """``||(sum_k |x_k|^2)^(1/2)||_X``."""
    v = _stack_vectors(vectors, X)
    return pnorm(np.sqrt(np.sum(np.abs(v) ** 2, axis=0)), X)


def _mc_second_moments(v: np.ndarray, X: ModelSpace, samples: int, seed: int) -> np.ndarray:
    """Per-pair averages of ``||sum g_k x_k||^2``; the returned entries are i.i.d."""
    g = gaussian_samples(seed, samples, v.shape[0])
    half = samples // 2
    out = np.empty(samples)
    for lo in range(0, samples, CHUNK):
        hi = min(samples, lo + CHUNK)
        out[lo:hi] = pnorm(g[lo:hi] @ v, X) ** 2
    return 0.5 * (out[:half] + out[half:])


def gauss_norm(vectors, X: ModelSpace, samples: int = 20000, seed: int = 0,
               method: str = "auto") -> GaussNorm:
    """Gaussian sum norm of ``vectors`` in ``X``.

    ``method="auto"`` returns the exact ``(sum_k ||x_k||^2)^(1/2)`` on
    ``p = 2`` and a Monte Carlo estimate otherwise; ``"mc"`` forces the
    estimate.  The standard error comes from the delta method applied to the
    mean of antithetic pair averages.
    """
    _check_space(X)
    v = _stack_vectors(vectors, X)
    lat = lattice_norm(v, X)
    if method not in ("auto", "mc"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto" and X.is_hilbert:
        return GaussNorm(lat, 0.0, True, 0, int(seed), lat)
    samples = int(samples) + int(samples) % 2
    y = _mc_second_moments(v, X, samples, seed)
    mean = float(np.mean(y))
    value = math.sqrt(mean)
    se_mean = float(np.std(y, ddof=1) / math.sqrt(y.size)) if y.size > 1 else float("inf")
    stderr = se_mean / (2.0 * value) if value > 0 else 0.0
    return GaussNorm(value, stderr, False, samples, int(seed), lat)


class _CommonGauss:
    """Gaussian norms with a fixed sample set (common random numbers)."""

    def __init__(self, X: ModelSpace, terms: int, samples: int, seed: int):
        self.X = X
        self.exact = X.is_hilbert
        self.g = None if self.exact else gaussian_samples(seed, samples + samples % 2, terms)

    def norm(self, v: np.ndarray) -> float:
        if self.exact:
            return pnorm(np.sqrt(np.sum(np.abs(v) ** 2, axis=0)), self.X)
        g = self.g[:, : v.shape[0]]
        return math.sqrt(float(np.mean(pnorm(g @ v, self.X) ** 2)))


# square functions ----------------------------------------------------------


@dataclass(frozen=True)
class SquareFunctionSpec:
    """Quadrature for ``Omega``: nodes, positive weights and a measure label.

    ``grid`` has shape ``(n,)`` for ``dt`` and ``dt/t``, and ``(n, 2)`` with
    columns ``(t, theta)`` for the product measure ``dt/t * dtheta``.
    """

    grid: np.ndarray
    weights: np.ndarray
    measure_label: str
    window: tuple = ()

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if self.measure_label not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}")
        if grid.shape[0] != w.shape[0]:
            raise DimensionMismatch("grid and weights differ in length")
        if np.any(w <= 0):
            raise ValueError("quadrature weights must be positive")
        if self.measure_label != "dt/t*dtheta" and grid.ndim == 1 and np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self.grid if self.grid.ndim == 1 else self.grid[:, 0]

    def total_measure(self) -> float:
        return float(np.sum(self.weights))

    @classmethod
    def uniform_gl(cls, a: float, b: float, panels: int = 64, order: int = 16) -> "SquareFunctionSpec":
        """Composite Gauss-Legendre for ``dt`` on ``[a, b]``."""
        t, w = _composite_gl(a, b, panels, order)
        return cls(t, w, "dt", (a, b))

    @classmethod
    def log_gl(cls, a: float, b: float, measure: str = "dt/t", panels_per_decade: int = 8,
               order: int = 16) -> "SquareFunctionSpec":
        """Composite Gauss-Legendre in ``u = ln t`` on ``[a, b]``, ``0 < a < b``.

        For ``measure="dt"`` the weights carry the Jacobian ``t``.
        """
        if not 0 < a < b:
            raise ValueError("log grids need 0 < a < b")
        panels = max(1, int(math.ceil(math.log10(b / a) * panels_per_decade)))
        u, w = _composite_gl(math.log(a), math.log(b), panels, order)
        t = np.exp(u)
        if measure == "dt":
            w = w * t
        elif measure != "dt/t":
            raise ValueError("log_gl supports dt and dt/t")
        return cls(t, w, measure, (a, b))

    @classmethod
    def product(cls, tspec: "SquareFunctionSpec", t0: float, t1: float, n_theta: int = 16,
                panels: int = 4) -> "SquareFunctionSpec":
        """Product of a ``dt/t`` grid with Gauss-Legendre on ``theta in [t0, t1]``."""
        if tspec.measure_label != "dt/t":
            raise ValueError("product measure needs a dt/t factor")
        th, wt = _composite_gl(t0, t1, panels, n_theta)
        grid = np.array([(t, h) for t in tspec.t for h in th])
        w = np.outer(tspec.weights, wt).ravel()
        return cls(grid, w, "dt/t*dtheta", (tspec.window, (t0, t1)))


def _composite_gl(a: float, b: float, panels: int, order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def _sample_field(F, spec: SquareFunctionSpec) -> np.ndarray:
    if callable(F):
        pts = spec.grid if spec.grid.ndim == 1 else [tuple(r) for r in spec.grid]
        return np.array([np.asarray(F(*pt) if isinstance(pt, tuple) else F(pt), dtype=complex) for pt in pts])
    vals = np.asarray(F, dtype=complex)
    if vals.shape[0] != spec.size:
        raise DimensionMismatch("sampled field does not match the quadrature grid")
    return vals


def square_function_norm(F, spec: SquareFunctionSpec, X: ModelSpace) -> float:
    """``||(sum_i w_i |F(t_i)|^2)^(1/2)||_X``.

    ``F`` is a callable on the grid points or an array of samples with shape
    ``(spec.size, X.dim)``.  On ``p = 2`` this is the ``gamma(Omega, l^2)``
    norm exactly.
    """
    vals = _sample_field(F, spec)
    if vals.shape[-1] != X.dim:
        raise DimensionMismatch(f"field of length {vals.shape[-1]} in dimension {X.dim}")
    sq = np.sqrt(np.tensordot(spec.weights, np.abs(vals) ** 2, axes=(0, 0)))
    return pnorm(sq, X)


@dataclass(frozen=True)
class Estimate:
    """Scalar result; ``exact`` distinguishes closed forms from lower bounds."""

    value: float
    exact: bool
    trials: int = 0
    seed: int = 0
    maximizer: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __float__(self) -> float:
        return float(self.value)


def _ascent(ratio: Callable[[np.ndarray], float], shape: tuple, trials: int, seed: int,
            steps: int = 40) -> tuple[float, np.ndarray]:
    """Best ``ratio(x)`` over seeded restarts followed by random coordinate perturbations."""

    def one(child):
        rng = np.random.default_rng(child)
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        best = ratio(x)
        scale = 0.5
        for _ in range(steps):
            y = x.copy()
            idx = tuple(rng.integers(0, s) for s in shape[:-1])
            y[idx] = y[idx] + scale * (rng.standard_normal(shape[-1]) + 1j * rng.standard_normal(shape[-1]))
            val = ratio(y)
            if val > best:
                x, best = y, val
            else:
                scale *= 0.9
        return best, x

    children = np.random.SeedSequence(int(seed)).spawn(int(trials))
    results = parallel_map(one, children)
    # reduce in trial order so that ties break deterministically
    best, arg = -math.inf, None
    for val, x in results:
        if val > best:
            best, arg = val, x
    return best, arg


def square_function_constant(M, spec: SquareFunctionSpec, X: ModelSpace, trials: int = 64,
                             seed: int = 0, batched: bool = False, chunk: int = 2048) -> Estimate:
    """``sup_x ||(sum_i w_i |M(t_i) x|^2)^(1/2)||_X / ||x||_X`` for a matrix field ``M``.

    ``M`` is an array of shape ``(spec.size, dim, dim)``, a callable on single
    grid points, or with ``batched=True`` a callable mapping an array of grid
    points to a stack of matrices.  Exact on weighted ``l^2`` via the largest
    eigenvalue of ``sum_i w_i M_i^* W M_i`` relative to ``W``; a seeded lower
    bound otherwise.
    """
    n = spec.size

    def block(lo, hi):
        if callable(M):
            if batched:
                return np.asarray(M(spec.grid[lo:hi]), dtype=complex)
            return np.asarray([np.asarray(M(t)) for t in spec.grid[lo:hi]], dtype=complex)
        return np.asarray(M[lo:hi], dtype=complex)

    first = block(0, min(n, chunk))
    if first.shape[1:] != (X.dim, X.dim):
        raise DimensionMismatch("matrix field does not match the space dimension")
    if X.is_hilbert:
        d = np.sqrt(X.weight_array)
        gram = np.zeros((X.dim, X.dim), dtype=complex)
        for lo in range(0, n, chunk):
            mats = first if lo == 0 else block(lo, min(n, lo + chunk))
            scaled = d[None, :, None] * mats / d[None, None, :]
            gram += np.einsum("i,ikj,ikl->jl", spec.weights[lo:lo + chunk], np.conj(scaled), scaled)
        lam = hermitian_eig(0.5 * (gram + gram.conj().T)).eigenvalues
        return Estimate(math.sqrt(max(float(lam[-1]), 0.0)), True)
    mats = np.concatenate([first] + [block(lo, min(n, lo + chunk)) for lo in range(chunk, n, chunk)])
    w = spec.weights

    def ratio(x):
        x = x[0]
        vals = mats @ x
        return pnorm(np.sqrt(w @ (np.abs(vals) ** 2)), X) / pnorm(x, X)

    best, arg = _ascent(ratio, (1, X.dim), trials, seed)
    return Estimate(best, False, trials, seed, arg[0])


# gamma bounds ---------------------------------------------------------------


@dataclass(frozen=True)
class GammaEstimate:
    """Lower bound on a gamma-bound constant from a seeded search."""

    lower_bound: float
    samples_used: int
    seed: int
    converged: bool
    exact_gauss: bool = False

    def __float__(self) -> float:
        return float(self.lower_bound)


def _norming_vector(t: np.ndarray, X: ModelSpace) -> np.ndarray:
    """A vector attaining ``||T||`` for p in {1, 2, inf}; the ascent maximiser otherwise."""
    d = X.scaling()
    s = (d[:, None] * t) / d[None, :]
    if X.p == 1.0:
        y = np.zeros(X.dim, dtype=complex)
        y[int(np.argmax(np.sum(np.abs(s), axis=0)))] = 1.0
    elif math.isinf(X.p):
        row = s[int(np.argmax(np.sum(np.abs(s), axis=1)))]
        y = np.where(np.abs(row) > 0, np.conj(row) / np.where(np.abs(row) > 0, np.abs(row), 1), 1.0)
    elif X.p == 2.0:
        gram = s.conj().T @ s
        y = hermitian_eig(0.5 * (gram + gram.conj().T)).eigenvectors[:, -1]
    else:
        return operator_pnorm(t, X).maximizer
    return y / d


def gamma_bound_estimate(family: Sequence, X: ModelSpace, trials: int = 64, seed: int = 0,
                         samples: int = 4096) -> GammaEstimate:
    """Seeded lower bound for the gamma-bound of ``family`` on ``X``.

    The search always includes each member with its norming vector, so the
    bound is at least ``max ||T||`` when member norms are exact.  Tuples
    ``(T_j, x_j)`` of length ``len(family)`` are then improved by random
    coordinate perturbations of the ``x_j``.  Gaussian norms are exact on
    ``l^2`` and use one common Monte Carlo sample set otherwise.
    """
    _check_space(X)
    ops = [as_matrix(t, square=True) for t in family]
    if not ops:
        raise ValueError("family must be non-empty")
    for t in ops:
        if t.shape[0] != X.dim:
            raise DimensionMismatch(f"operator of size {t.shape[0]} on dimension {X.dim}")
    n = len(ops)
    gauss = _CommonGauss(X, n, samples, seed)
    stack = np.stack(ops)

    def ratio(x):
        num = gauss.norm(np.einsum("kij,kj->ki", stack, x))
        den = gauss.norm(x)
        return num / den if den > 0 else 0.0

    singles = []
    for t in ops:
        x = _norming_vector(t, X)
        singles.append(pnorm(t @ x, X) / pnorm(x, X))
    best_single = max(singles)
    best, _ = _ascent(ratio, (n, X.dim), trials, seed)
    # a second round from a different stream checks stability of the supremum
    again, _ = _ascent(ratio, (n, X.dim), max(1, trials // 4), int(seed) + 1)
    lower = max(best_single, best, again)
    converged = again <= max(best_single, best) * (1 + 1e-6)
    used = 0 if gauss.exact else samples
    return GammaEstimate(float(lower), used, int(seed), bool(converged), gauss.exact)


def _block_matrix(blocks) -> tuple[np.ndarray, int, int]:
    n = len(blocks)
    if n == 0 or any(len(row) != n for row in blocks):
        raise DimensionMismatch("blocks must form a square grid")
    mats = [[as_matrix(b, square=True) for b in row] for row in blocks]
    m = mats[0][0].shape[0]
    if any(b.shape[0] != m for row in mats for b in row):
        raise DimensionMismatch("blocks must share one dimension")
    return np.block(mats), n, m


def matricial_gamma_norm(blocks, X: ModelSpace, trials: int = 64, seed: int = 0,
                         samples: int = 4096) -> Estimate:
    """Norm of ``[S_kj]`` acting on ``Gauss_n(X)``.

    Exact on ``l^2`` as the spectral norm of the ``nm x nm`` block matrix
    (with weights repeated per block), and for ``n = 1`` as the operator
    norm on ``X``.  Otherwise a seeded lower bound.
    """
    big, n, m = _block_matrix(blocks)
    if m != X.dim:
        raise DimensionMismatch(f"blocks of size {m} on dimension {X.dim}")
    if n == 1:
        res = operator_pnorm(big, X)
        return Estimate(res.value, res.exact, res.restarts, seed, res.maximizer)
    _check_space(X)
    if X.is_hilbert:
        w = None if X.weights is None else tuple(np.tile(X.weight_array, n))
        res = operator_pnorm(big, ModelSpace(2.0, n * m, w))
        return Estimate(res.value, True)
    gauss = _CommonGauss(X, n, samples, seed)
    blocks4 = big.reshape(n, m, n, m)

    def ratio(x):
        y = np.einsum("kajb,jb->ka", blocks4, x)
        den = gauss.norm(x)
        return gauss.norm(y) / den if den > 0 else 0.0

    best, arg = _ascent(ratio, (n, m), trials, seed)
    return Estimate(best, False, trials, seed, arg)


def _double_gauss_norm(x: np.ndarray, X: ModelSpace, g1: np.ndarray, g2: np.ndarray) -> float:
    # E_g E_g' || sum_ij g_i g'_j x_ij ||^2 with independent sample columns
    coeff = g1[:, :, None] * g2[:, None, :]
    vals = np.einsum("sij,ijm->sm", coeff, x)
    return math.sqrt(float(np.mean(pnorm(vals, X) ** 2)))


def property_alpha_estimate(X: ModelSpace, n: int, trials: int = 32, seed: int = 0,
                            samples: int = 8192, method: str = "auto", family=None) -> Estimate:
    """Largest two-sided ratio between the iterated and the doubly indexed Gaussian norms.

    For random families ``x_ij`` (or the given ``family`` of shape
    ``(n, n, dim)``) compares ``||sum g_i g'_j x_ij||`` with
    ``||sum g_ij x_ij||``.  Both sides use sample sets derived from the same
    seed.  On ``l^2`` both equal ``(sum ||x_ij||^2)^(1/2)``, which
    ``method="auto"`` returns as the exact ratio 1.
    """
    if n < 2:
        raise ValueError("property (alpha) needs n >= 2")
    _check_space(X)
    if method == "auto" and X.is_hilbert:
        return Estimate(1.0, True)
    samples = int(samples) + int(samples) % 2
    ss = np.random.SeedSequence(int(seed))
    s_double, s_iter, s_fam = ss.spawn(3)
    g = gaussian_samples(int(s_double.generate_state(1)[0]), samples, n * n)
    gg = gaussian_samples(int(s_iter.generate_state(1)[0]), samples, 2 * n)
    g1, g2 = gg[:, :n], gg[:, n:]

    def ratio(x):
        lhs = _double_gauss_norm(x, X, g1, g2)
        flat = x.reshape(n * n, X.dim)
        rhs = math.sqrt(float(np.mean(pnorm(g @ flat, X) ** 2)))
        return max(lhs / rhs, rhs / lhs)

    if family is not None:
        x = np.asarray(family, dtype=complex)
        if x.shape != (n, n, X.dim):
            raise DimensionMismatch(f"family must have shape {(n, n, X.dim)}")
        return Estimate(ratio(x), False, 1, seed, x)
    rng = np.random.default_rng(s_fam)
    fams = [rng.standard_normal((n, n, X.dim)) + 1j * rng.standard_normal((n, n, X.dim))
            for _ in range(int(trials))]
    vals = parallel_map(ratio, fams)
    i = int(np.argmax(vals))
    return Estimate(float(vals[i]), False, int(trials), seed, fams[i])
