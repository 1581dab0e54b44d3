"""Norms on functions of ``(0, inf)``: ``W^alpha``, ``H^alpha``, ``M^n``, the integral condition and row norms.

All Sobolev quantities are taken in the log variable ``s = ln t`` with the
unitary Fourier transform ``g^(xi) = (2 pi)^(-1/2) int g(s) e^{-i s xi} ds``,
so that ``W^0`` is ``L^2(ds)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..errors import OrderTooLow, UnresolvedFunction
from ..linalg_core import hermitian_eig
from .partition import DyadicPartition
from .scalar import LN2, ScalarFunction, bump_log2_jet

__all__ = [
    "sobolev_norm",
    "sobolev_inner",
    "HormanderNorm",
    "hormander_norm",
    "hormander_norm_r",
    "mihlin_norm",
    "hormander_condition",
    "FunctionMatrix",
    "row_matrix_norm",
    "localized_orthonormal_family",
    "GRID_SIZE",
    "GRID_TOL",
]

GRID_SIZE = 512
GRID_TOL = 1e-4
ABS_FLOOR = 1e-14
EDGE_TOL = 1e-10


def _values(f, t: np.ndarray) -> np.ndarray:
    return np.asarray(f.value(t) if isinstance(f, ScalarFunction) else f(t), dtype=complex)


def _default_window(f) -> tuple[float, float]:
    supp = getattr(f, "log_support", None)
    if supp is None:
        raise ValueError("a window is required for functions without a known support")
    mid, half = 0.5 * (supp[0] + supp[1]), 0.5 * (supp[1] - supp[0])
    return (mid - 2 * half, mid + 2 * half)


def _transform(f, window, n: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Unitary DFT of ``g = f o exp`` on a periodic grid; returns ``(g^, xi, d_xi)``."""
    a, b = float(window[0]), float(window[1])
    if not b > a:
        raise ValueError("window must satisfy a < b")
    ds = (b - a) / n
    s = a + ds * np.arange(n)
    g = _values(f, np.exp(s))
    peak = np.max(np.abs(g)) if g.size else 0.0
    if peak > 0 and max(abs(g[0]), abs(_values(f, np.exp(np.array([b])))[0])) > EDGE_TOL * peak:
        raise UnresolvedFunction("function is not negligible at the window edge")
    # phase aligns the grid origin with s = a
    xi = 2 * np.pi * np.fft.fftfreq(n, d=ds)
    ghat = np.fft.fft(g) * ds / math.sqrt(2 * math.pi) * np.exp(-1j * xi * a)
    return ghat, xi, 2 * math.pi / (b - a)


def _sobolev_sq(f, alpha, window, n) -> float:
    ghat, xi, dxi = _transform(f, window, n)
    return float(np.sum((1 + xi * xi) ** alpha * np.abs(ghat) ** 2) * dxi)


def sobolev_norm(f, alpha: float, window: tuple[float, float] | None = None,
                 grid_size: int = GRID_SIZE) -> float:
    """``||f o exp||_{W^alpha}`` by a unitary DFT on ``window``.

    The value is computed on ``grid_size`` and ``2 * grid_size`` points and
    the finer one is returned.

    Raises
    ------
    UnresolvedFunction
        If doubling the grid moves the value by more than ``1e-4`` relative
        (and more than ``1e-14`` absolute),
        or ``f`` does not vanish at the window edges.
    """
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    window = _default_window(f) if window is None else window
    coarse = math.sqrt(_sobolev_sq(f, alpha, window, grid_size))
    fine = math.sqrt(_sobolev_sq(f, alpha, window, 2 * grid_size))
    # values below the floor are numerically zero and exempt from the relative test
    if abs(fine - coarse) > max(GRID_TOL * abs(fine), ABS_FLOOR):
        raise UnresolvedFunction(
            f"W^{alpha} norm not resolved: {coarse:.10g} -> {fine:.10g} on grid doubling"
        )
    return fine


def sobolev_inner(f, g, alpha: float, window: tuple[float, float],
                  grid_size: int = 2 * GRID_SIZE) -> complex:
    """``<f, g>_{W^alpha}`` by the same quadrature as :func:`sobolev_norm`."""
    fh, xi, dxi = _transform(f, window, grid_size)
    gh, _, _ = _transform(g, window, grid_size)
    return complex(np.sum((1 + xi * xi) ** alpha * fh * np.conj(gh)) * dxi)


def _support_meets(supp, lo, hi) -> bool:
    if supp is None:
        return True
    if supp[0] >= supp[1]:
        return False
    return supp[0] < hi and supp[1] > lo


@dataclass(frozen=True)
class HormanderNorm:
    """``sup_{|n| <= K} ||phi_n f||_{W^alpha}`` with its maximiser.

    ``truncated`` is set when ``f`` is not negligible at the ends of the
    materialised index range, so the true supremum over all ``n`` may differ.
    """

    value: float
    argmax: int
    truncated: bool
    blocks: dict[int, float] = field(default_factory=dict, repr=False, compare=False)

    def __float__(self) -> float:
        return float(self.value)


def _localized(phi: ScalarFunction, f) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: _values(phi, t) * _values(f, t)


def hormander_norm(f, alpha: float, P: DyadicPartition, grid_size: int = GRID_SIZE) -> HormanderNorm:
    """Hormander norm ``sup_n ||phi_n f||_{W^alpha}`` over the materialised range."""
    if not alpha > 0.5:
        raise ValueError("the Hormander norm needs alpha > 1/2")
    supp = getattr(f, "log_support", None)
    blocks: dict[int, float] = {}
    for n in P.indices:
        lo, hi = P.log_support(n)
        if not _support_meets(supp, lo, hi):
            continue
        blocks[n] = sobolev_norm(_localized(P.phi(n), f), alpha, P.log_window(n), grid_size)
    if not blocks:
        return HormanderNorm(0.0, 0, False, blocks)
    argmax = max(sorted(blocks), key=lambda k: blocks[k])
    value = blocks[argmax]
    inside = supp is not None and supp[0] >= -(P.K + 1) * LN2 and supp[1] <= (P.K + 1) * LN2
    edge = max(blocks.get(-P.K, 0.0), blocks.get(P.K, 0.0))
    truncated = (not inside) and edge > 1e-8 * value
    return HormanderNorm(value, argmax, truncated, blocks)


def hormander_norm_r(f, beta: float, r: float, P: DyadicPartition, grid_size: int = GRID_SIZE) -> HormanderNorm:
    """``H^beta_r`` norm; only the Hilbert exponent ``r = 2`` is implemented.

    For ``r != 2`` the Sobolev factor would be a Bessel-potential ``L^r``
    norm, which this package does not model.
    """
    if r != 2:
        raise NotImplementedError("H^beta_r is implemented for r = 2 only")
    return hormander_norm(f, beta, P, grid_size)


def _probe_range(f) -> tuple[float, float]:
    supp = getattr(f, "log_support", None)
    if supp is not None and supp[1] > supp[0]:
        return supp
    return (-25.0, 25.0)


def _sup_abs(f: ScalarFunction, k: int, s_grid: np.ndarray) -> float:
    vals = np.abs(f.scaled(k, np.exp(s_grid)))
    i = int(np.argmax(vals))
    best = float(vals[i])
    if best == 0.0:
        return 0.0
    lo = s_grid[max(i - 1, 0)]
    hi = s_grid[min(i + 1, s_grid.size - 1)]
    if hi > lo:
        res = minimize_scalar(lambda s: -float(np.abs(f.scaled(k, np.exp(np.array([s]))))[0]),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def mihlin_norm(f: ScalarFunction, n: int, probe_grid: Sequence[float] | None = None,
                tol: float = 1e-6, max_refinements: int = 6) -> float:
    """``sum_{k <= n} sup_t |t^k f^(k)(t)|`` over a log-spaced probe grid.

    ``probe_grid`` holds points ``t``; the default spans the support of ``f``
    or ``t in [e^-25, e^25]``.  The grid is doubled and each maximum polished
    by a bounded scalar search until the sum is stable to ``tol``.
    """
    if n > f.max_order:
        raise OrderTooLow(f"{f.label}: M^{n} needs max_order >= {n}, have {f.max_order}")
    if probe_grid is None:
        lo, hi = _probe_range(f)
        s_grid = np.linspace(lo, hi, 801)
    else:
        s_grid = np.log(np.sort(np.asarray(probe_grid, dtype=float)))
        lo, hi = s_grid[0], s_grid[-1]
    prev = None
    for _ in range(max_refinements):
        total = sum(_sup_abs(f, k, s_grid) for k in range(n + 1))
        if prev is not None and abs(total - prev) <= tol * max(total, 1e-300):
            return total
        prev = total
        s_grid = np.linspace(lo, hi, 2 * s_grid.size - 1)
    return total


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _dyadic_integral(f: ScalarFunction, k: int, centre: float, panels: int = 8) -> float:
    edges = np.linspace(centre - LN2, centre + LN2, panels + 1)
    mids, halves = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    s = (mids[:, None] + halves[:, None] * _GL_NODES[None, :]).ravel()
    w = (halves[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.sum(w * np.abs(f.scaled(k, np.exp(s))) ** 2))


def hormander_condition(f: ScalarFunction, N: int, K: int = 20) -> float:
    """``max_{k <= N} sup_R int_{R/2}^{2R} |t^k f^(k)(t)|^2 dt/t`` for ``R = 2^j``, ``|j| <= K``."""
    if N > f.max_order:
        raise OrderTooLow(f"{f.label}: condition of order {N} needs max_order >= {N}")
    best = 0.0
    for j in range(-K, K + 1):
        centre = j * LN2
        supp = f.log_support
        if supp is not None and not _support_meets(supp, centre - LN2, centre + LN2):
            continue
        for k in range(N + 1):
            best = max(best, _dyadic_integral(f, k, centre))
    return best


@dataclass(frozen=True)
class FunctionMatrix:
    """Square array ``[f_ij]`` of scalar functions sharing ``max_order``."""

    entries: tuple[tuple[ScalarFunction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.entries)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("FunctionMatrix needs a non-empty square grid")
        orders = {f.max_order for r in rows for f in r}
        if len(orders) != 1:
            raise ValueError(f"entries must share max_order, got {sorted(orders)}")
        object.__setattr__(self, "entries", rows)

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def diagonal(cls, funcs: Sequence[ScalarFunction]) -> "FunctionMatrix":
        order = funcs[0].max_order
        zero = _zero(order)
        n = len(funcs)
        return cls(tuple(tuple(funcs[i] if i == j else zero for j in range(n)) for i in range(n)))

    @classmethod
    def column(cls, funcs: Sequence[ScalarFunction]) -> "FunctionMatrix":
        """Entries ``f_i`` in the first column, zero elsewhere."""
        order = funcs[0].max_order
        zero = _zero(order)
        n = len(funcs)
        return cls(tuple(tuple(funcs[i] if j == 0 else zero for j in range(n)) for i in range(n)))


def _zero(order: int) -> ScalarFunction:
    return ScalarFunction(func=lambda t: np.zeros(np.shape(t), dtype=complex), max_order=order,
                          label="0", scaled_derivative=lambda k, t: np.zeros(np.shape(t), dtype=complex),
                          log_support=(0.0, 0.0))


def _gram_norm(entries, alpha, P: DyadicPartition, idx: int, grid: int) -> float:
    n = len(entries)
    lo, hi = P.log_support(idx)
    phi = P.phi(idx)
    window = P.log_window(idx)
    hats = None
    xi = dxi = None
    for i in range(n):
        for k in range(n):
            f = entries[i][k]
            if not _support_meets(f.log_support, lo, hi):
                continue
            h, xi, dxi = _transform(_localized(phi, f), window, grid)
            if hats is None:
                hats = np.zeros((n, n, grid), dtype=complex)
            hats[i, k] = h
    if hats is None:
        return 0.0
    weights = (1 + xi * xi) ** alpha * dxi
    gram = np.einsum("ikx,jkx,x->ij", hats, np.conj(hats), weights)
    lam = hermitian_eig(0.5 * (gram + gram.conj().T)).eigenvalues
    return math.sqrt(max(float(lam[-1]), 0.0))


def row_matrix_norm(F: FunctionMatrix, alpha: float, P: DyadicPartition,
                    grid_size: int = GRID_SIZE) -> float:
    """``sup_m ||G^(m)||_2^(1/2)`` with ``G^(m)_ij = sum_k <phi_m f_ik, phi_m f_jk>_{W^alpha}``."""
    if not alpha > 0.5:
        raise ValueError("row norms need alpha > 1/2")
    best = 0.0
    for idx in P.indices:
        coarse = _gram_norm(F.entries, alpha, P, idx, grid_size)
        fine = _gram_norm(F.entries, alpha, P, idx, 2 * grid_size)
        if abs(fine - coarse) > GRID_TOL * max(fine, 1e-300):
            raise UnresolvedFunction(f"row norm block {idx} not resolved: {coarse:.10g} -> {fine:.10g}")
        best = max(best, fine)
    return best


def localized_orthonormal_family(count: int, alpha: float, P: DyadicPartition,
                                 half_width: float = 0.2,
                                 grid_size: int = 2 * GRID_SIZE) -> list[ScalarFunction]:
    """Functions near ``t = 1`` that are orthonormal in ``W^alpha`` after multiplication by ``phi_0``.

    The raw family is ``b(x / h) x^j`` in ``x = log2 t`` for the base bump
    ``b`` and ``h = half_width``; a Cholesky factor of its localised Gram
    matrix orthonormalises it.
    """
    width = float(half_width)

    def raw(j):
        return lambda t: (bump_log2_jet(np.log2(np.asarray(t, float)).ravel() / width, 0)[0]
                          * (np.log2(np.asarray(t, float)).ravel() / width) ** j).reshape(np.shape(t))

    raws = [raw(j) for j in range(count)]
    phi0 = P.phi(0)
    window = P.log_window(0)
    gram = np.array([[sobolev_inner(_localized(phi0, raws[i]), _localized(phi0, raws[j]), alpha,
                                    window, grid_size) for j in range(count)] for i in range(count)])
    chol = np.linalg.cholesky(0.5 * (gram + gram.conj().T))
    coeffs = np.linalg.inv(chol)  # row i combines raw functions into u_i
    supp = (-width * LN2, width * LN2)
    out = []
    for i in range(count):
        c = coeffs[i].copy()

        def func(t, c=c):
            return sum(c[j] * raws[j](t) for j in range(count) if c[j] != 0)

        out.append(ScalarFunction(func=func, max_order=4, label=f"orthonormal_{i}", log_support=supp))
    return out
