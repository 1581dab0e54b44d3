"""Holomorphic functional calculus for finite model sectorial operators.

Two independent routes to ``f(A)`` are provided.  :func:`contour_calculus`
evaluates the Cauchy integral over the boundary of a sector with resolvent
solves only; :func:`spectral_calculus` applies ``f`` to an eigendecomposition
and serves as its oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ContourNotConverged,
    IllConditionedEigenbasis,
    NotSectorial,
    SingularMatrix,
    SpectrumHit,
    SpectrumNotCovered,
)
from .function_space.partition import DyadicPartition
from .function_space.scalar import ScalarFunction
from .linalg_core import (
    EigDecomposition,
    ModelSpace,
    as_matrix,
    hermitian_eig,
    solve,
    solve_stack,
)

__all__ = [
    "SectorialOperator",
    "Contour",
    "ContourResult",
    "resolvent",
    "semigroup",
    "expm_taylor",
    "imaginary_power",
    "imaginary_power_apply",
    "contour_calculus",
    "spectral_calculus",
    "paley_littlewood_family",
    "EIGENBASIS_COND_LIMIT",
]

EIGENBASIS_COND_LIMIT = 1e6
HERMITIAN_RTOL = 1e-12
CERTIFICATE_RAYS = 64


@dataclass(frozen=True)
class SectorialOperator:
    """Matrix ``A`` with spectrum in the sector ``|arg z| <= omega`` and ``0`` not in it.

    Construct through :meth:`from_matrix`, which computes the spectral cache
    of Hermitian matrices eagerly and a sampled sectoriality constant.
    """

    matrix: np.ndarray = field(repr=False)
    space: ModelSpace
    sector_angle: float
    self_adjoint: bool
    spectral_cache: EigDecomposition | None = field(default=None, repr=False)
    sectoriality_constant: float = float("nan")
    spectrum: np.ndarray = field(default=None, repr=False)

    @classmethod
    def from_matrix(cls, matrix, space: ModelSpace | None = None,
                    sector_angle: float | None = None, certify: bool = True,
                    spectral_cache: EigDecomposition | None = None) -> "SectorialOperator":
        """Validate ``matrix`` and wrap it.

        A known ``spectral_cache`` for a Hermitian matrix may be supplied; it
        is accepted after a residual check instead of running the eigensolver.
        """
        a = as_matrix(matrix, square=True)
        m = a.shape[0]
        space = ModelSpace(2.0, m) if space is None else space
        if space.dim != m:
            raise NotSectorial(f"space dimension {space.dim} does not match matrix size {m}")
        fro = np.linalg.norm(a)
        hermitian = np.linalg.norm(a - a.conj().T) <= HERMITIAN_RTOL * max(fro, 1e-300)
        cache = None
        if hermitian and spectral_cache is not None:
            v, lam = spectral_cache.eigenvectors, spectral_cache.eigenvalues
            res = np.linalg.norm(a @ v - v * lam)
            orth = np.linalg.norm(v.conj().T @ v - np.eye(m))
            if res > 1e-10 * fro or orth > 1e-10:
                raise NotSectorial("supplied spectral decomposition does not match the matrix")
            order = np.argsort(lam, kind="stable")
            cache = EigDecomposition(np.asarray(lam, float)[order], v[:, order])
        elif hermitian:
            cache = hermitian_eig(a)
        if cache is not None:
            spec = cache.eigenvalues.astype(complex)
            if spec[0].real <= 0:
                raise NotSectorial(f"self-adjoint matrix has eigenvalue {spec[0].real:.3e} <= 0")
        else:
            spec = np.linalg.eigvals(a)
            smin = np.linalg.svd(a, compute_uv=False)[-1]
            if smin <= 1e-14 * fro or np.any(np.abs(np.angle(spec)) >= math.pi - 1e-12):
                raise NotSectorial("matrix is singular or has spectrum on the negative axis")
        arg_max = float(np.max(np.abs(np.angle(spec))))
        if sector_angle is None:
            sector_angle = max(arg_max, 1e-3)
        sector_angle = float(sector_angle)
        if not (0 < sector_angle < math.pi):
            raise NotSectorial(f"sector angle {sector_angle} outside (0, pi)")
        if arg_max > sector_angle + 1e-12:
            raise NotSectorial(f"spectrum reaches angle {arg_max:.4f} > {sector_angle:.4f}")
        op = cls(a, space, sector_angle, bool(hermitian), cache, float("nan"), np.sort_complex(spec))
        if certify:
            const = op.certificate()
            object.__setattr__(op, "sectoriality_constant", const)
        return op

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.spectrum)))

    @property
    def spectral_bounds(self) -> tuple[float, float]:
        mod = np.abs(self.spectrum)
        return float(np.min(mod)), float(np.max(mod))

    def certificate(self, margin: float = 0.1, rays: int = CERTIFICATE_RAYS,
                    radii: int = 24, limit: float = 1e8) -> float:
        """Sampled ``sup ||lam R(lam, A)||`` on ``rays`` rays with ``|arg lam| >= omega + margin``.

        Raises :class:`NotSectorial` if the sampled constant exceeds ``limit``.
        """
        lo_ang = min(self.sector_angle + margin, math.pi)
        half = rays // 2
        angles = np.linspace(lo_ang, math.pi, half)
        angles = np.concatenate([angles, -angles])
        lmin, lmax = self.spectral_bounds
        r = np.geomspace(lmin / 100, 100 * lmax, radii)
        lam = (r[None, :] * np.exp(1j * angles)[:, None]).ravel()
        if self.dim > 64 and self.spectral_cache is not None and self.space.p == 2.0:
            worst = float(np.max(np.abs(lam) * _resolvent_norm_power(self.spectral_cache, self.space, lam)))
            if not math.isfinite(worst) or worst > limit:
                raise NotSectorial(f"sampled sectoriality constant {worst:.3e} exceeds {limit:g}")
            return worst
        eye = np.eye(self.dim)
        stack = lam[:, None, None] * eye - self.matrix
        try:
            res = solve_stack(stack, np.broadcast_to(eye, stack.shape))
        except SingularMatrix as exc:
            raise NotSectorial("resolvent fails outside the sector") from exc
        worst = float(np.max(np.abs(lam) * _stack_norm_bound(res, self.space)))
        if not math.isfinite(worst) or worst > limit:
            raise NotSectorial(f"sampled sectoriality constant {worst:.3e} exceeds {limit:g}")
        return worst


def _resolvent_norm_power(cache: EigDecomposition, space: ModelSpace, lam: np.ndarray,
                          iterations: int = 60) -> np.ndarray:
    """``||R(lam, A)||`` on weighted ``l^2`` by batched power iteration through the eigenbasis."""
    v, mu = cache.eigenvectors, cache.eigenvalues
    d = np.sqrt(space.weight_array)
    inv = 1.0 / (lam[:, None] - mu[None, :])
    # rows of x are iterates; T = D R D^-1 and T* = D^-1 R* D
    x = np.repeat((np.cos(np.arange(space.dim) * 0.7 + 0.3) + 0j)[None, :], lam.size, axis=0)
    est = np.zeros(lam.size)
    for _ in range(iterations):
        x = x / np.linalg.norm(x, axis=1, keepdims=True)
        y = d * ((((x / d) @ v.conj()) * inv) @ v.T)
        est = np.linalg.norm(y, axis=1)
        x = ((((y * d) @ v.conj()) * np.conj(inv)) @ v.T) / d
    return est


def _stack_norm_bound(stack: np.ndarray, space: ModelSpace) -> np.ndarray:
    """Upper bounds for ``||T_k||`` on ``space``; exact at p in {1, 2, inf}."""
    p = space.p
    if math.isinf(p):
        return np.max(np.sum(np.abs(stack), axis=2), axis=1)
    w = space.weight_array
    if p == 2.0:
        d = np.sqrt(w)
        return np.linalg.norm(d[:, None] * stack / d[None, :], ord=2, axis=(1, 2))
    n1 = np.max(np.sum(np.abs(w[:, None] * stack / w[None, :]), axis=1), axis=1)
    if p == 1.0:
        return n1
    ninf = np.max(np.sum(np.abs(stack), axis=2), axis=1)
    return n1 ** (1.0 / p) * ninf ** (1.0 - 1.0 / p)


@dataclass(frozen=True)
class Contour:
    """Two rays ``r e^{+- i psi}`` with composite Gauss-Legendre nodes in ``u = ln r``.

    ``weights`` include the Jacobian ``r`` of ``dr = r du``.
    """

    angle: float
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    r_min: float = 0.0
    r_max: float = 0.0
    panels_per_decade: int = 4

    @classmethod
    def build(cls, angle: float, r_min: float, r_max: float, panels_per_decade: int = 4,
              order: int = 8) -> "Contour":
        u0, u1 = math.log(r_min), math.log(r_max)
        decades = (u1 - u0) / math.log(10.0)
        panels = max(1, int(math.ceil(decades * panels_per_decade)))
        x, w = np.polynomial.legendre.leggauss(order)
        edges = np.linspace(u0, u1, panels + 1)
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
        u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
        wu = (half[:, None] * w[None, :]).ravel()
        r = np.exp(u)
        return cls(float(angle), r, wu * r, float(r_min), float(r_max), panels_per_decade)


@dataclass(frozen=True)
class ContourResult:
    value: np.ndarray
    change: float
    panels_per_decade: int
    contour: Contour = field(repr=False)


def resolvent(A: SectorialOperator, lam: complex) -> np.ndarray:
    """``R(lam, A) = (lam - A)^(-1)``."""
    rho = A.spectral_radius
    dist = float(np.min(np.abs(A.spectrum - lam)))
    if dist <= 1e-10 * rho:
        raise SpectrumHit(f"lambda = {lam} lies on the spectrum (distance {dist:.3e})")
    m = A.dim
    try:
        return solve(lam * np.eye(m) - A.matrix, np.eye(m, dtype=complex))
    except SingularMatrix as exc:
        raise SpectrumHit(str(exc)) from exc


def expm_taylor(x, degree: int = 20) -> np.ndarray:
    """Scaling and squaring: ``exp(x)`` from a Taylor polynomial on ``x / 2^s``, ``||x/2^s||_1 <= 1/2``."""
    x = as_matrix(x, square=True)
    norm1 = float(np.max(np.sum(np.abs(x), axis=0)))
    s = max(0, int(math.ceil(math.log2(norm1 / 0.5)))) if norm1 > 0.5 else 0
    y = x / 2.0**s
    m = x.shape[0]
    term = np.eye(m, dtype=complex)
    out = term.copy()
    for k in range(1, degree + 1):
        term = term @ y / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def semigroup(A: SectorialOperator, z: complex, method: str = "auto") -> np.ndarray:
    """``exp(-z A)``.

    ``method`` is ``"spectral"`` (``V e^{-z Lambda} V*``, Hermitian ``A``
    only), ``"taylor"`` (scaling and squaring), or ``"auto"``.
    """
    z = complex(z)
    if method == "auto":
        method = "spectral" if A.self_adjoint else "taylor"
    if method == "spectral":
        if A.spectral_cache is None:
            raise ValueError("spectral semigroup needs a self-adjoint operator")
        if z.real < 0:
            raise ValueError("semigroup needs Re z >= 0")
        return A.spectral_cache.apply(np.exp(-z * A.spectral_cache.eigenvalues))
    if method == "taylor":
        if z.real <= 0 and not A.self_adjoint:
            raise ValueError("semigroup needs Re z > 0")
        return expm_taylor(-z * A.matrix)
    raise ValueError(f"unknown semigroup method {method!r}")


def _eigenbasis(A: SectorialOperator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if A.spectral_cache is not None:
        v = A.spectral_cache.eigenvectors
        return A.spectral_cache.eigenvalues.astype(complex), v, v.conj().T
    w, v = np.linalg.eig(A.matrix)
    cond = np.linalg.cond(v)
    if not np.isfinite(cond) or cond >= EIGENBASIS_COND_LIMIT:
        raise IllConditionedEigenbasis(f"eigenvector condition number {cond:.3e}")
    return w, v, np.linalg.inv(v)


def spectral_calculus(A: SectorialOperator, f) -> np.ndarray:
    """``V f(Lambda) V^(-1)``; ``f`` is a :class:`ScalarFunction` or a vectorised callable."""
    lam, v, vinv = _eigenbasis(A)
    if A.spectral_cache is not None:
        vals = f(lam.real) if not isinstance(f, ScalarFunction) else f.value(lam.real)
    else:
        vals = f(lam) if not isinstance(f, ScalarFunction) else f.value(lam)
    return (v * np.asarray(vals, dtype=complex)) @ vinv


def imaginary_power(A: SectorialOperator, t: float) -> np.ndarray:
    """``A^{it} = V diag(lam_j^{it}) V^(-1)`` with the principal logarithm."""
    lam, v, vinv = _eigenbasis(A)
    return (v * np.exp(1j * float(t) * np.log(lam))) @ vinv


def imaginary_power_apply(A: SectorialOperator, t, x) -> np.ndarray:
    """Rows ``A^{i t_k} x`` for an array of ``t``, without forming the matrices."""
    lam, v, vinv = _eigenbasis(A)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    coeff = vinv @ np.asarray(x, dtype=complex)
    phases = np.exp(1j * np.outer(t, np.log(lam)))
    return (phases * coeff[None, :]) @ v.T


def _contour_angle(A: SectorialOperator, f: ScalarFunction, angle: float | None) -> float:
    if angle is None:
        upper = min(f.sector, math.pi) if f.sector > 0 else math.pi / 2
        angle = 0.5 * (A.sector_angle + min(upper, math.pi - 1e-3))
    if not (A.sector_angle < angle < max(f.sector, A.sector_angle)):
        raise ValueError(f"contour angle {angle:.4f} must lie in ({A.sector_angle:.4f}, {f.sector:.4f})")
    return float(angle)


def _regularise(f: ScalarFunction):
    c0, cinf = complex(f.limit_zero), complex(f.limit_inf)
    if c0 == 0 and cinf == 0:
        return f.func, c0, cinf

    def g(z):
        return f.func(z) - c0 / (1 + z) - cinf * z / (1 + z)

    return g, c0, cinf


def _cauchy_quadrature(matrix: np.ndarray, g, contour: Contour) -> np.ndarray:
    m = matrix.shape[0]
    eye = np.eye(m, dtype=complex)
    total = np.zeros((m, m), dtype=complex)
    # upper ray traversed inwards, lower ray outwards
    for sign in (+1, -1):
        e = np.exp(1j * sign * contour.angle)
        lam = contour.nodes * e
        stack = lam[:, None, None] * eye - matrix
        res = solve_stack(stack, np.broadcast_to(eye, stack.shape))
        coef = -sign * e * contour.weights * np.asarray(g(lam), dtype=complex)
        total += np.tensordot(coef, res, axes=(0, 0))
    return total / (2j * math.pi)


def contour_calculus(A: SectorialOperator, f: ScalarFunction, epsilon: float | None = None,
                     angle: float | None = None, tol: float = 1e-8, fail_tol: float = 1e-6,
                     max_doublings: int = 5, return_info: bool = False):
    """``f(A) = (2 pi i)^(-1) int f(lam) (lam - A)^(-1) dlam`` over the boundary of a sector.

    ``f`` must be holomorphic on a sector beyond ``A.sector_angle``.  Nonzero
    limits at 0 or infinity are split off as ``c0 (1 + A)^(-1)`` and
    ``c_inf A (1 + A)^(-1)``.  Nodes are doubled until the relative change
    is at most ``tol``.

    Raises
    ------
    ContourNotConverged
        If the final doubling still changes the result by more than ``fail_tol``.
    """
    if not f.holomorphic:
        raise ValueError(f"{f.label} carries no holomorphic extension")
    eps = float(epsilon if epsilon is not None else (f.decay if f.decay > 0 else 1.0))
    if eps <= 0:
        raise ValueError("decay exponent must be positive")
    psi = _contour_angle(A, f, angle)
    g, c0, cinf = _regularise(f)
    lmin, lmax = A.spectral_bounds
    small = 1e-12
    r_min = min(lmin / 10, lmin * small ** (1.0 / (1.0 + eps)))
    r_max = max(10 * lmax, lmax * small ** (-1.0 / eps))
    ppd = 4
    prev = _cauchy_quadrature(A.matrix, g, Contour.build(psi, r_min, r_max, ppd))
    change = math.inf
    for _ in range(max_doublings):
        ppd *= 2
        contour = Contour.build(psi, r_min, r_max, ppd)
        cur = _cauchy_quadrature(A.matrix, g, contour)
        scale = max(np.linalg.norm(cur), 1e-300)
        change = float(np.linalg.norm(cur - prev) / scale)
        prev = cur
        if change <= tol:
            break
    if change > fail_tol:
        raise ContourNotConverged(f"relative change {change:.3e} after {max_doublings} doublings")
    out = prev
    if c0 != 0 or cinf != 0:
        m = A.dim
        inv = solve(np.eye(m) + A.matrix, np.eye(m, dtype=complex))
        out = out + c0 * inv + cinf * (A.matrix @ inv)
    if return_info:
        return ContourResult(out, change, ppd, contour)
    return out


def paley_littlewood_family(A: SectorialOperator, P: DyadicPartition) -> list[np.ndarray]:
    """``[phi_n(A)]`` for ``n = -K..K`` through the spectral calculus."""
    if not A.self_adjoint:
        raise ValueError("the dyadic family is built for self-adjoint operators")
    lmin, lmax = A.spectral_bounds
    if not P.covers(lmin, lmax):
        raise SpectrumNotCovered(
            f"K = {P.K} does not cover spectrum [{lmin:.3e}, {lmax:.3e}]"
        )
    return [spectral_calculus(A, P.phi(n)) for n in P.indices]
