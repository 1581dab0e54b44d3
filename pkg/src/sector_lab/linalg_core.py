"""Dense complex linear algebra on finite-dimensional model spaces.

The model Banach space is a weighted sequence space ``l^p_m`` with norm
``(sum_j w_j |x_j|^p)^(1/p)`` (``max_j |x_j|`` for ``p = inf``).  Matrices are
plain ``complex128`` numpy arrays; :func:`as_matrix` validates them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, NotHermitian, SingularMatrix

__all__ = [
    "ModelSpace",
    "EigDecomposition",
    "OperatorNorm",
    "as_matrix",
    "as_vector",
    "solve",
    "solve_stack",
    "hermitian_eig",
    "pnorm",
    "operator_pnorm",
    "pnorm_ascent",
    "riesz_thorin_bound",
    "PIVOT_THRESHOLD",
    "EIG_TOL",
]

PIVOT_THRESHOLD = 1e-13
EIG_TOL = 1e-10
HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class ModelSpace:
    """Weighted ``l^p`` space of dimension ``dim``.

    ``weights`` are measure weights: ``||x|| = (sum w_j |x_j|^p)^(1/p)``.
    They are ignored for ``p = inf``.
    """

    p: float
    dim: int
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        p = float(self.p)
        if not (p >= 1.0):
            raise ValueError(f"exponent p must be >= 1, got {self.p}")
        if int(self.dim) < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dim}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "dim", int(self.dim))
        if self.weights is not None:
            w = tuple(float(v) for v in self.weights)
            if len(w) != self.dim:
                raise DimensionMismatch(f"{len(w)} weights for dimension {self.dim}")
            if not all(v > 0 and math.isfinite(v) for v in w):
                raise ValueError("weights must be positive and finite")
            object.__setattr__(self, "weights", w)

    @property
    def is_hilbert(self) -> bool:
        return self.p == 2.0

    @property
    def weight_array(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.dim)
        return np.asarray(self.weights, dtype=float)

    def scaling(self) -> np.ndarray:
        """Diagonal of the isometry ``l^p(w) -> l^p``, i.e. ``w^(1/p)``."""
        if self.weights is None or math.isinf(self.p):
            return np.ones(self.dim)
        return self.weight_array ** (1.0 / self.p)

    def norm(self, x) -> float:
        return pnorm(x, self)

    def with_p(self, p: float) -> "ModelSpace":
        return ModelSpace(p, self.dim, self.weights)


@dataclass(frozen=True)
class EigDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    def apply(self, values) -> np.ndarray:
        """Return ``V diag(values) V*``."""
        v = self.eigenvectors
        return (v * np.asarray(values)) @ v.conj().T


@dataclass(frozen=True)
class OperatorNorm:
    """Value of ``||T||_{p->p}``.

    ``value`` is exact when ``exact`` is true, otherwise it is a lower bound
    realised by an explicit vector; ``upper_bound`` is the Riesz-Thorin bound.
    """

    value: float
    exact: bool
    upper_bound: float
    p: float
    restarts: int = 0
    maximizer: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __float__(self) -> float:
        return float(self.value)


def as_matrix(a, *, square: bool = False) -> np.ndarray:
    m = np.array(a, dtype=complex, copy=True)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def as_vector(x, dim: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=complex)
    if v.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch(f"vector length {v.shape[0]} != dimension {dim}")
    return v


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` by LU with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides.  Raises
    :class:`SingularMatrix` when a pivot is below ``1e-13 * max|a_ij|``.
    """
    a = as_matrix(a, square=True)
    b = np.asarray(b, dtype=complex)
    if b.shape[0] != a.shape[0]:
        raise DimensionMismatch(f"rhs has {b.shape[0]} rows, matrix has {a.shape[0]}")
    scale = np.max(np.abs(a)) if a.size else 0.0
    if scale == 0.0:
        raise SingularMatrix("zero matrix")
    with warnings.catch_warnings():
        # exact zero pivots are reported below as SingularMatrix
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    pivots = np.abs(np.diag(lu))
    if np.min(pivots) < PIVOT_THRESHOLD * scale:
        raise SingularMatrix(
            f"pivot {np.min(pivots):.3e} below {PIVOT_THRESHOLD:g} * {scale:.3e}"
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def solve_stack(a_stack, b, *, residual_tol: float = 1e-10) -> np.ndarray:
    """Batched solve for a stack of matrices ``a_stack[k] x_k = b``.

    Used for quadrature over many resolvent nodes.  Singularity is detected
    through the LAPACK failure or a residual check on a fixed probe vector
    in place of a pivot inspection.
    """
    a_stack = np.asarray(a_stack, dtype=complex)
    b = np.asarray(b, dtype=complex)
    vector_rhs = b.ndim == 1
    rhs = b[:, None] if vector_rhs else b
    rhs = np.broadcast_to(rhs, a_stack.shape[:-1] + rhs.shape[-1:])
    try:
        x = np.linalg.solve(a_stack, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrix(str(exc)) from exc
    probe = np.cos(np.arange(rhs.shape[-1]) + 0.5)
    xv = x @ probe
    bv = rhs @ probe
    res = np.linalg.norm(np.einsum("kij,kj->ki", a_stack, xv) - bv, axis=-1)
    scale = (np.max(np.abs(a_stack), axis=(-2, -1)) * a_stack.shape[-1] * np.linalg.norm(xv, axis=-1)
             + np.linalg.norm(bv, axis=-1))
    if not np.all(np.isfinite(x)) or np.any(res > residual_tol * scale):
        raise SingularMatrix("residual check failed in batched solve")
    return x[..., 0] if vector_rhs else x


def _round_robin(m: int) -> list[tuple[np.ndarray, np.ndarray]]:
    # circle-method tournament: m-1 rounds of disjoint pairs cover all pairs
    players = list(range(m + (m % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        p, q = [], []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a < m and b < m:
                p.append(min(a, b))
                q.append(max(a, b))
        rounds.append((np.array(p, dtype=int), np.array(q, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def hermitian_eig(a, *, tol: float = 1e-15, max_sweeps: int = 60) -> EigDecomposition:
    """Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi.

    Rotations are grouped with a round-robin ordering so that every step of
    a sweep applies ``m/2`` disjoint complex rotations at once.
    """
    a = as_matrix(a, square=True)
    m = a.shape[0]
    fro = np.linalg.norm(a)
    asym = np.linalg.norm(a - a.conj().T)
    if asym > HERMITIAN_TOL * max(fro, 1e-300):
        raise NotHermitian(f"relative asymmetry {asym / max(fro, 1e-300):.3e}")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(m, dtype=complex)
    if m == 1 or fro == 0.0:
        return EigDecomposition(np.real(np.diag(a)).copy(), v, 0)

    rounds = _round_robin(m)
    offdiag = ~np.eye(m, dtype=bool)
    sweeps = 0
    while sweeps < max_sweeps:
        off = np.linalg.norm(a[offdiag])
        if off <= tol * fro:
            break
        sweeps += 1
        for p, q in rounds:
            b = a[p, q]
            mag = np.abs(b)
            active = mag > 1e-300
            if not np.any(active):
                continue
            p, q, b, mag = p[active], q[active], b[active], mag[active]
            app = a[p, p].real
            aqq = a[q, q].real
            phase = np.conj(b) / mag  # e^{-i arg b}
            theta = (aqq - app) / (2.0 * mag)
            sgn = np.where(theta >= 0, 1.0, -1.0)
            t = sgn / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            u_pp, u_pq = c, s
            u_qp, u_qq = -s * phase, c * phase

            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * u_pp + cq * u_qp
            a[:, q] = cp * u_pq + cq * u_qq
            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = np.conj(u_pp)[:, None] * rp + np.conj(u_qp)[:, None] * rq
            a[q, :] = np.conj(u_pq)[:, None] * rp + np.conj(u_qq)[:, None] * rq
            a[p, q] = 0.0
            a[q, p] = 0.0
            vp, vq = v[:, p].copy(), v[:, q].copy()
            v[:, p] = vp * u_pp + vq * u_qp
            v[:, q] = vp * u_pq + vq * u_qq

    w = np.real(np.diag(a))
    order = np.argsort(w, kind="stable")
    return EigDecomposition(w[order].copy(), v[:, order].copy(), sweeps)


def pnorm(x, space: ModelSpace) -> float:
    """Weighted ``l^p`` norm; ``x`` may carry extra leading batch axes."""
    x = np.asarray(x, dtype=complex)
    if x.shape[-1] != space.dim:
        raise DimensionMismatch(f"vector length {x.shape[-1]} != dimension {space.dim}")
    ax = np.abs(x)
    if math.isinf(space.p):
        return np.max(ax, axis=-1) if x.ndim > 1 else float(np.max(ax))
    w = space.weight_array
    p = space.p
    if p == 2.0:
        out = np.sqrt(np.sum(w * ax * ax, axis=-1))
    elif p == 1.0:
        out = np.sum(w * ax, axis=-1)
    else:
        # factor out the max to keep |x|^p in range
        top = np.max(ax, axis=-1, keepdims=True)
        safe = np.where(top > 0, top, 1.0)
        out = safe[..., 0] * np.sum(w * (ax / safe) ** p, axis=-1) ** (1.0 / p)
        out = np.where(top[..., 0] > 0, out, 0.0)
    return out if x.ndim > 1 else float(out)


def _unweighted(t: np.ndarray, space: ModelSpace) -> np.ndarray:
    d = space.scaling()
    return (d[:, None] * t) / d[None, :]


def _norm1(t: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(t), axis=0)))


def _norm_inf(t: np.ndarray) -> float:
    return float(np.max(np.sum(np.abs(t), axis=1)))


def _norm2(t: np.ndarray) -> float:
    gram = t.conj().T @ t
    lam = hermitian_eig(0.5 * (gram + gram.conj().T)).eigenvalues
    return float(math.sqrt(max(lam[-1], 0.0)))


def riesz_thorin_bound(t, space: ModelSpace) -> float:
    """``||T||_{1,w}^(1/p) ||T||_inf^(1-1/p)`` on the weighted measure space."""
    t = as_matrix(t, square=True)
    p = space.p
    if math.isinf(p):
        return _norm_inf(t)
    w = space.weight_array
    n1 = _norm1((w[:, None] * t) / w[None, :])
    ninf = _norm_inf(t)
    return float(n1 ** (1.0 / p) * ninf ** (1.0 - 1.0 / p))


def _dual(x: np.ndarray, p: float) -> np.ndarray:
    # unit vectors in l^q norming the columns of x:  <x, dual> = ||x||_p
    ax = np.abs(x)
    nrm = np.sum(ax**p, axis=0) ** (1.0 / p)
    safe = np.where(nrm > 0, nrm, 1.0)
    phase = np.where(ax > 0, x / np.where(ax > 0, ax, 1.0), 0.0)
    return np.where(nrm > 0, phase * (ax / safe) ** (p - 1.0), 0.0)


def _lp(x: np.ndarray, p: float) -> np.ndarray:
    return np.sum(np.abs(x) ** p, axis=0) ** (1.0 / p)


def pnorm_ascent(t, space: ModelSpace, *, restarts: int = 50, seed: int = 0,
                 max_iter: int = 200) -> OperatorNorm:
    """Boyd/Higham dual-norm ascent for ``||T||_{p->p}``.

    All restarts iterate together as columns of one matrix, each stopping at
    its own fixed point.  The result is a lower bound realised by the
    returned maximizer; it is reported together with the Riesz-Thorin upper
    bound.
    """
    t = as_matrix(t, square=True)
    if t.shape[0] != space.dim:
        raise DimensionMismatch(f"matrix size {t.shape[0]} != dimension {space.dim}")
    p = space.p
    if p == 1.0 or math.isinf(p):
        raise ValueError("ascent is only defined for 1 < p < inf")
    q = p / (p - 1.0)
    s = _unweighted(t, space)
    sh = s.conj().T
    m = s.shape[0]
    rng = np.random.default_rng(seed)
    starts = [np.ones(m, dtype=complex)]
    for _ in range(1, restarts):
        starts.append(rng.standard_normal(m) + 1j * rng.standard_normal(m))
    x = np.stack(starts, axis=1)
    x = x / _lp(x, p)
    best = np.zeros(restarts)
    best_x = x.copy()
    active = np.ones(restarts, dtype=bool)
    for _ in range(max_iter):
        y = s @ x
        est = _lp(y, p)
        better = active & (est > best)
        best[better] = est[better]
        best_x[:, better] = x[:, better]
        z = sh @ _dual(y, p)
        zq = _lp(z, q)
        done = (zq <= np.real(np.sum(z.conj() * x, axis=0)) * (1 + 1e-13)) | (zq == 0.0)
        active &= ~done
        if not active.any():
            break
        x[:, active] = _dual(z[:, active], q)
    # first restart attaining the maximum, matching a sequential scan
    k = int(np.argmax(best))
    d = space.scaling()
    return OperatorNorm(float(best[k]), False, riesz_thorin_bound(t, space), p, restarts, best_x[:, k] / d)


def operator_pnorm(t, space: ModelSpace, *, restarts: int = 50, seed: int = 0) -> OperatorNorm:
    """``||T||`` on the model space: exact for p in {1, 2, inf}, else a lower bound."""
    t = as_matrix(t, square=True)
    if t.shape[0] != space.dim:
        raise DimensionMismatch(f"matrix size {t.shape[0]} != dimension {space.dim}")
    p = space.p
    if math.isinf(p):
        v = _norm_inf(t)
        return OperatorNorm(v, True, v, p)
    s = _unweighted(t, space)
    if p == 1.0:
        v = _norm1(s)
        return OperatorNorm(v, True, v, p)
    if p == 2.0:
        v = _norm2(s)
        return OperatorNorm(v, True, min(v, riesz_thorin_bound(t, space)), p)
    return pnorm_ascent(t, space, restarts=restarts, seed=seed)
