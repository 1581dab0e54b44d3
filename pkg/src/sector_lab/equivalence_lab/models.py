"""Model sectorial operators on finite weighted sequence spaces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import InvalidSpec, NotSectorial
from ..functional_calculus import SectorialOperator
from ..linalg_core import EigDecomposition, ModelSpace

__all__ = ["ModelSpec", "build_model", "translation_grid", "MODEL_KINDS"]

MODEL_KINDS = ("laplacian1d", "laplacian2d", "diagonal", "weighted_translation")


@dataclass(frozen=True)
class ModelSpec:
    """Recipe for a model operator.

    ``parameters`` by kind: ``diagonal`` takes ``eigenvalues``;
    ``weighted_translation`` takes ``alpha`` (default 1) and ``L``
    (default 20).  ``m`` is the grid size per axis for ``laplacian2d`` and
    is implied by the eigenvalue list for ``diagonal``.
    """

    kind: str
    m: int = 8
    p: float = 2.0
    parameters: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ModelSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise InvalidSpec("model spec needs a 'kind'")
        extra = set(data) - {"kind", "m", "p", "parameters"}
        if extra:
            raise InvalidSpec(f"unknown model spec keys {sorted(extra)}")
        params = dict(data.get("parameters", {}))
        kind = data["kind"]
        m = data.get("m")
        if kind == "diagonal" and m is None:
            m = len(params.get("eigenvalues", []))
        p = data.get("p", 2.0)
        p = math.inf if p in ("inf", "infinity") else float(p)
        return cls(kind, int(m if m is not None else 8), p, params)

    def to_dict(self) -> dict:
        p = "inf" if math.isinf(self.p) else self.p
        return {"kind": self.kind, "m": self.m, "p": p, "parameters": dict(self.parameters)}


def _tridiag(m: int) -> np.ndarray:
    return 2.0 * np.eye(m) - np.eye(m, k=1) - np.eye(m, k=-1)


def translation_grid(m: int, L: float) -> tuple[np.ndarray, np.ndarray]:
    """Centred frequencies ``xi_j`` on ``[-L, L]`` and dual points ``s_k`` with ``d_xi d_s = 2 pi / m``."""
    if m < 2:
        raise InvalidSpec("weighted_translation needs m >= 2")
    dxi = 2.0 * L / (m - 1)
    ds = 2.0 * math.pi / (m * dxi)
    centred = np.arange(m) - (m - 1) / 2.0
    return centred * dxi, centred * ds


def _weighted_translation(m: int, alpha: float, L: float):
    xi, s = translation_grid(m, L)
    four = np.exp(-1j * np.outer(xi, s)) / math.sqrt(m)
    # A = F diag(e^s) F*, so A^{it} conjugates multiplication by e^{its}, a shift by t in xi
    a = (four * np.exp(s)) @ four.conj().T
    a = 0.5 * (a + a.conj().T)
    return a, (1.0 + xi * xi) ** alpha, EigDecomposition(np.exp(s), four)


def build_model(spec: ModelSpec, certify: bool = True) -> tuple[SectorialOperator, ModelSpace]:
    """Return the operator and its space for ``spec``.

    Raises :class:`InvalidSpec` for unknown kinds, bad sizes, or operators
    that fail the sectoriality certificate.
    """
    if spec.kind not in MODEL_KINDS:
        raise InvalidSpec(f"unknown model kind {spec.kind!r}; expected one of {MODEL_KINDS}")
    if spec.m < 1:
        raise InvalidSpec("m must be >= 1")
    if not spec.p >= 1:
        raise InvalidSpec("p must be >= 1")
    weights = None
    cache = None
    if spec.kind == "laplacian1d":
        a = _tridiag(spec.m)
    elif spec.kind == "laplacian2d":
        t = _tridiag(spec.m)
        eye = np.eye(spec.m)
        a = np.kron(t, eye) + np.kron(eye, t)
    elif spec.kind == "diagonal":
        lam = np.asarray(spec.parameters.get("eigenvalues", []), dtype=float)
        if lam.size == 0 or np.any(lam <= 0) or not np.all(np.isfinite(lam)):
            raise InvalidSpec("diagonal model needs positive finite eigenvalues")
        a = np.diag(lam)
    else:
        if spec.p != 2.0:
            raise InvalidSpec("weighted_translation lives on a weighted l^2 space")
        alpha = float(spec.parameters.get("alpha", 1.0))
        L = float(spec.parameters.get("L", 20.0))
        if L <= 0:
            raise InvalidSpec("L must be positive")
        a, w, cache = _weighted_translation(spec.m, alpha, L)
        weights = tuple(w)
    space = ModelSpace(spec.p, a.shape[0], weights)
    try:
        op = SectorialOperator.from_matrix(a, space, certify=certify, spectral_cache=cache)
    except NotSectorial as exc:
        raise InvalidSpec(f"model {spec.kind} is not sectorial: {exc}") from exc
    return op, space
