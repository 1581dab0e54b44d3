"""Dyadic partitions of unity ``phi_n = phi_0(2^-n .)``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scalar import LN2, ScalarFunction, bump


@dataclass(frozen=True)
class DyadicPartition:
    """Dyadic family generated by a bump on ``(1/2, 2)``; indices ``|n| <= K`` are materialised."""

    base_bump: ScalarFunction
    K: int
    sharpness: float = 1.0

    @property
    def indices(self) -> range:
        return range(-self.K, self.K + 1)

    def phi(self, n: int) -> ScalarFunction:
        """``phi_n(t) = phi_0(2^-n t)``."""
        return self.base_bump.dilate(2.0 ** (-n))

    def log_support(self, n: int) -> tuple[float, float]:
        """Support of ``phi_n`` in ``s = ln t``."""
        return ((n - 1) * LN2, (n + 1) * LN2)

    def log_window(self, n: int, half_width: float = 2 * LN2) -> tuple[float, float]:
        """Periodic transform window centred at ``n ln 2``."""
        return (n * LN2 - half_width, n * LN2 + half_width)

    def evaluate(self, t) -> np.ndarray:
        """Array ``[phi_n(t)]`` with shape ``(2K + 1,) + t.shape``."""
        t = np.asarray(t, dtype=float)
        return np.real(np.array([self.base_bump(t / 2.0**n) for n in self.indices]))

    def covers(self, lam_min: float, lam_max: float) -> bool:
        """Coverage rule ``2^(-K+1) < lam_min`` and ``2^(K-1) > lam_max``."""
        return 2.0 ** (-self.K + 1) < lam_min and 2.0 ** (self.K - 1) > lam_max

    @classmethod
    def covering(cls, lam_min: float, lam_max: float, sharpness: float = 1.0) -> "DyadicPartition":
        """Smallest partition satisfying :meth:`covers` for the given spectral range."""
        k = 1
        while not (2.0 ** (-k + 1) < lam_min and 2.0 ** (k - 1) > lam_max):
            k += 1
        return make_partition(k, sharpness)


def make_partition(K: int, transition_sharpness: float = 1.0) -> DyadicPartition:
    """Materialise ``phi_n`` for ``|n| <= K``.

    The base bump is ``r(1 - |log2 t|)`` for the smooth ramp
    ``r(y) = h(y) / (h(y) + h(1 - y))``, ``h(y) = exp(-sharpness / y)``.  Since
    ``r(y) + r(1 - y) = 1``, neighbouring dilates sum to one.
    """
    if int(K) < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    return DyadicPartition(bump(transition_sharpness), int(K), float(transition_sharpness))
