"""Scalar functions on (0, inf) with access to scaled derivatives.

Every :class:`ScalarFunction` exposes ``scaled(k, t) = t^k f^(k)(t)``, the
quantity that enters the Mihlin norm and the Hormander integral condition.
Presets carry closed forms; other functions fall back to Richardson
extrapolated central differences in the log variable ``s = ln t``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..errors import InvalidSpec, OrderTooLow

__all__ = [
    "ScalarFunction",
    "constant",
    "imag_power",
    "exp_decay",
    "resolvent_kernel",
    "bump",
    "bump_combo",
    "hinf0_presets",
    "from_string",
    "stirling1",
    "LN2",
]

LN2 = math.log(2.0)
NUMERIC_MAX_ORDER = 4

ScaledDerivative = Callable[[int, np.ndarray], np.ndarray]


def stirling1(k: int) -> np.ndarray:
    """Signed Stirling numbers of the first kind ``s(k, j)``, ``j = 0..k``.

    They convert log derivatives: ``t^k f^(k) = sum_j s(k, j) D_s^j g`` for
    ``g(s) = f(e^s)``.
    """
    coeffs = np.array([1.0])
    for j in range(k):
        # multiply the falling factorial by (theta - j)
        coeffs = np.concatenate([[0.0], coeffs]) - j * np.concatenate([coeffs, [0.0]])
    return coeffs


def _stencil(order: int) -> tuple[np.ndarray, np.ndarray]:
    half = (order + 1) // 2
    offsets = np.arange(-half, half + 1, dtype=float)
    n = offsets.size
    vander = np.array([offsets**i / math.factorial(i) for i in range(n)])
    rhs = np.zeros(n)
    rhs[order] = 1.0
    return offsets, np.linalg.solve(vander, rhs)


def _log_derivatives_fd(g: Callable[[np.ndarray], np.ndarray], order: int, x: np.ndarray) -> np.ndarray:
    """``D_s^j g(x)`` for ``j = 0..order`` by Richardson-extrapolated central differences."""
    out = [np.asarray(g(x), dtype=complex)]
    for j in range(1, order + 1):
        h = 10.0 ** (-4.0 + 0.5 * (j - 1))  # 1e-4 at first order, widened against round-off
        offsets, weights = _stencil(j)

        def central(step):
            acc = np.zeros_like(out[0])
            for o, w in zip(offsets, weights):
                if w != 0.0:
                    acc = acc + w * np.asarray(g(x + o * step), dtype=complex)
            return acc / step**j

        d1, d2 = central(h), central(h / 2)
        out.append((4.0 * d2 - d1) / 3.0)
    return np.array(out)


@dataclass(frozen=True)
class ScalarFunction:
    """A function ``(0, inf) -> C`` with scaled derivatives up to ``max_order``.

    Parameters
    ----------
    func : callable
        Vectorised evaluation.  When ``holomorphic`` is true it also accepts
        complex arguments off the negative axis.
    max_order : int
        Largest derivative order available.
    label : str
    scaled_derivative : callable, optional
        ``(k, t) -> t^k f^(k)(t)``.  When omitted, derivatives come from
        finite differences in ``s = ln t``.
    holomorphic : bool
        Whether ``func`` may be evaluated on a sector.
    sector : float
        Half-angle of the largest sector on which ``func`` is holomorphic and
        decays.
    decay : float
        Exponent ``eps`` with ``|f(z)| <= C min(|z|^eps, |z|^-eps)`` once the
        limits at 0 and infinity are removed.
    limit_zero, limit_inf : complex
        Limits at 0 and infinity, used to regularise the Cauchy integral.
    log_support : (float, float), optional
        Interval in ``s = ln t`` outside which ``f`` vanishes.
    """

    func: Callable[[np.ndarray], np.ndarray]
    max_order: int
    label: str
    scaled_derivative: ScaledDerivative | None = field(default=None, repr=False)
    holomorphic: bool = False
    sector: float = 0.0
    decay: float = 0.0
    limit_zero: complex = 0.0
    limit_inf: complex = 0.0
    log_support: tuple[float, float] | None = None

    def __call__(self, t):
        return self.value(t)

    def value(self, t) -> np.ndarray:
        t = np.asarray(t)
        return np.asarray(self.func(t), dtype=complex)

    def scaled(self, k: int, t) -> np.ndarray:
        """Return ``t^k f^(k)(t)`` for real ``t > 0``."""
        if k < 0:
            raise ValueError("derivative order must be non-negative")
        if k > self.max_order:
            raise OrderTooLow(f"{self.label}: order {k} requested, max_order is {self.max_order}")
        t = np.asarray(t, dtype=float)
        if k == 0:
            return self.value(t)
        if self.scaled_derivative is not None:
            return np.asarray(self.scaled_derivative(k, t), dtype=complex)
        x = np.log(t)
        logd = _log_derivatives_fd(lambda s: self.func(np.exp(s)), k, x)
        st = stirling1(k)
        return np.tensordot(st, logd, axes=(0, 0))

    def derivative(self, k: int, t) -> np.ndarray:
        """Return ``f^(k)(t)``."""
        t = np.asarray(t, dtype=float)
        return self.scaled(k, t) / t**k

    # combinators -------------------------------------------------------

    def dilate(self, r: float) -> "ScalarFunction":
        """Return ``t -> f(r t)``; scaled derivatives are dilation covariant."""
        r = float(r)
        if not r > 0:
            raise ValueError("dilation factor must be positive")
        base = self
        sd = None
        if base.scaled_derivative is not None:
            sd = lambda k, t: base.scaled_derivative(k, r * np.asarray(t))  # noqa: E731
        supp = None
        if base.log_support is not None:
            lr = math.log(r)
            supp = (base.log_support[0] - lr, base.log_support[1] - lr)
        return replace(base, func=lambda t: base.func(r * t), scaled_derivative=sd,
                       label=f"{base.label}(r={r:g})", log_support=supp)

    def scale(self, c: complex) -> "ScalarFunction":
        base = self
        sd = None
        if base.scaled_derivative is not None:
            sd = lambda k, t: c * base.scaled_derivative(k, t)  # noqa: E731
        return replace(base, func=lambda t: c * base.func(t), scaled_derivative=sd,
                       label=f"{c}*{base.label}", limit_zero=c * base.limit_zero,
                       limit_inf=c * base.limit_inf)

    def __add__(self, other: "ScalarFunction") -> "ScalarFunction":
        a, b = self, other
        order = min(a.max_order, b.max_order)
        sd = None
        if a.scaled_derivative is not None and b.scaled_derivative is not None:
            sd = lambda k, t: a.scaled(k, t) + b.scaled(k, t)  # noqa: E731
        return ScalarFunction(
            func=lambda t: a.func(t) + b.func(t), max_order=order,
            label=f"({a.label}+{b.label})", scaled_derivative=sd,
            holomorphic=a.holomorphic and b.holomorphic, sector=min(a.sector, b.sector),
            decay=min(a.decay, b.decay), limit_zero=a.limit_zero + b.limit_zero,
            limit_inf=a.limit_inf + b.limit_inf, log_support=_union(a.log_support, b.log_support),
        )

    def __mul__(self, other: "ScalarFunction") -> "ScalarFunction":
        a, b = self, other
        order = min(a.max_order, b.max_order)
        sd = None
        if a.scaled_derivative is not None and b.scaled_derivative is not None:
            def sd(k, t):
                # Leibniz rule, which is exact for the scaled derivatives too
                return sum(math.comb(k, j) * a.scaled(j, t) * b.scaled(k - j, t) for j in range(k + 1))
        return ScalarFunction(
            func=lambda t: a.func(t) * b.func(t), max_order=order,
            label=f"{a.label}*{b.label}", scaled_derivative=sd,
            holomorphic=a.holomorphic and b.holomorphic, sector=min(a.sector, b.sector),
            decay=a.decay + b.decay, limit_zero=a.limit_zero * b.limit_zero,
            limit_inf=a.limit_inf * b.limit_inf, log_support=_intersect(a.log_support, b.log_support),
        )


def _union(a, b):
    if a is None or b is None:
        return None
    return (min(a[0], b[0]), max(a[1], b[1]))


def _intersect(a, b):
    if a is None:
        return b
    if b is None:
        return a
    lo, hi = max(a[0], b[0]), min(a[1], b[1])
    return (lo, max(lo, hi))


# presets ---------------------------------------------------------------


def constant(c: complex = 1.0, max_order: int = 8) -> ScalarFunction:
    c = complex(c)
    return ScalarFunction(
        func=lambda t: np.full(np.shape(t), c, dtype=complex), max_order=max_order,
        label=f"const({c:g})", scaled_derivative=lambda k, t: np.zeros(np.shape(t), dtype=complex),
        holomorphic=True, sector=math.pi, decay=0.0, limit_zero=c, limit_inf=c,
    )


def imag_power(s: float, max_order: int = 8) -> ScalarFunction:
    """``t -> t^{is}``, with ``t^k f^(k) = prod_{j<k} (is - j) t^{is}``."""
    s = float(s)

    def sd(k, t):
        c = np.prod([1j * s - j for j in range(k)]) if k else 1.0
        return c * np.exp(1j * s * np.log(t))

    return ScalarFunction(
        func=lambda t: np.exp(1j * s * np.log(t)), max_order=max_order,
        label=f"imag_power({s:g})", scaled_derivative=sd, holomorphic=True, sector=math.pi,
    )


def exp_decay(max_order: int = 8) -> ScalarFunction:
    """``t -> e^{-t}``, with ``t^k f^(k) = (-t)^k e^{-t}``."""
    return ScalarFunction(
        func=lambda t: np.exp(-t), max_order=max_order, label="exp_decay",
        scaled_derivative=lambda k, t: (-t) ** k * np.exp(-t),
        holomorphic=True, sector=math.pi / 2, decay=0.0, limit_zero=1.0, limit_inf=0.0,
    )


def resolvent_kernel(theta: float, t0: float, max_order: int = 8) -> ScalarFunction:
    """``lam -> t0 / (e^{i theta} t0 - lam)``, the resolvent symbol normalised by ``t0``."""
    theta, t0 = float(theta), float(t0)
    if not (0 < abs(theta) <= math.pi) or t0 <= 0:
        raise InvalidSpec("resolvent_kernel needs 0 < |theta| <= pi and t0 > 0")
    z0 = np.exp(1j * theta) * t0

    def sd(k, t):
        return math.factorial(k) * t**k * t0 / (z0 - t) ** (k + 1)

    return ScalarFunction(
        func=lambda lam: t0 / (z0 - lam), max_order=max_order,
        label=f"resolvent_kernel({theta:g},{t0:g})", scaled_derivative=sd,
        holomorphic=True, sector=abs(theta), decay=1.0,
        limit_zero=1.0 / np.exp(1j * theta), limit_inf=0.0,
    )


# smooth bump ------------------------------------------------------------


def _jet_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    out = np.zeros_like(a)
    for i in range(n):
        out[i] = sum(a[j] * b[i - j] for j in range(i + 1))
    return out


def _jet_exp(c: np.ndarray) -> np.ndarray:
    n = c.shape[0]
    e = np.zeros_like(c)
    e[0] = np.exp(c[0])
    for i in range(1, n):
        e[i] = sum(k * c[k] * e[i - k] for k in range(1, i + 1)) / i
    return e


def _jet_recip(d: np.ndarray) -> np.ndarray:
    n = d.shape[0]
    r = np.zeros_like(d)
    r[0] = 1.0 / d[0]
    for i in range(1, n):
        r[i] = -sum(d[k] * r[i - k] for k in range(1, i + 1)) / d[0]
    return r


def ramp_jet(y, order: int, sharpness: float = 1.0) -> np.ndarray:
    """Taylor coefficients of ``r(y) = h(y) / (h(y) + h(1-y))``, ``h(y) = exp(-sharpness/y)``.

    Returns an array of shape ``(order + 1, len(y))``; row ``j`` holds
    ``r^(j)(y) / j!``.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    out = np.zeros((order + 1, y.size))
    out[0, y >= 1.0] = 1.0
    inside = (y > 0.0) & (y < 1.0)
    if not np.any(inside):
        return out
    y0 = y[inside]
    n = np.arange(order + 1)[:, None]
    # u = sharpness (1/y - 1/(1-y)) and r = 1 / (1 + e^u)
    u = sharpness * ((-1.0) ** n / y0 ** (n + 1) - 1.0 / (1.0 - y0) ** (n + 1))
    pos = u[0] > 0
    jet = np.empty_like(u)
    one = np.zeros_like(u)
    one[0] = 1.0
    if np.any(pos):
        e = _jet_exp(-u[:, pos])  # r = e^{-u} / (1 + e^{-u})
        jet[:, pos] = _jet_mul(e, _jet_recip(one[:, pos] + e))
    if np.any(~pos):
        e = _jet_exp(u[:, ~pos])
        jet[:, ~pos] = _jet_recip(one[:, ~pos] + e)
    out[:, inside] = jet
    return out


def bump_log2_jet(x, order: int, sharpness: float = 1.0) -> np.ndarray:
    """Taylor coefficients in ``x = log2 t`` of the base bump, supported on ``|x| < 1``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros((order + 1, x.size))
    left = (x > -1.0) & (x <= 0.0)
    right = (x > 0.0) & (x < 1.0)
    if np.any(left):
        out[:, left] = ramp_jet(x[left] + 1.0, order, sharpness)
    if np.any(right):
        sign = (-1.0) ** np.arange(order + 1)[:, None]
        out[:, right] = sign * ramp_jet(1.0 - x[right], order, sharpness)
    return out


def bump(sharpness: float = 1.0, max_order: int = 8) -> ScalarFunction:
    """Smooth bump ``phi_0`` on ``(1/2, 2)`` whose dyadic dilates sum to one."""
    sharpness = float(sharpness)
    if not sharpness > 0:
        raise InvalidSpec("transition sharpness must be positive")

    def func(t):
        t = np.asarray(t, dtype=float)
        x = np.log2(t)
        return bump_log2_jet(x.ravel(), 0, sharpness)[0].reshape(x.shape).astype(complex)

    def sd(k, t):
        t = np.asarray(t, dtype=float)
        x = np.log2(t).ravel()
        jet = bump_log2_jet(x, k, sharpness)
        facts = np.array([math.factorial(j) for j in range(k + 1)])[:, None]
        logd = jet * facts / LN2 ** np.arange(k + 1)[:, None]  # D_s^j g
        st = stirling1(k)
        return np.tensordot(st, logd, axes=(0, 0)).reshape(t.shape).astype(complex)

    return ScalarFunction(
        func=func, max_order=max_order, label=f"bump({sharpness:g})" if sharpness != 1.0 else "bump",
        scaled_derivative=sd, log_support=(-LN2, LN2),
    )


def bump_combo(seed: int, count: int, spread: float = 4.0, sharpness: float = 1.0) -> ScalarFunction:
    """Seeded combination ``sum_j c_j phi_0(t / r_j)`` with ``c_j ~ U(-1, 1)``, ``log2 r_j ~ U(-spread, spread)``."""
    if count < 1:
        raise InvalidSpec("bump_combo needs count >= 1")
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=count)
    shifts = rng.uniform(-spread, spread, size=count)
    base = bump(sharpness)
    out = None
    for c, u in zip(coeffs, shifts):
        term = base.dilate(2.0 ** (-u)).scale(float(c))
        out = term if out is None else out + term
    return replace(out, label=f"bump_combo({seed},{count})")


# holomorphic presets decaying at 0 and infinity --------------------------


def _hinf0(label, func, sector, decay):
    return ScalarFunction(func=func, max_order=NUMERIC_MAX_ORDER, label=label,
                          holomorphic=True, sector=sector, decay=decay)


def hinf0_presets() -> dict[str, ScalarFunction]:
    """Ten holomorphic functions with polynomial decay at 0 and infinity."""
    half_pi = math.pi / 2
    items = [
        ("z/(1+z)^2", lambda z: z / (1 + z) ** 2, math.pi, 1.0),
        ("z^(1/2)/(1+z)", lambda z: np.sqrt(z) / (1 + z), math.pi, 0.5),
        ("z/(1+z^2)", lambda z: z / (1 + z * z), half_pi, 1.0),
        ("z*exp(-z)", lambda z: z * np.exp(-z), half_pi, 1.0),
        ("z^2/(1+z)^4", lambda z: z * z / (1 + z) ** 4, math.pi, 2.0),
        ("z^(1/3)/(1+z)^(2/3)", lambda z: z ** (1 / 3) / (1 + z) ** (2 / 3), math.pi, 1 / 3),
        ("z/((1+z)(2+z))", lambda z: z / ((1 + z) * (2 + z)), math.pi, 1.0),
        ("log(1+z)/(1+z)", lambda z: np.log(1 + z) / (1 + z), math.pi, 0.9),
        ("z^(1/2)*exp(-z)", lambda z: np.sqrt(z) * np.exp(-z), half_pi, 0.5),
        ("z(3+z)/(1+z)^3", lambda z: z * (3 + z) / (1 + z) ** 3, math.pi, 1.0),
    ]
    return {label: _hinf0(label, _as_complex(f), sec, eps)
            for label, f, sec, eps in items}


def _as_complex(f):
    return lambda z: f(np.asarray(z, dtype=complex))


_PRESET_RE = re.compile(r"^\s*([a-z_]+)\s*(?:\((.*)\))?\s*$")


def from_string(text: str) -> ScalarFunction:
    """Build a preset from ``name(args)``, e.g. ``"imag_power(2)"`` or ``"bump_combo(3, 5)"``."""
    match = _PRESET_RE.match(text)
    if not match:
        raise InvalidSpec(f"cannot parse function preset {text!r}")
    name, argtext = match.group(1), match.group(2)
    args = [float(a) for a in argtext.split(",")] if argtext and argtext.strip() else []
    try:
        if name == "imag_power":
            return imag_power(*args)
        if name == "exp_decay":
            return exp_decay()
        if name == "resolvent_kernel":
            return resolvent_kernel(*args)
        if name == "bump":
            return bump(*args)
        if name == "bump_combo":
            seed, count = int(args[0]), int(args[1])
            return bump_combo(seed, count, *args[2:])
        if name == "constant":
            return constant(*args)
    except TypeError as exc:
        raise InvalidSpec(f"bad arguments for preset {name!r}: {exc}") from exc
    raise InvalidSpec(f"unknown function preset {name!r}")
