"""
Univariate smoothing kernels and bandwidth schedules.

All kernels are symmetric with support inside [-1, 1]. The box kernel is the
indicator of [-1/2, 1/2] so that it integrates to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Kernel",
    "KERNELS",
    "get_kernel",
    "MomentReport",
    "check_moments",
    "squared_integral",
    "lipschitz_check",
    "BandwidthSchedule",
    "default_bandwidth_schedule",
]


def _box(u):
    return np.where(np.abs(u) <= 0.5, 1.0, 0.0)


def _epanechnikov(u):
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def _quartic(u):
    return np.where(np.abs(u) <= 1.0, 15.0 / 16.0 * (1.0 - u * u) ** 2, 0.0)


def _higher_order_4(u):
    # (15/8)(1 - 7u^2/3) times the Epanechnikov kernel; second moment vanishes
    u2 = u * u
    return np.where(np.abs(u) <= 1.0, 15.0 / 32.0 * (3.0 - 10.0 * u2 + 7.0 * u2 * u2), 0.0)


@dataclass(frozen=True)
class Kernel:
    """A kernel ``K1`` with its declared order and smoothness.

    `lipschitz` is the analytic ``sup |K1'|`` on the interior of the support;
    `discontinuous` marks kernels with a jump (the box kernel).
    """

    kind: str
    order: int
    half_width: float
    lipschitz: float
    discontinuous: bool
    signed: bool = False

    def __call__(self, u):
        return eval_kernel(self, u)

    @property
    def support(self):
        return (-self.half_width, self.half_width)


_FUNCS = {
    "box": _box,
    "epanechnikov": _epanechnikov,
    "quartic": _quartic,
    "higher_order_4": _higher_order_4,
}

KERNELS = {
    "box": Kernel("box", 2, 0.5, 0.0, True),
    "epanechnikov": Kernel("epanechnikov", 2, 1.0, 1.5, False),
    # |d/du (15/16)(1-u^2)^2| peaks at u = 1/sqrt(3)
    "quartic": Kernel("quartic", 2, 1.0, 15.0 / (6.0 * math.sqrt(3.0)), False),
    # derivative (15/32)(28u^3 - 20u) is largest in magnitude at |u| = 1
    "higher_order_4": Kernel("higher_order_4", 4, 1.0, 3.75, False, signed=True),
}


def get_kernel(kind) -> Kernel:
    if isinstance(kind, Kernel):
        return kind
    try:
        return KERNELS[str(kind).lower()]
    except KeyError:
        raise ValueError(f"unknown kernel {kind!r}; choose from {sorted(KERNELS)}") from None


def eval_kernel(kernel, u):
    """K1(u), vectorized; zero outside the support."""
    k = get_kernel(kernel)
    out = _FUNCS[k.kind](np.asarray(u, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def _nodes(kernel: Kernel, n: int):
    # composite Simpson on the support; n intervals (even)
    a, b = kernel.support
    n += n % 2
    x = np.linspace(a, b, n + 1)
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return x, w * (b - a) / (3.0 * n)


@dataclass(frozen=True)
class MomentReport:
    passed: bool
    moments: tuple


def check_moments(kernel, alpha: int, tol: float, nodes: int = 10_000) -> MomentReport:
    """Check ``int K1 = 1`` and ``int u^j K1 = 0`` for ``1 <= j < alpha``.

    Moments are computed by composite Simpson quadrature with `nodes` intervals
    on the kernel support (exact for the polynomial kernels here).
    """
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    k = get_kernel(kernel)
    x, w = _nodes(k, nodes)
    kx = eval_kernel(k, x)
    moments = tuple(float(np.sum(w * x**j * kx)) for j in range(alpha))
    ok = abs(moments[0] - 1.0) <= tol and all(abs(m) <= tol for m in moments[1:])
    return MomentReport(ok, moments)


def squared_integral(kernel, nodes: int = 10_000) -> float:
    """``int K1(u)^2 du`` by composite Simpson quadrature."""
    k = get_kernel(kernel)
    x, w = _nodes(k, nodes)
    return float(np.sum(w * eval_kernel(k, x) ** 2))


def lipschitz_check(kernel, probes: int = 10_000):
    """Estimate ``sup |K1(u) - K1(v)| / |u - v|`` on a uniform probe grid.

    A jump shows up as a slope that grows with probe density, so the estimate
    is repeated on a grid twice as fine; roughly doubling flags a discontinuity.

    Returns
    -------
    (constant, discontinuous) : (float, bool)
    """
    if probes < 1000:
        raise ValueError("probes must be >= 1000")
    k = get_kernel(kernel)

    def slope(n):
        x = np.linspace(-1.5, 1.5, n)
        return float(np.max(np.abs(np.diff(eval_kernel(k, x))) / np.diff(x)))

    s1, s2 = slope(probes), slope(2 * probes)
    discontinuous = s2 > 1.5 * s1 and s2 > 100.0
    return s1, discontinuous


@dataclass(frozen=True)
class BandwidthSchedule:
    """``b(L) = constant * L**(-q2) * log(L)**q1`` as a function of window side."""

    q1: float = 0.0
    q2: float = 0.0
    constant: float = 1.0

    def __post_init__(self):
        if self.q1 < 0 or self.q2 < 0:
            raise ValueError("q1 and q2 must be non-negative")
        if self.constant <= 0:
            raise ValueError("constant must be positive")

    def __call__(self, side: float) -> float:
        return self.constant * side ** (-self.q2) * math.log(side) ** self.q1

    def check(self, sides, dim: int, R: float) -> bool:
        """Numerical sanity check along `sides`: b decreases, b * |W eroded by 2R| grows."""
        sides = sorted(sides)
        b = np.array([self(s) for s in sides])
        mass = b * np.array([max(s - 4 * R, 0.0) ** dim for s in sides])
        if len(sides) < 2:
            return bool(mass[0] > 0)
        return bool(np.all(np.diff(b) <= 0) and np.all(np.diff(mass) > 0))


def default_bandwidth_schedule(kernel, dim: int, R: float, smallest_side: float) -> BandwidthSchedule:
    """``b(L) = c * L**(-1/(2*alpha + dim))`` with ``b(smallest_side) = R/4``."""
    k = get_kernel(kernel)
    q2 = 1.0 / (2 * k.order + dim)
    c = (R / 4.0) * smallest_side**q2
    return BandwidthSchedule(q1=0.0, q2=q2, constant=c)
