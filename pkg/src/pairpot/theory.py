"""
Closed-form reference quantities for the homogeneous Poisson process.

For Poisson(beta) the two-point empty-space probability is
``F(o, s) = exp(-beta * |B(o, R) U B(s, R)|)`` and the interaction function is
identically one, so the kernel estimator's mean and asymptotic variance are
available in closed form (up to one-dimensional quadrature).

``J(r)`` here is the direction average of ``F(o, r v)`` over unit vectors ``v``
(normalized sphere measure); for an isotropic process it equals ``F`` itself.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .kernels import eval_kernel, get_kernel, squared_integral

__all__ = [
    "sphere_measure",
    "ball_volume",
    "union_volume",
    "poisson_void2",
    "poisson_J",
    "poisson_rhat_limit",
    "poisson_rhat_mean",
    "poisson_rhat_variance_leading",
    "variance_constant",
]


def sphere_measure(dim: int) -> float:
    """Surface measure of the unit sphere: 2, 2*pi, 4*pi for dim 1, 2, 3."""
    return 2.0 * math.pi ** (dim / 2) / math.gamma(dim / 2)


def ball_volume(R: float, dim: int) -> float:
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * R**dim


def union_volume(rho, R: float, dim: int):
    """Volume of the union of two radius-R balls whose centres are `rho` apart."""
    rho = np.minimum(np.asarray(rho, dtype=float), 2.0 * R)
    if dim == 1:
        out = 2.0 * R + rho
    elif dim == 2:
        lens = 2.0 * R * R * np.arccos(rho / (2.0 * R)) - 0.5 * rho * np.sqrt(4.0 * R * R - rho * rho)
        out = 2.0 * math.pi * R * R - lens
    elif dim == 3:
        lens = math.pi * (4.0 * R + rho) * (2.0 * R - rho) ** 2 / 12.0
        out = 2.0 * ball_volume(R, 3) - lens
    else:
        raise ValueError("dim must be 1, 2 or 3")
    return float(out) if np.ndim(out) == 0 else out


def poisson_void2(rho, beta: float, R: float, dim: int):
    """P(no point within R of o and no point within R of a point at distance rho)."""
    return np.exp(-beta * union_volume(rho, R, dim))


def poisson_J(r, beta: float, R: float, dim: int):
    """Direction-averaged two-point void probability; isotropy makes it equal F."""
    return poisson_void2(r, beta, R, dim)


def poisson_rhat_limit(r, beta: float, R: float, dim: int):
    """Limit of the kernel estimator's mean under Poisson: ``beta**2 * J(r)``."""
    return beta**2 * poisson_J(r, beta, R, dim)


def poisson_rhat_mean(r: float, b: float, kernel, beta: float, R: float, dim: int) -> float:
    """Exact finite-bandwidth mean of the estimator under Poisson.

    ``beta**2 / b * int_0^R J(rho) K((rho - r)/b) d rho``; the pair sum only
    runs over pairs at distance <= R, hence the truncation.
    """
    k = get_kernel(kernel)
    lo = max(r - k.half_width * b, 0.0)
    hi = min(r + k.half_width * b, R)
    if hi <= lo:
        return 0.0
    val, _ = integrate.quad(
        lambda p: poisson_J(p, beta, R, dim) * eval_kernel(k, (p - r) / b), lo, hi, epsabs=1e-14, epsrel=1e-12
    )
    return beta**2 * val / b


def variance_constant(r: float, beta: float, J: float, phi: float, kernel, dim: int) -> float:
    """Asymptotic value of ``b * |W eroded by 2R| * Var(estimator)``.

    ``2 beta**2 / (sigma_d r**(d-1)) * J(r) * Phi(r) * int K1**2``
    """
    return 2.0 * beta**2 / (sphere_measure(dim) * r ** (dim - 1)) * J * phi * squared_integral(kernel)


def poisson_rhat_variance_leading(r: float, b: float, kernel, beta: float, R: float, dim: int, volume: float) -> float:
    """Leading (diagonal) variance term at finite bandwidth under Poisson.

    ``2 beta**2 / (b**2 |W| sigma_d) * int J(rho) K((rho-r)/b)**2 / rho**(d-1)``
    """
    k = get_kernel(kernel)
    lo = max(r - k.half_width * b, 0.0)
    hi = min(r + k.half_width * b, R)
    val, _ = integrate.quad(
        lambda p: poisson_J(p, beta, R, dim) * eval_kernel(k, (p - r) / b) ** 2 / p ** (dim - 1), lo, hi
    )
    return 2.0 * beta**2 * val / (b * b * volume * sphere_measure(dim))
