"""
Edge-corrected non-parametric estimators of the interaction function.

Three ingredients are combined into ``Phi_hat(r) = R_hat(r) / (beta_hat * J_hat(r))``:

* ``beta_hat`` - ratio of R-isolated points to the R-isolated volume,
* ``J_hat(r)`` - isolated interior points weighted by the fraction of the
  radius-r sphere around them that is itself R-isolated,
* ``R_hat(r)`` - kernel-smoothed count of mutually isolated pairs.

Only points at depth >= 2R contribute to ``R_hat`` and ``J_hat``, so every
neighbourhood they look at lies inside the window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DegenerateEstimateError
from .kernels import Kernel, eval_kernel, get_kernel
from .spatial import PointPattern, erode
from .theory import sphere_measure

__all__ = [
    "EstimatorInput",
    "EstimateReport",
    "sphere_nodes",
    "htilde",
    "hstar",
    "estimate_beta",
    "estimate_J",
    "estimate_R_hat",
    "estimate_phi",
    "isolated_pairs",
]

DEFAULT_REGION_RES = {1: 4096, 2: 128, 3: 48}


@dataclass(frozen=True, eq=False)
class EstimatorInput:
    """Pattern plus tuning: range, kernel, bandwidth and quadrature sizes."""

    pattern: PointPattern
    range: float
    kernel: Kernel
    bandwidth: float
    r_grid: np.ndarray
    sphere_nodes: int = 64
    region_grid_res: int | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "kernel", get_kernel(self.kernel))
        r = np.atleast_1d(np.asarray(self.r_grid, dtype=float))
        object.__setattr__(self, "r_grid", r)
        if not self.range > 0:
            raise ConfigError("range must be positive")
        if not (0 < self.bandwidth <= self.range):
            raise ConfigError(f"bandwidth must lie in (0, R], got {self.bandwidth}")
        if np.any(r <= 0) or np.any(r > self.range) or np.any(np.diff(r) <= 0):
            raise ConfigError("r_grid must be increasing and inside (0, R]")
        if self.sphere_nodes < 16:
            raise ConfigError("sphere_nodes must be >= 16")
        if self.region_grid_res is None:
            object.__setattr__(self, "region_grid_res", DEFAULT_REGION_RES[self.pattern.dim])
        elif self.region_grid_res < 32:
            raise ConfigError("region_grid_res must be >= 32")

    @property
    def window(self):
        return self.pattern.window

    @property
    def dim(self) -> int:
        return self.pattern.dim

    def inner(self):
        """The 2R-eroded window over which contributing points range."""
        return erode(self.window, 2.0 * self.range)

    def degrees(self):
        """Per-point count of other points within R, plus the ordered pair list."""
        if "deg" not in self._cache:
            grid = self.pattern.grid(self.range)
            i, j, d = grid.self_pairs(self.range)
            deg = np.bincount(i, minlength=len(self.pattern))
            self._cache["deg"] = (deg, i, j, d)
        return self._cache["deg"]


@dataclass
class EstimateReport:
    r: np.ndarray
    R_hat: np.ndarray
    J_hat: np.ndarray
    phi_hat: np.ndarray
    gamma_hat: np.ndarray
    flags: list
    beta_hat: float
    eroded_volume: float
    sigma_d: float
    bandwidth: float
    kernel: str
    range: float
    notes: list = field(default_factory=list)

    def rows(self):
        for k in range(len(self.r)):
            yield {
                "r": self.r[k],
                "R_hat": self.R_hat[k],
                "J_hat": self.J_hat[k],
                "beta_hat": self.beta_hat,
                "phi_hat": self.phi_hat[k],
                "gamma_hat": self.gamma_hat[k],
                "flags": self.flags[k],
            }


def sphere_nodes(dim: int, M: int):
    """Quadrature nodes and weights for the surface measure of the unit sphere.

    dim 1 uses the two directions +-1 (weight 1 each, M ignored); dim 2 uses M
    equally spaced angles; dim 3 uses an M-point Fibonacci lattice.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if dim == 2:
        t = 2.0 * math.pi * (np.arange(M) + 0.5) / M
        return np.column_stack([np.cos(t), np.sin(t)]), np.full(M, 2.0 * math.pi / M)
    if dim == 3:
        k = np.arange(M) + 0.5
        z = 1.0 - 2.0 * k / M
        rho = np.sqrt(1.0 - z * z)
        phi = math.pi * (3.0 - math.sqrt(5.0)) * np.arange(M)
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z]), np.full(M, 4.0 * math.pi / M)
    raise ValueError("dim must be 1, 2 or 3")


def htilde(u, x, R: float) -> int:
    """1 if every point of `x` is strictly farther than R from `u`, else 0."""
    pts = x.points if isinstance(x, PointPattern) else np.asarray(x, dtype=float)
    if pts.size == 0:
        return 1
    u = np.asarray(u, dtype=float).reshape(-1)
    diff = pts.reshape(-1, len(u)) - u
    return int(np.min(np.einsum("ij,ij->i", diff, diff)) > R * R)


def hstar(u, r: float, x, R: float, M: int) -> float:
    """Sphere quadrature of ``htilde(u + r v, x)`` over unit vectors v.

    Uses the surface measure, so an empty `x` gives the sphere's total measure.
    """
    if M < 16:
        raise ValueError("M must be >= 16")
    u = np.asarray(u, dtype=float).reshape(-1)
    nodes, w = sphere_nodes(len(u), M)
    pts = x.points if isinstance(x, PointPattern) else np.asarray(x, dtype=float).reshape(-1, len(u))
    if len(pts) == 0:
        return float(np.sum(w))
    s = u + r * nodes
    d2 = np.sum((s[:, None, :] - pts[None, :, :]) ** 2, axis=2)
    iso = np.all(d2 > R * R, axis=1)
    return float(np.sum(w[iso]))


def _region_grid(lo: float, hi: float, dim: int, res: int):
    step = (hi - lo) / res
    ax = lo + step * (np.arange(res) + 0.5)
    mesh = np.meshgrid(*([ax] * dim), indexing="ij")
    return np.column_stack([m.ravel() for m in mesh]), step**dim


def estimate_beta(inp: EstimatorInput) -> float:
    """Isolated-point count over isolated volume, both inside the R-eroded window.

    The denominator is a midpoint-rule integral on ``region_grid_res**dim`` nodes.
    """
    R = inp.range
    region = erode(inp.window, R)
    if region.is_empty:
        raise DegenerateEstimateError("R-eroded window is empty")
    deg = inp.degrees()[0]
    pts = inp.pattern.points
    num = int(np.count_nonzero((deg == 0) & region.contains(pts)))
    grid_pts, cell = _region_grid(region.lo, region.hi, inp.dim, inp.region_grid_res)
    if len(pts):
        free = inp.pattern.grid(R).count_within(grid_pts, R) == 0
    else:
        free = np.ones(len(grid_pts), dtype=bool)
    den = float(np.count_nonzero(free)) * cell
    if den == 0.0:
        raise DegenerateEstimateError("no R-isolated volume left in the window")
    return num / den


def _inner_volume(inp: EstimatorInput) -> float:
    inner = inp.inner()
    if inner.is_empty:
        raise DegenerateEstimateError(
            f"2R-eroded window is empty (side {inp.window.side} <= 4R = {4 * inp.range})"
        )
    return inner.volume


def estimate_J(inp: EstimatorInput, r=None):
    """Empty-space sphere estimator, normalized by the sphere measure.

    Returns an estimate of ``beta * J(r)`` where J is the direction-averaged
    two-point void probability. Scalar `r` gives a float; default is the whole
    r-grid.
    """
    vol = _inner_volume(inp)
    R = inp.range
    rs = inp.r_grid if r is None else np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(rs <= 0) or np.any(rs > R):
        raise ValueError("r must lie in (0, R]")
    deg = inp.degrees()[0]
    pts = inp.pattern.points
    centres = np.flatnonzero((deg == 0) & inp.inner().contains(pts))
    nodes, w = sphere_nodes(inp.dim, inp.sphere_nodes)
    sigma = sphere_measure(inp.dim)
    out = np.zeros(len(rs))
    if len(centres):
        grid = inp.pattern.grid(R)
        m = len(nodes)
        owner = np.repeat(centres, m)
        # equal node weights: an integer count keeps the sum independent of point order
        for k, rv in enumerate(rs):
            s = (pts[centres][:, None, :] + rv * nodes[None, :, :]).reshape(-1, inp.dim)
            free = int(np.count_nonzero(grid.count_within(s, R, exclude=owner) == 0))
            out[k] = free * w[0] / (sigma * vol)
    return float(out[0]) if (r is not None and np.ndim(r) == 0) else out


def isolated_pairs(inp: EstimatorInput):
    """Ordered pairs (u, v) that contribute to the pair estimator, with distances.

    u lies in the 2R-eroded window and u, v are each other's only R-neighbour.
    """
    deg, i, j, d = inp.degrees()
    pts = inp.pattern.points
    keep = (deg[i] == 1) & (deg[j] == 1)
    i, j, d = i[keep], j[keep], d[keep]
    keep = inp.inner().contains(pts[i]) if len(i) else np.zeros(0, dtype=bool)
    return i[keep], j[keep], d[keep]


def estimate_R_hat(inp: EstimatorInput, r=None, bandwidth=None):
    """Kernel-smoothed, edge-corrected sum over mutually isolated pairs.

    ``sum K((rho - r)/b) / rho**(d-1) / (b |W eroded by 2R| sigma_d)``
    """
    vol = _inner_volume(inp)
    b = inp.bandwidth if bandwidth is None else float(bandwidth)
    rs = inp.r_grid if r is None else np.atleast_1d(np.asarray(r, dtype=float))
    _, _, d = isolated_pairs(inp)
    sigma = sphere_measure(inp.dim)
    if len(d) == 0:
        out = np.zeros(len(rs))
    else:
        # summing in distance order makes the result independent of point labels
        d = np.sort(d)
        weights = 1.0 / d ** (inp.dim - 1)
        kv = eval_kernel(inp.kernel, (d[None, :] - rs[:, None]) / b)
        out = (kv * weights).sum(axis=1) / (b * vol * sigma)
    return float(out[0]) if (r is not None and np.ndim(r) == 0) else out


def estimate_phi(inp: EstimatorInput) -> EstimateReport:
    """Run all three estimators over the r-grid and form Phi_hat and gamma_hat."""
    vol = _inner_volume(inp)
    beta = estimate_beta(inp)
    J = estimate_J(inp)
    Rh = estimate_R_hat(inp)
    n = len(inp.r_grid)
    phi = np.full(n, np.nan)
    gamma = np.full(n, np.nan)
    flags = []
    for k in range(n):
        f = []
        if beta == 0 or J[k] == 0:
            f.append("undefined")
        else:
            phi[k] = Rh[k] / (beta * J[k])
            if phi[k] > 0:
                gamma[k] = -math.log(phi[k])
            else:
                gamma[k] = math.inf
                f.append("phi_nonpositive")
        flags.append(";".join(f))
    return EstimateReport(
        r=inp.r_grid.copy(),
        R_hat=Rh,
        J_hat=J,
        phi_hat=phi,
        gamma_hat=gamma,
        flags=flags,
        beta_hat=beta,
        eroded_volume=vol,
        sigma_d=sphere_measure(inp.dim),
        bandwidth=inp.bandwidth,
        kernel=inp.kernel.kind,
        range=inp.range,
    )
