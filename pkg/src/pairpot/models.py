"""
Papangelou conditional intensities with a finite interaction range.

Every model answers ``log_papangelou(u, x)`` by looking only at the points of
``x`` within its range of ``u``. Pairwise kinds additionally expose the pair
potential ``gamma(r)`` with ``lambda(u, x) = beta * exp(-sum gamma(|v - u|))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, UnsupportedModelError
from .spatial import PointPattern

__all__ = [
    "Model",
    "Poisson",
    "Strauss",
    "PiecewiseStrauss",
    "Triplets",
    "LennardJones",
    "log_papangelou",
    "log_papangelou_multi",
    "pair_potential",
    "model_from_mapping",
]


def _check_phi(phi, name="phi"):
    if not (0.0 <= phi <= 1.0):
        raise ConfigError(f"{name} must lie in [0, 1] (repulsive models only), got {phi}")


def _points_array(x, dim=None) -> np.ndarray:
    if isinstance(x, PointPattern):
        return x.points
    arr = np.asarray(x, dtype=float)
    if arr.size == 0:
        return arr.reshape(0, dim if dim is not None else 0)
    return arr.reshape(len(arr), -1)


def _local_neighbours(u: np.ndarray, pts: np.ndarray, radius: float):
    """Points of `pts` within `radius` of `u` (zero distance excluded)."""
    if len(pts) == 0:
        return pts, np.zeros(0)
    diff = pts - u
    d = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    keep = (d <= radius) & (d > 0.0)
    return pts[keep], d[keep]


@dataclass(frozen=True)
class Model:
    """Base class: activity `beta` and interaction range `range`."""

    beta: float
    range: float

    pairwise = True

    def __post_init__(self):
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if not (self.range > 0 and math.isfinite(self.range)):
            raise ConfigError(f"range must be positive, got {self.range}")

    @property
    def kind(self) -> str:
        """The name used for this model in configuration files."""
        return next(k for k, (cls, _) in _KINDS.items() if cls is type(self))

    @property
    def log_beta(self) -> float:
        return math.log(self.beta)

    def gamma(self, r):
        """Vectorized pair potential; callers guarantee ``r > 0``."""
        raise UnsupportedModelError(f"{self.kind} has no pair potential")

    def log_lambda_local(self, u: np.ndarray, nbrs: np.ndarray, dists: np.ndarray) -> float:
        """log lambda(u, x) given the R-neighbours of `u` and their distances."""
        if len(dists) == 0:
            return self.log_beta
        with np.errstate(over="ignore"):
            return self.log_beta - float(np.sum(self.gamma(dists)))

    def log_lambda_dists(self, dists) -> float:
        """log lambda(u, x) from the distances to the R-neighbours (pairwise kinds)."""
        return self.log_lambda_local(None, None, np.asarray(dists, dtype=float))

    def is_repulsive(self, r_grid=None) -> bool:
        """True when gamma > 0 on the probe grid (default: 256 points in (0, R])."""
        if not self.pairwise:
            return True
        if r_grid is None:
            r_grid = np.linspace(self.range / 256, self.range, 256)
        return bool(np.all(self.gamma(np.asarray(r_grid, dtype=float)) > 0))


@dataclass(frozen=True)
class Poisson(Model):
    """Homogeneous Poisson process; `range` is nominal."""

    range: float = 1.0

    def gamma(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def log_lambda_dists(self, dists) -> float:
        return self.log_beta


@dataclass(frozen=True)
class Strauss(Model):
    phi: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        _check_phi(self.phi)

    def gamma(self, r):
        r = np.asarray(r, dtype=float)
        level = math.inf if self.phi == 0 else -math.log(self.phi)
        return np.where(r <= self.range, level, 0.0)

    def log_lambda_dists(self, dists) -> float:
        # every distance handed in is already <= range
        k = len(dists)
        if k == 0 or self.phi == 1.0:
            return self.log_beta
        if self.phi == 0.0:
            return -math.inf
        return self.log_beta + k * math.log(self.phi)


@dataclass(frozen=True)
class PiecewiseStrauss(Model):
    """Step potential: ``-log phis[j]`` on ``(breaks[j], breaks[j+1]]``.

    `breaks` runs from 0 to the interaction range.
    """

    breaks: tuple = ()
    phis: tuple = ()

    def __init__(self, beta, breaks, phis):
        breaks = tuple(float(b) for b in breaks)
        if breaks and breaks[0] != 0.0:
            breaks = (0.0,) + breaks
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "phis", tuple(float(p) for p in phis))
        object.__setattr__(self, "beta", float(beta))
        object.__setattr__(self, "range", breaks[-1] if breaks else float("nan"))
        self.__post_init__()

    def __post_init__(self):
        if len(self.breaks) < 2 or len(self.phis) != len(self.breaks) - 1:
            raise ConfigError("need breaks R_0=0 < ... < R_p and exactly p interaction levels")
        if np.any(np.diff(self.breaks) <= 0):
            raise ConfigError(f"breaks must be strictly increasing, got {self.breaks}")
        super().__post_init__()
        for j, p in enumerate(self.phis):
            _check_phi(p, f"phis[{j}]")

    def gamma(self, r):
        r = np.asarray(r, dtype=float)
        levels = np.array([math.inf if p == 0 else -math.log(p) for p in self.phis] + [0.0])
        # right-closed intervals (R_{j-1}, R_j]; r > R maps to the trailing zero
        idx = np.searchsorted(np.asarray(self.breaks[1:]), r, side="left")
        return levels[idx]


@dataclass(frozen=True)
class LennardJones(Model):
    """Lennard-Jones potential truncated (not shifted) at the range."""

    theta: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not (self.theta > 0):
            raise ConfigError(f"theta must be positive, got {self.theta}")

    def gamma(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            s6 = (self.theta / r) ** 6
            g = s6 * s6 - s6
        return np.where(r <= self.range, g, 0.0)


@dataclass(frozen=True)
class Triplets(Model):
    """Triplet interaction: each R-close triangle formed with u costs ``phi``."""

    phi: float = 1.0

    pairwise = False

    def __post_init__(self):
        super().__post_init__()
        _check_phi(self.phi)

    def log_lambda_local(self, u, nbrs, dists):
        k = len(dists)
        if k < 2:
            return self.log_beta
        diff = nbrs[:, None, :] - nbrs[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        # triangles {u, v, w}: v, w both R-close to u and to each other
        closed = int(np.count_nonzero(np.triu(d <= self.range, k=1)))
        if closed == 0:
            return self.log_beta
        if self.phi == 0:
            return -math.inf
        return self.log_beta + closed * math.log(self.phi)


def log_papangelou(model: Model, u, x) -> float:
    """log of the conditional intensity of adding `u` to configuration `x`.

    `x` may be a PointPattern or an (n, d) array and must not contain `u`.
    Hard-core violations give ``-inf``.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    pts = _points_array(x, len(u))
    nbrs, d = _local_neighbours(u, pts, model.range)
    return model.log_lambda_local(u, nbrs, d)


def pair_potential(model: Model, r):
    """Pair potential gamma(r); zero beyond the range. Vectorized over `r`."""
    if not model.pairwise:
        raise UnsupportedModelError(f"{model.kind} interaction is not pairwise")
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 0):
        raise ValueError("pair_potential requires r > 0")
    out = model.gamma(r_arr)
    return float(out) if np.ndim(out) == 0 else out


def log_papangelou_multi(model: Model, points, x) -> float:
    """log lambda(u_1, ..., u_s, x) as a telescoping sum.

    ``sum_k log lambda(u_k, x + {u_1, ..., u_{k-1}})``
    """
    pts = np.asarray(points, dtype=float)
    pts = pts.reshape(len(pts), -1) if pts.ndim > 1 else pts.reshape(1, -1)
    if len(pts) == 0:
        raise ValueError("need at least one point")
    if len(np.unique(pts, axis=0)) != len(pts):
        raise ValueError("points must be pairwise distinct")
    base = _points_array(x, pts.shape[1])
    total = 0.0
    for k in range(len(pts)):
        cur = np.vstack([base, pts[:k]]) if k else base
        total += log_papangelou(model, pts[k], cur)
        if total == -math.inf:
            break
    return total


_KINDS = {
    "poisson": (Poisson, ()),
    "strauss": (Strauss, ("phi",)),
    "piecewise_strauss": (PiecewiseStrauss, ("breaks", "phis")),
    "triplets": (Triplets, ("phi",)),
    "lennard_jones": (LennardJones, ("theta",)),
}


def model_from_mapping(params: dict) -> Model:
    """Build a model from ``{'kind': ..., 'beta': ..., 'range': ..., ...}``.

    Unknown keys raise ConfigError.
    """
    params = dict(params)
    kind = str(params.pop("kind", "")).lower()
    if kind not in _KINDS:
        raise ConfigError(f"unknown model kind {kind!r}; choose from {sorted(_KINDS)}")
    cls, extra = _KINDS[kind]
    allowed = {"beta", *extra} | ({"range"} if kind != "piecewise_strauss" else set())
    unknown = set(params) - allowed
    if unknown:
        raise ConfigError(f"unknown keys for model kind {kind!r}: {sorted(unknown)}")
    missing = allowed - set(params) - ({"range"} if kind == "poisson" else set())
    if missing:
        raise ConfigError(f"missing keys for model kind {kind!r}: {sorted(missing)}")
    try:
        if kind == "piecewise_strauss":
            return PiecewiseStrauss(float(params["beta"]), _floats(params["breaks"]), _floats(params["phis"]))
        kwargs = {k: float(v) for k, v in params.items()}
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad model parameters: {exc}") from exc


def _floats(v):
    if isinstance(v, str):
        return [float(t) for t in v.replace(",", " ").split()]
    return [float(t) for t in v]
