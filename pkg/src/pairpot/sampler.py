"""
Realizations of finite-range Gibbs models and sampler diagnostics.

``run_birth_death`` is a birth-death Metropolis-Hastings chain on a cubic
window. Each proposal is a birth at a uniform location or the death of a
uniformly chosen point, with probability 1/2 each; acceptance ratios use only
the conditional intensity, so no normalizing constant is needed.

``gnz_residual`` and ``gnz_residual_pairs`` check the chain output against
the Georgii-Nguyen-Zessin identity
``E sum_{u in X} h(u, X - u) = int E[h(u, X) lambda(u, X)] du``
and its two-point version, across independent chains.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

import numpy as np
from scipy.signal import fftconvolve

from .errors import ConfigError, ResourceError
from .models import Model, log_papangelou_multi
from .spatial import CellGrid, PointPattern, Window

__all__ = [
    "ChainConfig",
    "GnzReport",
    "chain_rng",
    "sample_poisson",
    "run_birth_death",
    "run_chain",
    "log_papangelou_field",
    "gnz_residual",
    "gnz_residual_pairs",
    "gnz_terms",
    "gnz_pair_terms",
    "gnz_report",
    "simulate_many",
]

POISSON_CAP = 1e8


@dataclass(frozen=True)
class ChainConfig:
    """Birth-death chain settings.

    `steps` counts proposals including the `burn_in` ones; the returned pattern
    is the state after the last proposal.
    """

    steps: int
    burn_in: int
    seed: int = 0
    initial: str = "poisson"
    boundary: str = "free"

    def __post_init__(self):
        if self.steps <= 0 or self.burn_in <= 0:
            raise ConfigError("steps and burn_in must be positive")
        if self.burn_in >= self.steps:
            raise ConfigError(f"burn_in ({self.burn_in}) must be smaller than steps ({self.steps})")
        if self.initial not in ("empty", "poisson"):
            raise ConfigError(f"initial must be 'empty' or 'poisson', got {self.initial!r}")
        if self.boundary not in ("free", "torus"):
            raise ConfigError(f"boundary must be 'free' or 'torus', got {self.boundary!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @classmethod
    def default(cls, model: Model, window: Window, seed: int = 0, factor: float = 10.0, **kw):
        """Burn-in of ``factor * beta * |W|`` proposals, the same again after."""
        burn = max(1, int(round(factor * model.beta * window.volume)))
        return cls(steps=2 * burn, burn_in=burn, seed=seed, **kw)

    def for_chain(self, index: int) -> "ChainConfig":
        return replace(self, seed=_derive_seed(self.seed, index))


@dataclass(frozen=True)
class GnzReport:
    lhs: float
    rhs: float
    mc_stderr: float
    z_score: float
    n_chains: int
    label: str = ""


def _derive_seed(seed: int, index: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(index),))
    return int(ss.generate_state(2, dtype=np.uint32).view(np.uint64)[0])


def chain_rng(seed: int, index: int | None = None) -> np.random.Generator:
    """Independent stream per (seed, chain index)."""
    if index is None:
        return np.random.default_rng(np.random.SeedSequence(int(seed)))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(index),)))


def sample_poisson(window: Window, beta: float, seed) -> PointPattern:
    """Homogeneous Poisson(beta) pattern on `window`.

    `seed` may be an int or a numpy Generator.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    mean = beta * window.volume
    if mean >= POISSON_CAP:
        raise ResourceError(f"expected point count {mean:.3g} exceeds cap {POISSON_CAP:.0e}")
    rng = seed if isinstance(seed, np.random.Generator) else chain_rng(seed)
    n = int(rng.poisson(mean))
    pts = rng.uniform(0.0, window.side, size=(n, window.dim))
    return PointPattern(window, pts)


class _State:
    """Mutable configuration with a cell index supporting O(1) insert/delete."""

    def __init__(self, window: Window, R: float, torus: bool):
        self.dim = window.dim
        self.L = window.side
        self.R = R
        self.torus = torus
        self.ncell = max(1, int(self.L // R))
        self.edge = self.L / self.ncell
        self.pts = []
        self.cell_of = []
        self.cells = {}
        self._nbr_cells = {}
        self._offsets = list(itertools.product((-1, 0, 1), repeat=self.dim))

    @property
    def n(self):
        return len(self.pts)

    def _cell(self, u):
        nc = self.ncell
        key = 0
        for c in u:
            c = int(c / self.edge)
            if c >= nc:
                c = nc - 1
            key = key * nc + c
        return key

    def _neighbour_cells(self, key):
        cached = self._nbr_cells.get(key)
        if cached is not None:
            return cached
        nc = self.ncell
        coords = []
        k = key
        for _ in range(self.dim):
            coords.append(k % nc)
            k //= nc
        coords.reverse()
        out = set()
        for off in self._offsets:
            flat = 0
            ok = True
            for c, o in zip(coords, off):
                c2 = c + o
                if self.torus:
                    c2 %= nc
                elif not 0 <= c2 < nc:
                    ok = False
                    break
                flat = flat * nc + c2
            if ok:
                out.add(flat)
        res = tuple(sorted(out))
        self._nbr_cells[key] = res
        return res

    def add(self, u):
        u = tuple(float(c) for c in u)
        i = len(self.pts)
        key = self._cell(u)
        self.pts.append(u)
        self.cell_of.append(key)
        self.cells.setdefault(key, []).append(i)

    def remove(self, i):
        last = len(self.pts) - 1
        self.cells[self.cell_of[i]].remove(i)
        if i != last:
            lb = self.cells[self.cell_of[last]]
            lb[lb.index(last)] = i
            self.pts[i] = self.pts[last]
            self.cell_of[i] = self.cell_of[last]
        self.pts.pop()
        self.cell_of.pop()

    def neighbours(self, u, skip=-1):
        """Indices and distances of stored points within R of u (excluding `skip`)."""
        R2 = self.R * self.R
        L = self.L
        half = 0.5 * L
        torus = self.torus
        idx, dist = [], []
        pts = self.pts
        cells = self.cells
        for key in self._neighbour_cells(self._cell(u)):
            bucket = cells.get(key)
            if not bucket:
                continue
            for j in bucket:
                if j == skip:
                    continue
                s = 0.0
                for a, b in zip(pts[j], u):
                    dx = abs(a - b)
                    if torus and dx > half:
                        dx = L - dx
                    s += dx * dx
                if s <= R2:
                    idx.append(j)
                    dist.append(math.sqrt(s))
        return idx, dist

    def pattern(self, window):
        return PointPattern(window, np.array(self.pts, dtype=float).reshape(-1, self.dim))


def _log_lambda(model: Model, state: _State, u, skip=-1) -> float:
    idx, dist = state.neighbours(u, skip)
    if not dist:
        return model.log_beta
    if model.pairwise:
        return model.log_lambda_dists(dist)
    nbrs = np.array([state.pts[j] for j in idx])
    uu = np.asarray(u)
    if state.torus:
        # unwrap neighbours next to u so triangle side lengths are periodic distances
        delta = nbrs - uu
        delta -= state.L * np.round(delta / state.L)
        nbrs = uu + delta
    return model.log_lambda_local(uu, nbrs, np.asarray(dist))


def run_chain(model: Model, window: Window, cfg: ChainConfig, record_counts: bool = False):
    """Run one chain; returns ``(pattern, counts)`` with post-burn-in counts if requested."""
    if cfg.boundary == "torus" and model.range >= window.side / 2:
        raise ConfigError("torus boundary needs range < side / 2")
    rng = chain_rng(cfg.seed)
    torus = cfg.boundary == "torus"
    state = _State(window, model.range, torus)
    if cfg.initial == "poisson":
        init = rng.uniform(0.0, window.side, size=(int(rng.poisson(model.beta * window.volume)), window.dim))
        for u in init:
            state.add(u)
    log_vol = math.log(window.volume)
    L, d = window.side, window.dim
    counts = [] if record_counts else None
    block = 1 << 14
    done = 0
    while done < cfg.steps:
        m = min(block, cfg.steps - done)
        # per proposal: move type, acceptance uniform, victim uniform, d coordinates
        draws = rng.random((m, 3 + d)).tolist()
        for row in draws:
            if row[0] < 0.5:
                u = tuple(c * L for c in row[3:])
                la = _log_lambda(model, state, u)
                log_acc = la + log_vol - math.log(state.n + 1)
                if log_acc >= 0 or math.log(row[1]) < log_acc:
                    state.add(u)
            elif state.n > 0:
                i = min(int(row[2] * state.n), state.n - 1)
                la = _log_lambda(model, state, state.pts[i], skip=i)
                log_acc = math.log(state.n) - la - log_vol
                if log_acc >= 0 or math.log(row[1]) < log_acc:
                    state.remove(i)
            done += 1
            if counts is not None and done > cfg.burn_in:
                counts.append(state.n)
    return state.pattern(window), (np.asarray(counts) if counts is not None else None)


def run_birth_death(model: Model, window: Window, cfg: ChainConfig) -> PointPattern:
    """Final state of a birth-death Metropolis-Hastings chain."""
    return run_chain(model, window, cfg)[0]


def _simulate_one(model, window, cfg, index):
    if type(model).__name__ == "Poisson":
        return sample_poisson(window, model.beta, chain_rng(cfg.seed, index))
    return run_birth_death(model, window, cfg.for_chain(index))


def simulate_many(model: Model, window: Window, cfg: ChainConfig, n: int, workers: int = 1, exact_poisson=False):
    """`n` independent realizations, chain `k` seeded from ``(cfg.seed, k)``.

    With `exact_poisson`, Poisson models are sampled directly instead of by MCMC.
    """
    fn = partial(_simulate_one, model, window, cfg) if exact_poisson else partial(_chain_only, model, window, cfg)
    return _pmap(fn, range(n), workers)


def _chain_only(model, window, cfg, index):
    return run_birth_death(model, window, cfg.for_chain(index))


def _pmap(fn, items, workers):
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def _field_grid(pattern: PointPattern, R: float, torus: bool):
    """Cell grid over the pattern, with periodic images when `torus` is set.

    Returns ``(grid, shift)``; query points must be offset by `shift`.
    """
    pts = pattern.points
    L = pattern.window.side
    if not torus:
        return pattern.grid(R), 0.0
    d = pattern.dim
    imgs = []
    for sh in itertools.product((-L, 0.0, L), repeat=d):
        q = pts + np.asarray(sh)
        keep = np.all((q >= -R) & (q <= L + R), axis=1)
        imgs.append(q[keep])
    allp = np.vstack(imgs) + R
    return CellGrid(allp, L + 2 * R, R), R


def log_papangelou_field(model: Model, queries, pattern: PointPattern, boundary: str = "free") -> np.ndarray:
    """log lambda(q, x) for many query points q at once (q not in x)."""
    queries = np.asarray(queries, dtype=float).reshape(-1, pattern.dim)
    out = np.full(len(queries), model.log_beta)
    if len(pattern) == 0:
        return out
    grid, shift = _field_grid(pattern, model.range, boundary == "torus")
    qi, pj, dist = grid.query_pairs(queries + shift, model.range, exclude_zero=False)
    if model.pairwise:
        with np.errstate(invalid="ignore"):
            g = model.gamma(dist)
        out -= np.bincount(qi, weights=g, minlength=len(queries))
        return out
    pts = grid.points - shift
    starts = np.searchsorted(qi, np.arange(len(queries) + 1))
    for q in range(len(queries)):
        a, b = starts[q], starts[q + 1]
        if b > a:
            out[q] = model.log_lambda_local(queries[q], pts[pj[a:b]], dist[a:b])
    return out


def _box_grid(lo, hi, dim, res):
    step = (hi - lo) / res
    ax = lo + step * (np.arange(res) + 0.5)
    mesh = np.meshgrid(*([ax] * dim), indexing="ij")
    return np.column_stack([m.ravel() for m in mesh]), step


def _resolve_box(window: Window, box):
    if box is None:
        return 0.0, window.side
    lo, hi = map(float, box)
    if not (0.0 <= lo <= hi <= window.side):
        raise ConfigError(f"box [{lo}, {hi}] must lie inside the window")
    return lo, hi


def gnz_terms(model: Model, x: PointPattern, test_fn: str = "indicator", box=None, grid_res: int = 64,
              boundary: str = "free"):
    """Per-realization (sum side, integral side) of the one-point GNZ identity."""
    window = x.window
    lo, hi = _resolve_box(window, box)
    d = window.dim
    if hi <= lo:
        return 0.0, 0.0
    pts = x.points
    inside = np.all((pts >= lo) & (pts <= hi), axis=1)
    grid_pts, step = _box_grid(lo, hi, d, grid_res)
    lam = np.exp(log_papangelou_field(model, grid_pts, x, boundary))
    if test_fn == "indicator":
        lhs = float(np.count_nonzero(inside))
    elif test_fn == "htilde":
        R = model.range
        grid, shift = _field_grid(x, R, boundary == "torus")
        # count_within sees each point itself at distance 0
        iso = grid.count_within(pts[inside] + shift, R) == 1 if inside.any() else np.zeros(0, bool)
        lhs = float(np.count_nonzero(iso))
        lam = lam * (grid.count_within(grid_pts + shift, R) == 0)
    else:
        raise ConfigError(f"unknown test function {test_fn!r}")
    return lhs, float(lam.sum() * step**d)


def gnz_pair_terms(model: Model, x: PointPattern, box=None, grid_res: int = 64, boundary: str = "free",
                   n_mc: int = 4096, seed: int = 0):
    """Per-realization (sum side, integral side) of the two-point GNZ identity.

    ``h(u, v, x) = 1(u, v in B) 1(|u - v| <= R)``. For pairwise models the
    double integral uses ``lambda(u, v, x) = lambda(u, x) lambda(v, x) Phi(|u-v|)``
    on a grid with an FFT convolution; other models go through
    ``log_papangelou_multi`` at `n_mc` random pairs.
    """
    window = x.window
    lo, hi = _resolve_box(window, box)
    d = window.dim
    R = model.range
    if hi <= lo:
        return 0.0, 0.0
    pts = x.points
    inside = np.all((pts >= lo) & (pts <= hi), axis=1)
    sub = PointPattern(window, pts[inside])
    if len(sub) > 1:
        grid, shift = _field_grid(sub, R, boundary == "torus")
        lhs = float(len(grid.query_pairs(sub.points + shift, R)[0]))
    else:
        lhs = 0.0
    if model.pairwise:
        grid_pts, step = _box_grid(lo, hi, d, grid_res)
        lam = np.exp(log_papangelou_field(model, grid_pts, x, boundary)).reshape([grid_res] * d)
        kern = _disk_weights(step, R, d, model)
        conv = fftconvolve(lam, kern, mode="same")
        return lhs, float(np.sum(lam * conv) * step ** (2 * d))
    rng = chain_rng(seed)
    side = hi - lo
    u = lo + side * rng.random((n_mc, d))
    dirs = rng.normal(size=(n_mc, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    rad = R * rng.random(n_mc) ** (1.0 / d)
    v = u + dirs * rad[:, None]
    ok = np.all((v >= lo) & (v <= hi), axis=1)
    vals = np.zeros(n_mc)
    for k in np.flatnonzero(ok):
        vals[k] = math.exp(log_papangelou_multi(model, np.stack([u[k], v[k]]), x))
    ball = math.pi ** (d / 2) / math.gamma(d / 2 + 1) * R**d
    return lhs, float(side**d * ball * vals.mean())


def gnz_report(terms, label: str = "") -> GnzReport:
    """Combine per-chain ``(lhs, rhs)`` pairs into means, stderr and z-score."""
    terms = list(terms)
    if not terms:
        raise ConfigError("need at least one chain")
    lhs, rhs = (np.asarray(t, dtype=float) for t in zip(*terms))
    n = len(lhs)
    diff = lhs - rhs
    se = float(np.std(diff, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    mean_diff = float(diff.mean())
    if se > 0:
        z = mean_diff / se
    else:
        z = 0.0 if mean_diff == 0 else math.copysign(math.inf, mean_diff)
    return GnzReport(float(lhs.mean()), float(rhs.mean()), se, z, n, label)


def _gnz1_chain(model, window, cfg, test_fn, box, res, index):
    x = run_birth_death(model, window, cfg.for_chain(index))
    return gnz_terms(model, x, test_fn, box, res, cfg.boundary)


def _gnz2_chain(model, window, cfg, box, res, n_mc, index):
    c = cfg.for_chain(index)
    x = run_birth_death(model, window, c)
    return gnz_pair_terms(model, x, box, res, cfg.boundary, n_mc, _derive_seed(c.seed, 1))


def gnz_residual(
    model: Model,
    window: Window,
    n_chains: int,
    cfg: ChainConfig,
    test_fn: str = "indicator",
    box=None,
    grid_res: int = 64,
    workers: int = 1,
) -> GnzReport:
    """One-point GNZ check over `n_chains` independent chains.

    Parameters
    ----------
    test_fn : {'indicator', 'htilde'}
        ``h(u, x) = 1(u in B)`` or ``1(u in B) * 1(d(u, x) > R)``.
    box : (lo, hi) or None
        The cube ``[lo, hi]**dim`` playing the role of B; whole window if None.
    grid_res : int
        Midpoint-rule nodes per axis for the integral side.
    """
    if n_chains <= 0:
        raise ConfigError("n_chains must be positive")
    if test_fn not in ("indicator", "htilde"):
        raise ConfigError(f"unknown test function {test_fn!r}")
    _resolve_box(window, box)
    fn = partial(_gnz1_chain, model, window, cfg, test_fn, box, grid_res)
    return gnz_report(_pmap(fn, range(n_chains), workers), f"s=1 {test_fn}")


def _disk_weights(h: float, R: float, dim: int, model: Model, sub: int = 8):
    """Kernel on the offset lattice: cell fraction inside the R-ball times Phi(|o|)."""
    m = int(math.ceil(R / h)) + 1
    ax = np.arange(-m, m + 1) * h
    fine = (np.arange(sub) + 0.5) / sub - 0.5
    grids = np.meshgrid(*([ax] * dim), indexing="ij")
    centres = np.stack([g.ravel() for g in grids], axis=1)
    sgrids = np.meshgrid(*([fine * h] * dim), indexing="ij")
    subs = np.stack([g.ravel() for g in sgrids], axis=1)
    acc = np.zeros(len(centres))
    for s in subs:
        p = centres + s
        r = np.sqrt(np.sum(p * p, axis=1))
        inside = (r <= R) & (r > 0)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            phi = np.exp(-model.gamma(np.where(inside, r, R)))
        acc += np.where(inside, phi, 0.0)
    return (acc / len(subs)).reshape([2 * m + 1] * dim)


def gnz_residual_pairs(
    model: Model,
    window: Window,
    n_chains: int,
    cfg: ChainConfig,
    box=None,
    grid_res: int = 64,
    n_mc: int = 4096,
    workers: int = 1,
) -> GnzReport:
    """Two-point GNZ check over `n_chains` chains; see `gnz_pair_terms`."""
    if n_chains <= 0:
        raise ConfigError("n_chains must be positive")
    _resolve_box(window, box)
    fn = partial(_gnz2_chain, model, window, cfg, box, grid_res, n_mc)
    return gnz_report(_pmap(fn, range(n_chains), workers), "s=2 pair")
