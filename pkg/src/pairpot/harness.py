"""
Monte Carlo experiments around the pair-potential estimators.

``run_consistency_experiment``
    Replicated estimates of R_hat(r) along a ladder of rungs ``(side, b)``,
    summarized as bias, variance, scaled variance and MSE per rung, plus
    log-log slopes.
``run_recovery_demo``
    simulate -> estimate -> gamma_hat(r) next to the true potential.
``validate_sampler``
    One- and two-point GNZ residuals for the configured model.

Replicate ``k`` at a given side is always drawn from the stream
``(seed, k)``; every bandwidth on that side sees the same patterns, which
keeps bias differences between bandwidths free of sampling noise in the
patterns themselves.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError, UnsupportedModelError
from .estimators import EstimateReport, EstimatorInput, estimate_phi, estimate_R_hat
from .models import Poisson, pair_potential
from .sampler import _pmap, chain_rng, gnz_residual, gnz_residual_pairs, run_birth_death, sample_poisson
from .spatial import erode
from .theory import poisson_J, poisson_rhat_limit, variance_constant

__all__ = [
    "RungStats",
    "ConvergenceReport",
    "RecoveryResult",
    "poisson_target",
    "load_target",
    "write_target",
    "pilot_target",
    "simulate_rhat",
    "run_consistency_experiment",
    "run_recovery_demo",
    "validate_sampler",
    "write_rows_csv",
    "gnz_rows",
]


@dataclass(frozen=True)
class RungStats:
    """Sample statistics of R_hat(r) at one rung and one probe distance.

    `variance` is the ddof=0 sample variance, so that `mse` equals
    ``variance + bias**2``; `mse` is defined by that sum and `mse_direct` is
    the mean squared deviation from the target, for comparison.
    """

    side: float
    bandwidth: float
    r: float
    n: int
    eroded_volume: float
    target: float
    mean: float
    bias: float
    variance: float
    stderr: float
    scaled_variance: float
    mse: float
    mse_direct: float
    variance_constant: float = math.nan

    @property
    def variance_ratio(self) -> float:
        """scaled_variance over the asymptotic constant (Poisson only)."""
        return self.scaled_variance / self.variance_constant


@dataclass
class ConvergenceReport:
    rungs: list
    slopes: dict = field(default_factory=dict)
    target_source: str = ""

    def at(self, r: float):
        return [s for s in self.rungs if s.r == r]

    def rows(self):
        for s in self.rungs:
            yield {
                "side": s.side,
                "bandwidth": s.bandwidth,
                "r": s.r,
                "n": s.n,
                "target": s.target,
                "mean": s.mean,
                "bias": s.bias,
                "variance": s.variance,
                "stderr": s.stderr,
                "scaled_variance": s.scaled_variance,
                "mse": s.mse,
                "variance_constant": s.variance_constant,
            }


def poisson_target(cfg: ExperimentConfig) -> np.ndarray:
    """Analytic limit ``beta**2 J(r)`` at the configured probe distances."""
    m = cfg.model
    return np.array([poisson_rhat_limit(r, m.beta, m.range, cfg.dim) for r in cfg.r])


def write_target(path, r, values, provenance: dict) -> None:
    """Store a pilot target as CSV preceded by ``# key: value`` provenance lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for k, v in provenance.items():
            fh.write(f"# {k}: {v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "target", "stderr"])
        for row in zip(r, *values):
            w.writerow([repr(float(v)) for v in row])


def load_target(path):
    """Read a target fixture; returns ``(r, target, stderr, provenance)``."""
    prov, rows = {}, []
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if line.startswith("#"):
                    k, _, v = line[1:].partition(":")
                    prov[k.strip()] = v.strip()
                elif line.strip():
                    rows.append(line.strip())
    except OSError as exc:
        raise ConfigError(f"cannot read target fixture {path}: {exc}") from exc
    if not rows or rows[0] != "r,target,stderr":
        raise ConfigError(f"{path}: expected header r,target,stderr")
    data = np.array([[float(v) for v in row.split(",")] for row in rows[1:]])
    if "model" not in prov:
        raise ConfigError(f"{path}: missing provenance header 'model'")
    return data[:, 0], data[:, 1], data[:, 2], prov


def _target_for(cfg: ExperimentConfig):
    if isinstance(cfg.model, Poisson) and cfg.target is None:
        return poisson_target(cfg), "analytic beta^2 J(r)"
    if cfg.target is None:
        raise ConfigError(f"model {cfg.model.kind} needs a pilot target fixture (experiment.target)")
    r, t, _, prov = load_target(cfg.target)
    if prov.get("model") != repr(cfg.model):
        raise ConfigError(f"target fixture was made for {prov.get('model')}, not {cfg.model!r}")
    out = []
    for v in cfg.r:
        hit = np.flatnonzero(np.isclose(r, v, rtol=0, atol=1e-12))
        if len(hit) == 0:
            raise ConfigError(f"target fixture has no entry for r={v}")
        out.append(t[hit[0]])
    return np.array(out), f"pilot fixture {cfg.target}"


def _realize(cfg: ExperimentConfig, side: float, index: int):
    window = cfg.window(side)
    if cfg.exact_poisson and isinstance(cfg.model, Poisson):
        return sample_poisson(window, cfg.model.beta, chain_rng(cfg.seed, index))
    return run_birth_death(cfg.model, window, cfg.chain(side).for_chain(index))


def _replicate(cfg: ExperimentConfig, side: float, bandwidths: tuple, index: int) -> np.ndarray:
    """R_hat at every (bandwidth, r) for replicate `index` on `side`."""
    x = _realize(cfg, side, index)
    inp = EstimatorInput(
        x, cfg.model.range, cfg.kernel, max(bandwidths), np.asarray(cfg.r),
        sphere_nodes=cfg.sphere_nodes, region_grid_res=cfg.region_grid_res,
    )
    return np.stack([estimate_R_hat(inp, bandwidth=b) for b in bandwidths])


def simulate_rhat(cfg: ExperimentConfig) -> dict:
    """Raw replicate values: ``{side: (bandwidths, array[replicate, b, r])}``."""
    by_side = {}
    for side, b in cfg.rungs():
        by_side.setdefault(side, []).append(b)
    out = {}
    for side, bws in by_side.items():
        bws = tuple(bws)
        fn = partial(_replicate, cfg, side, bws)
        out[side] = (bws, np.stack(_pmap(fn, range(cfg.replicates), cfg.workers)))
    return out


def _slope(x, y):
    x, y = np.log(np.asarray(x, float)), np.log(np.abs(np.asarray(y, float)))
    if len(np.unique(x)) < 2 or not np.all(np.isfinite(y)):
        return math.nan
    return float(np.polyfit(x, y, 1)[0])


def run_consistency_experiment(cfg: ExperimentConfig, target=None) -> ConvergenceReport:
    """Replicated R_hat along the rung ladder, against the limit target.

    Parameters
    ----------
    cfg : ExperimentConfig
        At least 30 replicates per rung.
    target : array-like, optional
        Limit values at ``cfg.r``. Defaults to the analytic Poisson limit or
        to the fixture named in ``cfg.target``.
    """
    if cfg.replicates < 30:
        raise ConfigError("consistency experiments need at least 30 replicates per rung")
    if target is None:
        target, source = _target_for(cfg)
    else:
        target, source = np.asarray(target, dtype=float), "supplied"
    if target.shape != (len(cfg.r),):
        raise ConfigError("target must have one value per probe distance")
    m = cfg.model
    poisson = isinstance(m, Poisson)
    raw = simulate_rhat(cfg)
    rungs = []
    for side, b in cfg.rungs():
        bws, vals = raw[side]
        vol = erode(cfg.window(side), 2 * m.range).volume
        for k, r in enumerate(cfg.r):
            v = vals[:, bws.index(b), k]
            n = len(v)
            mean = float(v.mean())
            var = float(np.mean((v - mean) ** 2))
            bias = mean - float(target[k])
            const = (
                variance_constant(r, m.beta, poisson_J(r, m.beta, m.range, cfg.dim), 1.0, cfg.kernel, cfg.dim)
                if poisson else math.nan
            )
            rungs.append(RungStats(
                side=side, bandwidth=b, r=r, n=n, eroded_volume=vol, target=float(target[k]),
                mean=mean, bias=bias, variance=var, stderr=math.sqrt(var / (n - 1)),
                scaled_variance=b * vol * var, mse=var + bias * bias,
                mse_direct=float(np.mean((v - target[k]) ** 2)), variance_constant=const,
            ))
    slopes = {}
    for r in cfg.r:
        rs = [s for s in rungs if s.r == r]
        slopes[r] = {
            "log_bias_vs_log_b": _slope([s.bandwidth for s in rs], [s.bias for s in rs]),
            "log_var_vs_log_b": _slope([s.bandwidth for s in rs], [s.variance for s in rs]),
            "log_var_vs_log_vol": _slope([s.eroded_volume for s in rs], [s.variance for s in rs]),
        }
    return ConvergenceReport(rungs, slopes, source)


def pilot_target(cfg: ExperimentConfig, path=None, factor: int = 10):
    """Estimate the limit of R_hat by a long pilot run at the last rung.

    Uses ``factor * cfg.replicates`` replicates on an independent seed stream
    (seed + 1) and the smallest bandwidth on the ladder. With `path`, the
    result is written as a fixture with its provenance.
    """
    side, b = min(cfg.rungs(), key=lambda sb: (-sb[0], sb[1]))
    pilot = cfg.with_(
        sides=(side,), bandwidths=(b,), schedule=None, replicates=factor * cfg.replicates, seed=cfg.seed + 1
    )
    vals = simulate_rhat(pilot)[side][1][:, 0, :]
    mean = vals.mean(axis=0)
    se = vals.std(axis=0, ddof=1) / math.sqrt(len(vals))
    if path is not None:
        write_target(path, cfg.r, (mean, se), {
            "model": repr(cfg.model),
            "method": "pilot Monte Carlo mean of R_hat",
            "side": side,
            "bandwidth": b,
            "kernel": cfg.kernel,
            "replicates": len(vals),
            "seed": pilot.seed,
            "sampler": "birth-death" if not (cfg.exact_poisson and isinstance(cfg.model, Poisson)) else "exact",
            "chain_factor": cfg.chain_factor,
        })
    return mean, se


@dataclass
class RecoveryResult:
    """Per-replicate estimates next to the true potential on the r grid."""

    r: np.ndarray
    gamma_true: np.ndarray
    reports: list
    band: tuple
    band_medians: np.ndarray
    sup_norms: np.ndarray
    notes: list = field(default_factory=list)

    @property
    def gamma_hat(self) -> np.ndarray:
        """Pointwise median of gamma_hat over replicates."""
        return np.median(np.stack([rep.gamma_hat for rep in self.reports]), axis=0)

    @property
    def band_median(self) -> float:
        """Median over replicates of each replicate's median over the band."""
        return float(np.median(self.band_medians))

    @property
    def discrepancy(self) -> float:
        """|band median - median true potential on the band|."""
        inb = (self.r >= self.band[0]) & (self.r <= self.band[1])
        return abs(self.band_median - float(np.median(self.gamma_true[inb])))

    def rows(self):
        g = self.gamma_hat
        for k in range(len(self.r)):
            yield {"r": self.r[k], "gamma_true": self.gamma_true[k], "gamma_hat": g[k]}


def _recovery_one(cfg: ExperimentConfig, side: float, b: float, index: int) -> EstimateReport:
    x = _realize(cfg, side, index)
    inp = EstimatorInput(
        x, cfg.model.range, cfg.kernel, b, np.asarray(cfg.r),
        sphere_nodes=cfg.sphere_nodes, region_grid_res=cfg.region_grid_res,
    )
    return estimate_phi(inp)


def run_recovery_demo(cfg: ExperimentConfig) -> RecoveryResult:
    """Estimate gamma on the r grid at the last rung and compare with the truth.

    Runs ``cfg.replicates`` independent realizations. The probe band defaults
    to ``[0.3 R, 0.9 R]``; the sup-norm discrepancy is taken over band points
    where gamma_hat is finite.
    """
    m = cfg.model
    if not m.pairwise:
        raise UnsupportedModelError(f"{m.kind} has no pair potential to recover")
    side, b = cfg.rungs()[-1]
    r = np.asarray(cfg.r)
    band = cfg.band or (0.3 * m.range, 0.9 * m.range)
    inb = (r >= band[0]) & (r <= band[1])
    if not inb.any():
        raise ConfigError(f"no probe distance inside the band {band}")
    gamma_true = np.asarray(pair_potential(m, r), dtype=float).reshape(-1)
    fn = partial(_recovery_one, cfg, side, b)
    reports = _pmap(fn, range(cfg.replicates), cfg.workers)
    meds, sups = [], []
    for rep in reports:
        g = rep.gamma_hat[inb]
        meds.append(float(np.median(g)) if not np.all(np.isnan(g)) else math.nan)
        fin = np.isfinite(g)
        sups.append(float(np.max(np.abs(g[fin] - gamma_true[inb][fin]))) if fin.any() else math.nan)
    notes = []
    if not m.is_repulsive(r[inb]):
        notes.append(
            f"{m.kind}: gamma is not positive on the whole band; Phi > 1 there and gamma_hat < 0 is expected"
        )
    if any("phi_nonpositive" in f for rep in reports for f in rep.flags):
        notes.append("some Phi_hat values were <= 0; gamma_hat is +inf at those r")
    return RecoveryResult(r, gamma_true, reports, tuple(band), np.array(meds), np.array(sups), notes)


def validate_sampler(cfg: ExperimentConfig, box=None, grid_res: int = 64, n_mc: int = 4096) -> list:
    """GNZ residuals at the first rung: s=1 with both test functions, then s=2.

    ``cfg.replicates`` independent chains per check.
    """
    if cfg.replicates <= 0:
        raise ConfigError("need at least one replicate")
    side = cfg.rungs()[0][0]
    window = cfg.window(side)
    chain = cfg.chain(side)
    out = [
        gnz_residual(cfg.model, window, cfg.replicates, chain, "indicator", box, grid_res, cfg.workers),
        gnz_residual(cfg.model, window, cfg.replicates, chain, "htilde", box, grid_res, cfg.workers),
        gnz_residual_pairs(cfg.model, window, cfg.replicates, chain, box, grid_res, n_mc, cfg.workers),
    ]
    return out


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_rows_csv(path, rows, columns) -> None:
    """CSV with a header row, UTF-8, LF line ends and minimal quoting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row[c]) for c in columns])


def gnz_rows(reports):
    for g in reports:
        yield {"label": g.label, "lhs": g.lhs, "rhs": g.rhs, "mc_stderr": g.mc_stderr,
               "z_score": g.z_score, "n_chains": g.n_chains}
