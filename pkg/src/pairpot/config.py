"""
Experiment configuration files.

The format is INI (``configparser``) with the sections below; every key is
optional unless marked, and any key or section not listed is an error::

    [model]          kind (required), beta (required), range, phi, theta,
                     breaks, phis
    [window]         dim (default 2), sides (required; one value or a list)
    [kernel]         kind (default epanechnikov), sphere_nodes (default 64),
                     region_grid_res
    [bandwidth]      either ``values`` (one value or a list) or a schedule
                     ``constant``, ``q2``, ``q1`` giving b(L) = c L^-q2 log(L)^q1
    [experiment]     replicates (default 1), r (list of probe distances),
                     r_grid (lo:hi:n), band (lo, hi), seed (default 0),
                     output (directory, default "."), workers (default 1),
                     sampler (exact or mcmc, default exact), target (fixture path)
    [chain]          factor (default 10), boundary (free or torus),
                     initial (poisson or empty)

Lists are separated by commas or whitespace.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .kernels import BandwidthSchedule, get_kernel
from .models import Model, model_from_mapping
from .sampler import ChainConfig
from .spatial import Window

__all__ = ["ExperimentConfig", "load_config", "load_model", "parse_config", "parse_r_grid", "apply_overrides"]

_SECTIONS = {
    "model": {"kind", "beta", "range", "phi", "theta", "breaks", "phis"},
    "window": {"dim", "sides"},
    "kernel": {"kind", "sphere_nodes", "region_grid_res"},
    "bandwidth": {"values", "constant", "q1", "q2"},
    "experiment": {"replicates", "r", "r_grid", "band", "seed", "output", "workers", "sampler", "target"},
    "chain": {"factor", "boundary", "initial"},
}


def _floats(text: str, what: str) -> tuple:
    try:
        vals = tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{what}: expected numbers, got {text!r}") from None
    if not vals:
        raise ConfigError(f"{what}: empty list")
    return vals


def _int(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"{what}: expected an integer, got {text!r}") from None


def parse_r_grid(text: str) -> np.ndarray:
    """``"lo:hi:n"`` -> n equally spaced distances from lo to hi inclusive."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"r grid must look like lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"r grid must look like lo:hi:n, got {text!r}") from None
    if n < 1 or not (0 < lo <= hi):
        raise ConfigError(f"bad r grid {text!r}")
    if n == 1 and lo != hi:
        raise ConfigError("a one-point r grid needs lo == hi")
    return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything an experiment needs: model, window ladder, tuning and seeds.

    Rungs are ``(side, bandwidth)`` pairs: a side ladder at one bandwidth (or
    along a schedule), or a bandwidth ladder at one side.
    """

    model: Model
    sides: tuple
    dim: int = 2
    kernel: str = "epanechnikov"
    bandwidths: tuple | None = None
    schedule: BandwidthSchedule | None = None
    r: tuple = ()
    replicates: int = 1
    seed: int = 0
    output: str = "."
    workers: int = 1
    sampler: str = "exact"
    sphere_nodes: int = 64
    region_grid_res: int | None = None
    band: tuple | None = None
    target: str | None = None
    chain_factor: float = 10.0
    boundary: str = "free"
    initial: str = "poisson"

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ConfigError(f"window dim must be 1, 2 or 3, got {self.dim}")
        sides = tuple(float(s) for s in self.sides)
        object.__setattr__(self, "sides", sides)
        if not sides or any(np.diff(sides) <= 0):
            raise ConfigError("window sides must be a non-empty increasing list")
        R = self.model.range
        for s in sides:
            if not s > 4 * R:
                raise ConfigError(f"side {s} leaves an empty 2R-eroded window (needs side > 4R = {4 * R})")
        get_kernel(self.kernel)
        if (self.bandwidths is None) == (self.schedule is None):
            raise ConfigError("give either bandwidth values or a bandwidth schedule")
        if self.bandwidths is not None:
            bw = tuple(float(b) for b in self.bandwidths)
            object.__setattr__(self, "bandwidths", bw)
            if len(bw) > 1 and len(sides) > 1:
                raise ConfigError("ladder over both sides and bandwidths is not supported")
        for _, b in self.rungs():
            if not (0 < b <= R):
                raise ConfigError(f"bandwidth {b} outside (0, R]")
        r = tuple(float(v) for v in self.r)
        object.__setattr__(self, "r", r)
        if not r:
            raise ConfigError("experiment needs at least one probe distance r")
        if any(v <= 0 or v > R for v in r) or any(np.diff(r) <= 0):
            raise ConfigError("probe distances must be increasing and lie in (0, R]")
        if self.replicates < 1:
            raise ConfigError("replicates must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be positive")
        if self.sampler not in ("exact", "mcmc"):
            raise ConfigError(f"sampler must be 'exact' or 'mcmc', got {self.sampler!r}")
        if self.band is not None:
            lo, hi = self.band
            if not (0 < lo < hi <= R):
                raise ConfigError("band must satisfy 0 < lo < hi <= R")
        if not self.chain_factor > 0:
            raise ConfigError("chain factor must be positive")
        # reuse ChainConfig's own checks for boundary / initial
        ChainConfig(2, 1, 0, self.initial, self.boundary)

    def rungs(self):
        if self.schedule is not None:
            return [(s, float(self.schedule(s))) for s in self.sides]
        if len(self.bandwidths) > 1:
            return [(self.sides[0], b) for b in self.bandwidths]
        return [(s, self.bandwidths[0]) for s in self.sides]

    def window(self, side: float | None = None) -> Window:
        return Window(self.dim, self.sides[-1] if side is None else side)

    def chain(self, side: float) -> ChainConfig:
        return ChainConfig.default(
            self.model, self.window(side), seed=self.seed, factor=self.chain_factor,
            initial=self.initial, boundary=self.boundary,
        )

    @property
    def exact_poisson(self) -> bool:
        return self.sampler == "exact"

    def with_(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw)


def _check_keys(cp: configparser.ConfigParser):
    for sec in cp.sections():
        if sec not in _SECTIONS:
            raise ConfigError(f"unknown section [{sec}]; allowed: {sorted(_SECTIONS)}")
        unknown = set(cp[sec]) - _SECTIONS[sec]
        if unknown:
            raise ConfigError(f"unknown keys in [{sec}]: {sorted(unknown)}")
    for sec in ("model", "window"):
        if not cp.has_section(sec):
            raise ConfigError(f"missing section [{sec}]")


def parse_config(text: str, base_dir: str | Path = ".") -> ExperimentConfig:
    """Parse configuration text; relative paths resolve against `base_dir`."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    _check_keys(cp)
    get = lambda sec, key, default=None: cp.get(sec, key, fallback=default) if cp.has_section(sec) else default

    model = model_from_mapping(dict(cp["model"]))
    sides = get("window", "sides")
    if sides is None:
        raise ConfigError("[window] needs sides")
    kw = dict(
        model=model,
        sides=_floats(sides, "window.sides"),
        dim=_int(get("window", "dim", "2"), "window.dim"),
        kernel=get("kernel", "kind", "epanechnikov"),
        sphere_nodes=_int(get("kernel", "sphere_nodes", "64"), "kernel.sphere_nodes"),
        replicates=_int(get("experiment", "replicates", "1"), "experiment.replicates"),
        seed=_int(get("experiment", "seed", "0"), "experiment.seed"),
        workers=_int(get("experiment", "workers", "1"), "experiment.workers"),
        sampler=get("experiment", "sampler", "exact"),
        chain_factor=_floats(get("chain", "factor", "10"), "chain.factor")[0],
        boundary=get("chain", "boundary", "free"),
        initial=get("chain", "initial", "poisson"),
    )
    res = get("kernel", "region_grid_res")
    if res is not None:
        kw["region_grid_res"] = _int(res, "kernel.region_grid_res")
    bw = cp["bandwidth"] if cp.has_section("bandwidth") else {}
    if "values" in bw:
        if set(bw) & {"constant", "q1", "q2"}:
            raise ConfigError("[bandwidth] takes either values or a schedule, not both")
        kw["bandwidths"] = _floats(bw["values"], "bandwidth.values")
    elif bw:
        try:
            kw["schedule"] = BandwidthSchedule(
                q1=float(bw.get("q1", 0.0)), q2=float(bw.get("q2", 0.0)), constant=float(bw.get("constant", 1.0))
            )
        except ValueError as exc:
            raise ConfigError(f"bad bandwidth schedule: {exc}") from exc
    else:
        raise ConfigError("missing section [bandwidth]")
    r = get("experiment", "r")
    r_grid = get("experiment", "r_grid")
    if r is not None and r_grid is not None:
        raise ConfigError("give either experiment.r or experiment.r_grid")
    if r_grid is not None:
        kw["r"] = tuple(parse_r_grid(r_grid))
    elif r is not None:
        kw["r"] = _floats(r, "experiment.r")
    band = get("experiment", "band")
    if band is not None:
        b = _floats(band, "experiment.band")
        if len(b) != 2:
            raise ConfigError("experiment.band needs two numbers")
        kw["band"] = b
    base = Path(base_dir)
    out = get("experiment", "output", ".")
    kw["output"] = str(base / out)
    target = get("experiment", "target")
    if target is not None:
        kw["target"] = str(base / target)
    try:
        return ExperimentConfig(**kw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def apply_overrides(text: str, overrides) -> str:
    """Apply ``section.key=value`` overrides to configuration text."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    for item in overrides or ():
        key, sep, value = item.partition("=")
        sec, dot, name = key.strip().partition(".")
        if not sep or not dot or not name:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        if not cp.has_section(sec):
            cp.add_section(sec)
        cp.set(sec, name, value.strip())
    lines = []
    for sec in cp.sections():
        lines.append(f"[{sec}]")
        lines.extend(f"{k} = {v}" for k, v in cp[sec].items())
    return "\n".join(lines) + "\n"


def load_config(path, overrides=()) -> ExperimentConfig:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc}") from exc
    if overrides:
        text = apply_overrides(text, overrides)
    return parse_config(text, base_dir=p.parent)


def load_model(path) -> Model:
    """Model from the ``[model]`` section of a file; other sections are ignored."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read model config {path}: {exc}") from exc
    if not cp.has_section("model"):
        raise ConfigError(f"{path}: missing section [model]")
    return model_from_mapping(dict(cp["model"]))
