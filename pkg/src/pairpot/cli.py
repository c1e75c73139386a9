"""
Command line entry point: ``pairpot {simulate,estimate,validate,experiment}``.

Exit codes: 0 success, 2 configuration error, 3 degenerate estimate.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .config import load_config, load_model, parse_r_grid
from .errors import ConfigError, DegenerateEstimateError, PairpotError
from .estimators import EstimatorInput, estimate_phi
from .harness import (
    gnz_rows,
    pilot_target,
    run_consistency_experiment,
    run_recovery_demo,
    validate_sampler,
    write_rows_csv,
)
from .models import Poisson
from .sampler import ChainConfig, chain_rng, run_birth_death, sample_poisson
from .spatial import Window, read_pattern_csv, write_pattern_csv

log = logging.getLogger("pairpot")

ESTIMATE_COLUMNS = ["r", "R_hat", "J_hat", "beta_hat", "phi_hat", "gamma_hat", "flags"]
CONVERGENCE_COLUMNS = [
    "side", "bandwidth", "r", "n", "target", "mean", "bias", "variance", "stderr",
    "scaled_variance", "mse", "variance_constant",
]
GNZ_COLUMNS = ["label", "lhs", "rhs", "mc_stderr", "z_score", "n_chains"]


def _add_config(p):
    p.add_argument("--config", required=True, help="INI experiment file")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override one config entry (repeatable)")
    p.add_argument("--seed", type=int, help="shortcut for --set experiment.seed=...")
    p.add_argument("--workers", type=int, help="shortcut for --set experiment.workers=...")


def build_parser() -> argparse.ArgumentParser:
    # argparse exits with 2 on usage errors, the same code as a config error
    ap = argparse.ArgumentParser(prog="pairpot", description="Gibbs pair-potential simulation and estimation")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw realizations and write them as pattern CSVs")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="INI experiment file")
    src.add_argument("--model-config", help="file with a [model] section")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
    p.add_argument("--side", type=float, help="window side (default: largest configured side)")
    p.add_argument("--dim", type=int, help="window dimension (default 2 or the configured one)")
    p.add_argument("--steps", type=int, help="chain proposals including burn-in")
    p.add_argument("--burn-in", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--boundary", choices=["free", "torus"])
    p.add_argument("--count", type=int, default=1, help="realizations; more than one adds a _NNNN suffix")
    p.add_argument("--out", required=True, help="output pattern CSV")

    p = sub.add_parser("estimate", help="estimate beta, J, R and the pair potential from a pattern")
    p.add_argument("--pattern", required=True)
    p.add_argument("--range", type=float, required=True, dest="range_")
    p.add_argument("--kernel", default="epanechnikov")
    p.add_argument("--bandwidth", type=float, required=True)
    p.add_argument("--r-grid", required=True, help="lo:hi:n")
    p.add_argument("--sphere-nodes", type=int, default=64)
    p.add_argument("--out", required=True)

    p = sub.add_parser("validate", help="GNZ residuals for the configured model")
    _add_config(p)
    p.add_argument("--out", required=True)
    p.add_argument("--grid-res", type=int, default=64)

    p = sub.add_parser("experiment", help="consistency ladder, recovery demo or pilot target")
    _add_config(p)
    p.add_argument("--kind", choices=["consistency", "recovery", "pilot"], default="consistency")
    p.add_argument("--out", help="output file (default: <experiment.output>/<kind>.csv)")
    return ap


def _config(args):
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"experiment.seed={args.seed}")
    if args.workers is not None:
        overrides.append(f"experiment.workers={args.workers}")
    return load_config(args.config, overrides)


def _cmd_simulate(args) -> int:
    if args.config:
        cfg = load_config(args.config, args.set)
        model, dim, side = cfg.model, cfg.dim, cfg.sides[-1]
        seed, boundary, exact = cfg.seed, cfg.boundary, cfg.exact_poisson
    else:
        if args.set:
            raise ConfigError("--set needs --config")
        model, dim, side, seed, boundary, exact = load_model(args.model_config), 2, None, 0, "free", True
    dim = args.dim or dim
    side = args.side or side
    if side is None:
        raise ConfigError("--side is required with --model-config")
    seed = seed if args.seed is None else args.seed
    boundary = args.boundary or boundary
    if args.count < 1:
        raise ConfigError("--count must be positive")
    window = Window(dim, side)
    chain = ChainConfig.default(model, window, seed=seed, boundary=boundary)
    if args.steps is not None or args.burn_in is not None:
        steps = args.steps if args.steps is not None else 2 * args.burn_in
        burn = args.burn_in if args.burn_in is not None else steps // 2
        chain = ChainConfig(steps, burn, seed, boundary=boundary)
        exact = False
    out = Path(args.out)
    for k in range(args.count):
        if exact and isinstance(model, Poisson):
            x = sample_poisson(window, model.beta, chain_rng(seed, k))
        else:
            x = run_birth_death(model, window, chain.for_chain(k))
        path = out if args.count == 1 else out.with_name(f"{out.stem}_{k:04d}{out.suffix}")
        path.parent.mkdir(parents=True, exist_ok=True)
        write_pattern_csv(x, path)
        log.info("replicate %d: %d points -> %s", k, len(x), path)
    return 0


def _cmd_estimate(args) -> int:
    try:
        x = read_pattern_csv(args.pattern)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read pattern {args.pattern}: {exc}") from exc
    inp = EstimatorInput(x, args.range_, args.kernel, args.bandwidth, parse_r_grid(args.r_grid),
                         sphere_nodes=args.sphere_nodes)
    rep = estimate_phi(inp)
    write_rows_csv(args.out, rep.rows(), ESTIMATE_COLUMNS)
    log.info("beta_hat %.6g over %d points", rep.beta_hat, len(x))
    return 0


def _cmd_validate(args) -> int:
    cfg = _config(args)
    reports = validate_sampler(cfg, grid_res=args.grid_res)
    write_rows_csv(args.out, gnz_rows(reports), GNZ_COLUMNS)
    for g in reports:
        log.info("%s: z = %.3f", g.label, g.z_score)
    return 0


def _cmd_experiment(args) -> int:
    cfg = _config(args)
    out = Path(args.out) if args.out else Path(cfg.output) / f"{args.kind}.csv"
    if args.kind == "consistency":
        rep = run_consistency_experiment(cfg)
        write_rows_csv(out, rep.rows(), CONVERGENCE_COLUMNS)
        for r, s in rep.slopes.items():
            log.info("r=%g slopes %s", r, s)
    elif args.kind == "recovery":
        res = run_recovery_demo(cfg)
        write_rows_csv(out, res.rows(), ["r", "gamma_true", "gamma_hat"])
        log.info("band median %.4f, discrepancy %.4f", res.band_median, res.discrepancy)
        for note in res.notes:
            log.warning(note)
    else:
        pilot_target(cfg, out)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate": _cmd_estimate,
    "validate": _cmd_validate,
    "experiment": _cmd_experiment,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ValueError) as exc:
        # bad parameter values surface as ValueError from the library
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DegenerateEstimateError as exc:
        print(f"degenerate estimate: {exc}", file=sys.stderr)
        return 3
    except PairpotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
