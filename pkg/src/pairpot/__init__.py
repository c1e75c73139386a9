"""
pairpot: finite-range Gibbs point processes, a birth-death sampler and
edge-corrected kernel estimators of the pair potential.
"""

from .errors import ConfigError, DegenerateEstimateError, PairpotError, ResourceError, UnsupportedModelError
from .spatial import (
    CellGrid,
    PointPattern,
    Window,
    dist_to_pattern,
    erode,
    neighbors_within,
    read_pattern_csv,
    write_pattern_csv,
)
from .models import (
    LennardJones,
    Model,
    PiecewiseStrauss,
    Poisson,
    Strauss,
    Triplets,
    log_papangelou,
    log_papangelou_multi,
    model_from_mapping,
    pair_potential,
)
from .kernels import BandwidthSchedule, KERNELS, check_moments, default_bandwidth_schedule, get_kernel, lipschitz_check, squared_integral
from .sampler import ChainConfig, GnzReport, gnz_residual, gnz_residual_pairs, run_birth_death, sample_poisson, simulate_many
from .estimators import (
    EstimateReport,
    EstimatorInput,
    estimate_beta,
    estimate_J,
    estimate_phi,
    estimate_R_hat,
    hstar,
    htilde,
)
from .config import ExperimentConfig, load_config, parse_config
from .harness import ConvergenceReport, RecoveryResult, run_consistency_experiment, run_recovery_demo, validate_sampler

__version__ = "0.1.0"
