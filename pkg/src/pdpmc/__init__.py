"""Monte Carlo wave-function simulation of generalized Lindblad dynamics."""

__version__ = "0.1.0"

from .engine import (
    ComponentState,
    GeneralizedLindbladModel,
    JumpChannel,
    JumpEvent,
    TrajectoryResult,
    apply_jump,
    channel_rate,
    effective_drift_step,
    run_trajectory,
    sample_jump_time,
    select_channel,
)
from .ensemble import EnsembleEstimate, integrate_master, master_rhs, run_ensemble
from .exact import (
    SectorHamiltonian,
    build_sector_hamiltonian,
    evolve_exact,
    initial_sector_state,
    upper_population,
)
from .numerics import (
    RngStream,
    find_root_increasing,
    gauss_legendre,
    hermitian_eig,
    sine_integral,
)
from .two_band import (
    HazardTable,
    RatePair,
    SamplerConvention,
    TwoBandParams,
    build_strong_model,
    build_weak_model,
    correlation_h,
    decay_exponent,
    decay_exponent_grid,
    integral_h,
    relaxation_rates,
    sample_strong_waiting_time,
    tcl2_population,
    tcl2t_population,
)

__all__ = [
    "__version__",
    "ComponentState",
    "GeneralizedLindbladModel",
    "JumpChannel",
    "JumpEvent",
    "TrajectoryResult",
    "apply_jump",
    "channel_rate",
    "effective_drift_step",
    "run_trajectory",
    "sample_jump_time",
    "select_channel",
    "EnsembleEstimate",
    "integrate_master",
    "master_rhs",
    "run_ensemble",
    "SectorHamiltonian",
    "build_sector_hamiltonian",
    "evolve_exact",
    "initial_sector_state",
    "upper_population",
    "RngStream",
    "find_root_increasing",
    "gauss_legendre",
    "hermitian_eig",
    "sine_integral",
    "HazardTable",
    "RatePair",
    "SamplerConvention",
    "TwoBandParams",
    "build_strong_model",
    "build_weak_model",
    "correlation_h",
    "decay_exponent",
    "decay_exponent_grid",
    "integral_h",
    "relaxation_rates",
    "sample_strong_waiting_time",
    "tcl2_population",
    "tcl2t_population",
]
