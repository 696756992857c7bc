"""Gridless spectral super-resolution via atomic-norm methods.

Estimates continuous frequencies of superimposed complex sinusoids from
(partial, possibly noisy, multi-snapshot) samples, without discretizing the
frequency axis.  The convex workhorse is an atomic-norm semidefinite
program; a reweighted variant sharpens it iteratively through a log-det
surrogate, resolving components well below the separation the plain convex
program needs.  Frequencies are read off the optimized Toeplitz parameter by
Vandermonde decomposition, and a MUSIC baseline plus Monte-Carlo experiment
harnesses round out the toolkit.
"""

from .signal import (
    FeasibleDomain,
    FrequencyMixture,
    MeasurementSet,
    SamplingPattern,
    add_noise,
    draw_mixture,
    noise_ball_radius,
    steering_vector,
    subsample,
    synthesize,
    wrap_distance,
)
from .toeplitz import eigencheck_psd, toeplitz_adjoint, toeplitz_lift
from .solver import (
    InfeasibleDomainError,
    SdpSolution,
    SolverOptions,
    atomic_norm,
    eval_metric,
    solve_weighted_anm,
)
from .ram import (
    RamConfig,
    RamRecord,
    RamTrace,
    anm_solve,
    capon_weight,
    mm_objective_decrease_check,
    ram_solve,
    reweight,
)
from .retrieval import (
    FullRankError,
    MatchResult,
    ReconstructionError,
    RetrievedSpectrum,
    match_and_score,
    match_frequencies,
    numerical_rank,
    signal_relative_mse,
    vandermonde_decompose,
)
from .music import (
    Pseudospectrum,
    music_pseudospectrum,
    pick_peaks,
    sample_covariance,
)
from .experiments import (
    DoaConfig,
    DoaResult,
    DoaRunRecord,
    PhaseRunRecord,
    PhaseTransitionConfig,
    PhaseTransitionResult,
    dimension_reduce,
    draw_doa_mixture,
    export_manifest,
    run_doa,
    run_phase_transition,
)

__version__ = "0.1.0"

__all__ = [
    "FeasibleDomain",
    "FrequencyMixture",
    "MeasurementSet",
    "SamplingPattern",
    "add_noise",
    "draw_mixture",
    "noise_ball_radius",
    "steering_vector",
    "subsample",
    "synthesize",
    "wrap_distance",
    "eigencheck_psd",
    "toeplitz_adjoint",
    "toeplitz_lift",
    "InfeasibleDomainError",
    "SdpSolution",
    "SolverOptions",
    "atomic_norm",
    "eval_metric",
    "solve_weighted_anm",
    "RamConfig",
    "RamRecord",
    "RamTrace",
    "anm_solve",
    "capon_weight",
    "mm_objective_decrease_check",
    "ram_solve",
    "reweight",
    "FullRankError",
    "MatchResult",
    "ReconstructionError",
    "RetrievedSpectrum",
    "match_and_score",
    "match_frequencies",
    "numerical_rank",
    "signal_relative_mse",
    "vandermonde_decompose",
    "Pseudospectrum",
    "music_pseudospectrum",
    "pick_peaks",
    "sample_covariance",
    "DoaConfig",
    "DoaResult",
    "DoaRunRecord",
    "PhaseRunRecord",
    "PhaseTransitionConfig",
    "PhaseTransitionResult",
    "dimension_reduce",
    "draw_doa_mixture",
    "export_manifest",
    "run_doa",
    "run_phase_transition",
    "__version__",
]
