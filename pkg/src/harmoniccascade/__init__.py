"""Cascaded intracavity harmonic generation: steady states, linearized
output spectra, and tripartite correlation criteria.

Typical flow: validate a SystemParams, find its steady state, build the
drift/diffusion pair, sweep output spectra over frequency, and evaluate the
correlation criteria on each; the stochastic module provides an independent
ensemble oracle for the first two stages.
"""

from .model import (
    FieldState,
    NonHermitianResidue,
    NonPositiveRate,
    QuadCovariance,
    SystemParams,
    validate_params,
)
from .semiclassical import (
    InsufficientData,
    IntegrationFailure,
    NoThresholdInRange,
    NotStationary,
    PulsingDiagnosis,
    SteadyStateResult,
    ThresholdResult,
    TrajectoryTail,
    algebraic_steady_state,
    detect_pulsing,
    find_steady_state,
    pulsing_threshold,
    require_steady_state,
    semiclassical_derivative,
)
from .linearized import (
    DriftDiffusion,
    SpectrumResult,
    build_diffusion,
    build_drift,
    compute_spectrum,
    default_omega_grid,
    intracavity_spectrum,
    lyapunov_covariance,
    output_quad_spectrum,
    spectrum_grid,
    stability_eigenvalues,
)
from .correlations import (
    CorrelationReport,
    DegenerateVariance,
    GridSummary,
    classify,
    evaluate_grid,
    evaluate_report,
    obr_inferred,
    obr_product,
    summarize_grid,
    vlf_pair,
    vlf_triple,
)
from .stochastic import (
    EnsembleMoments,
    ExcessiveDivergence,
    NonFiniteError,
    make_rng,
    run_ensemble,
    step_trajectory,
)

__version__ = "0.1.0"

# Built-in parameter presets used throughout the docs, demos and CLI.
REGIME_PRESETS = {
    1: SystemParams(kappa1=5e-3, kappa2=2e-2, epsilon=105.0,
                    gamma1=1.0, gamma2=0.5, gamma3=0.5),
    2: SystemParams(kappa1=1e-2, kappa2=5e-3, epsilon=105.0,
                    gamma1=1.0, gamma2=2.0, gamma3=0.25),
}

__all__ = [
    "SystemParams", "FieldState", "QuadCovariance", "validate_params",
    "NonPositiveRate", "NonHermitianResidue",
    "SteadyStateResult", "PulsingDiagnosis", "ThresholdResult",
    "TrajectoryTail", "NotStationary", "IntegrationFailure",
    "InsufficientData", "NoThresholdInRange",
    "semiclassical_derivative", "find_steady_state",
    "require_steady_state", "algebraic_steady_state", "detect_pulsing",
    "pulsing_threshold",
    "DriftDiffusion", "SpectrumResult", "build_drift", "build_diffusion",
    "stability_eigenvalues", "intracavity_spectrum", "output_quad_spectrum",
    "compute_spectrum", "spectrum_grid", "lyapunov_covariance",
    "default_omega_grid",
    "CorrelationReport", "GridSummary", "DegenerateVariance", "classify",
    "evaluate_report", "evaluate_grid", "summarize_grid",
    "vlf_pair", "vlf_triple", "obr_inferred", "obr_product",
    "EnsembleMoments", "ExcessiveDivergence", "NonFiniteError",
    "make_rng", "run_ensemble", "step_trajectory",
    "REGIME_PRESETS", "__version__",
]
