"""Energy estimates for semi-discrete wave equations with variable speed.

Tools for lattice wave fields, time-dependent propagation-speed profiles,
two-sided energy certificates built from zone partitions and symbol
diagonalization, and weighted energy functionals for ultradifferentiable
initial data.
"""

from .errors import (
    ConfigError,
    DerivativeBudgetExhausted,
    EscalationFailed,
    NumericalError,
    QuadratureError,
    ScenarioError,
    SdwaveError,
    StepBudgetExceeded,
    StepSizeUnderflow,
    ZoneConstantTooSmall,
)
from .jets import Jet
from .lattice import (
    LatticeField,
    ThetaGrid,
    delta,
    difference,
    discrete_laplacian,
    dtft,
    dtft_on_grid,
    parseval_quadrature,
    torus_grid,
    xi_norm_of_theta,
    xi_of_theta,
)
from .powerlog import PowerLog
from .profiles import (
    HypothesisReport,
    SpeedProfile,
    build_example1,
    build_example2,
    constant_profile,
    gec_case,
    lambda_applicable,
    sup_fit,
    verify_hypotheses,
)
from .solver import (
    EnergyTrace,
    energy_density,
    integrate_mode,
    integrate_modes,
    sample_schedule,
    simulate,
    simulate_spectral,
    total_energy,
)
from .diagonalization import (
    CertificateSet,
    DiagChain,
    ModeCertificate,
    ZonePartition,
    build_chain,
    certify_modes,
    diag_step,
    eigen_residual,
    first_order_system,
    growth_weight_log,
    level1_system,
    make_partition,
    norm_equivalence_bounds,
    verify_symbol_class,
    weight_modulus,
    zone_boundary,
)
from .gevrey import (
    GateResult,
    GevreyData,
    LogConvexSequence,
    associated_function,
    boundedness_gate,
    build_gevrey_data,
    decay_check,
    domination_constant,
    growth_ratio,
    log_associated_function,
    moment_check,
    weighted_initial_energy,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "SdwaveError",
    "ConfigError",
    "ScenarioError",
    "NumericalError",
    "StepSizeUnderflow",
    "StepBudgetExceeded",
    "ZoneConstantTooSmall",
    "EscalationFailed",
    "DerivativeBudgetExhausted",
    "QuadratureError",
    "Jet",
    "PowerLog",
    "LatticeField",
    "ThetaGrid",
    "delta",
    "difference",
    "discrete_laplacian",
    "dtft",
    "dtft_on_grid",
    "torus_grid",
    "parseval_quadrature",
    "xi_of_theta",
    "xi_norm_of_theta",
    "SpeedProfile",
    "constant_profile",
    "build_example1",
    "build_example2",
    "HypothesisReport",
    "verify_hypotheses",
    "gec_case",
    "lambda_applicable",
    "sup_fit",
    "integrate_mode",
    "integrate_modes",
    "energy_density",
    "total_energy",
    "EnergyTrace",
    "sample_schedule",
    "simulate",
    "simulate_spectral",
    "ZonePartition",
    "make_partition",
    "zone_boundary",
    "level1_system",
    "first_order_system",
    "diag_step",
    "build_chain",
    "DiagChain",
    "eigen_residual",
    "norm_equivalence_bounds",
    "verify_symbol_class",
    "weight_modulus",
    "growth_weight_log",
    "ModeCertificate",
    "CertificateSet",
    "certify_modes",
    "LogConvexSequence",
    "associated_function",
    "log_associated_function",
    "domination_constant",
    "growth_ratio",
    "weighted_initial_energy",
    "moment_check",
    "decay_check",
    "GevreyData",
    "build_gevrey_data",
    "GateResult",
    "boundedness_gate",
]
