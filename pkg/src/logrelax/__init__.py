"""Ultra-slow (logarithmic) stress relaxation toolkit.

Mittag-Leffler evaluation on the completely monotone branch, a
log-kernel fractional operator applied through a deterministic
time-change, closed-form relaxation responses with diagnostics, and
least-squares parameter fitting.
"""

from .errors import (
    DomainError,
    GridError,
    LogrelaxError,
    NonConvergentError,
    ParseError,
    QuadratureFailure,
    ValidationError,
)
from .mlf import (
    MLQuery,
    MLResult,
    QuadratureConfig,
    Regime,
    ml_asymptotic,
    ml_eval,
    ml_series,
    ml_spectral,
    reciprocal_gamma,
    series_cutoff,
)
from .hadamard import (
    OperatorParams,
    apply_operator,
    apply_to_log_power,
    from_transformed_time,
    to_transformed_time,
)
from .models import (
    GridKind,
    GridSpec,
    RelaxationScenario,
    SampledCurve,
    asymptotic_stress,
    classical_fractional_maxwell,
    sample_curve,
    stress_relaxation,
    stress_relaxation_nu1,
)
from .analysis import (
    CMReport,
    MatchRow,
    MatchTable,
    ProbeRow,
    asymptotic_matching,
    check_complete_monotonicity,
    singular_limit_probe,
)
from .fitting import (
    Dataset,
    FitConfig,
    FitResult,
    fit_relaxation,
    load_dataset,
)

__version__ = "0.1.0"

__all__ = [
    "LogrelaxError",
    "DomainError",
    "GridError",
    "ValidationError",
    "ParseError",
    "NonConvergentError",
    "QuadratureFailure",
    "MLQuery",
    "MLResult",
    "Regime",
    "QuadratureConfig",
    "ml_series",
    "ml_spectral",
    "ml_asymptotic",
    "ml_eval",
    "reciprocal_gamma",
    "series_cutoff",
    "OperatorParams",
    "to_transformed_time",
    "from_transformed_time",
    "apply_operator",
    "apply_to_log_power",
    "RelaxationScenario",
    "GridKind",
    "GridSpec",
    "SampledCurve",
    "stress_relaxation",
    "stress_relaxation_nu1",
    "asymptotic_stress",
    "classical_fractional_maxwell",
    "sample_curve",
    "CMReport",
    "MatchRow",
    "MatchTable",
    "ProbeRow",
    "check_complete_monotonicity",
    "asymptotic_matching",
    "singular_limit_probe",
    "Dataset",
    "FitConfig",
    "FitResult",
    "load_dataset",
    "fit_relaxation",
    "__version__",
]
