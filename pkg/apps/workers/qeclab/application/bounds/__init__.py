from qeclab.application.bounds.analysis import (
    CeilingResult,
    DerivativeReport,
    KappaFit,
    LogLinearFit,
    OdeReport,
    ProtectionVerdict,
    boundary_values,
    classify_regime,
    derivative_bound_check,
    direct_force,
    empirical_order,
    error_lower_bound,
    fidelity_ceiling,
    fit_kappa,
    fit_log_fidelity,
    protection_verdict,
    t_max_estimate,
    total_fidelity_model,
    verify_error_ode,
    volume,
    x_of_t,
    x_samples,
)
from qeclab.application.bounds.report import BoundReport, build_bound_report

__all__ = [
    "BoundReport",
    "CeilingResult",
    "DerivativeReport",
    "KappaFit",
    "LogLinearFit",
    "OdeReport",
    "ProtectionVerdict",
    "boundary_values",
    "build_bound_report",
    "classify_regime",
    "derivative_bound_check",
    "direct_force",
    "empirical_order",
    "error_lower_bound",
    "fidelity_ceiling",
    "fit_kappa",
    "fit_log_fidelity",
    "protection_verdict",
    "t_max_estimate",
    "total_fidelity_model",
    "verify_error_ode",
    "volume",
    "x_of_t",
    "x_samples",
]
