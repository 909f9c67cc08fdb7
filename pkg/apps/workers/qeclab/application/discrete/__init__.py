from qeclab.application.discrete.engine import (
    CorrectionCycle,
    DiscreteRun,
    fidelity_lower_bound,
    required_fidelity,
    required_mu,
    run_corrected,
    run_timed_circuit,
    run_uncorrected,
)

__all__ = [
    "CorrectionCycle",
    "DiscreteRun",
    "fidelity_lower_bound",
    "required_fidelity",
    "required_mu",
    "run_corrected",
    "run_timed_circuit",
    "run_uncorrected",
]
