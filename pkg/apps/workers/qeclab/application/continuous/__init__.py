from qeclab.application.continuous.cycle import delta_limit_distance
from qeclab.application.continuous.dyson import DysonResult, dyson_fidelity, poisson_tail, required_order
from qeclab.application.continuous.integrator import (
    IntegratorConfig,
    IntegratorMethod,
    Trajectory,
    initial_state,
    integrate_master_equation,
)
from qeclab.application.continuous.interaction import InteractionChannel, interaction_phi
from qeclab.application.continuous.propagator import PropagatorCache, hamiltonian_propagator
from qeclab.application.continuous.recovery_check import RecoveryConditionReport, check_recovery_condition

__all__ = [
    "DysonResult",
    "IntegratorConfig",
    "IntegratorMethod",
    "InteractionChannel",
    "PropagatorCache",
    "RecoveryConditionReport",
    "Trajectory",
    "check_recovery_condition",
    "delta_limit_distance",
    "dyson_fidelity",
    "hamiltonian_propagator",
    "initial_state",
    "integrate_master_equation",
    "interaction_phi",
    "poisson_tail",
    "required_order",
]
