"""
Cycle maps of one working period acting on register states (fresh ancillas in, ancillas traced out).
- continuous: the integrated master equation over [0, τ].
- delta: instantaneous gates at the pulse centers with exact noise in between.
The distance between them over the sample frame measures convergence to the discrete model as t0 -> 0.
"""
from __future__ import annotations

from logging import getLogger
from typing import Mapping

import numpy as np

from qeclab.application.continuous.integrator import IntegratorConfig, integrate_master_equation
from qeclab.application.discrete.engine import run_timed_circuit
from qeclab.application.noise.replacement import LindbladGenerator
from qeclab.application.pulses.schedule import Schedule, delta_limit_schedule
from qeclab.domain.entities import DensityMatrix, PureState
from qeclab.domain.tensor import append_fresh_ancillas, partial_trace_matrix, trace_norm

logger = getLogger(__name__)


def _register_part(mat: np.ndarray, schedule: Schedule) -> np.ndarray:
    layout = schedule.layout
    if not layout.ancilla_qubits:
        return mat
    return partial_trace_matrix(mat, layout.n_qubits, layout.ancilla_sites)


def continuous_cycle_output(
        schedule: Schedule,
        lindblad: LindbladGenerator,
        psi: PureState,
        config: IntegratorConfig = IntegratorConfig(),
) -> np.ndarray:
    layout = schedule.layout
    rho0 = DensityMatrix(layout, append_fresh_ancillas(psi.projector(), layout.ancilla_qubits))
    traj = integrate_master_equation(schedule, lindblad, rho0, config, psi=psi)
    return _register_part(traj.final_state.data, schedule)


def delta_cycle_output(schedule: Schedule, lindblad: LindbladGenerator, psi: PureState) -> np.ndarray:
    layout = schedule.layout
    full = append_fresh_ancillas(psi.projector(), layout.ancilla_qubits)
    out = run_timed_circuit(delta_limit_schedule(schedule), lindblad, full, schedule.tau)
    return _register_part(out, schedule)


def delta_limit_distance(
        schedule: Schedule,
        lindblad: LindbladGenerator,
        samples: Mapping[str, PureState],
        config: IntegratorConfig = IntegratorConfig(),
) -> float:
    """max over samples of ‖continuous(P_ψ) - delta(P_ψ)‖₁."""
    worst = 0.0
    for label, psi in samples.items():
        a = continuous_cycle_output(schedule, lindblad, psi, config)
        b = delta_cycle_output(schedule, lindblad, psi)
        dist = trace_norm(a - b)
        logger.debug(f"delta-limit distance [{label}] = {dist:.3e}")
        worst = max(worst, dist)
    return worst
