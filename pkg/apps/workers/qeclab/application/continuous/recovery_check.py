from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger

import numpy as np
from scipy.linalg import polar

from qeclab.application.continuous.propagator import hamiltonian_propagator
from qeclab.application.pulses.schedule import Schedule
from qeclab.domain.tensor import operator_norm
from qeclab.settings import DEFAULT_TOLERANCES

logger = getLogger(__name__)


@dataclass(frozen=True)
class RecoveryConditionReport:
    residual: float
    phase: float
    passed: bool
    ancilla_unitary: np.ndarray = field(compare=False, repr=False)

    def to_dict(self) -> dict:
        return {"residual": self.residual, "phase": self.phase, "passed": self.passed}


def check_recovery_condition(schedule: Schedule, tol: float = DEFAULT_TOLERANCES.recovery_residual) -> RecoveryConditionReport:
    """
    Distance of U(τ, 0) from the factorized form e^{iφ} 1_reg ⊗ V.
    V is the unitary polar factor of Tr_reg(U) / 2^M; φ is the best global phase.
    """
    layout = schedule.layout
    u = hamiltonian_propagator(schedule, 0.0, schedule.tau)
    dr, da = layout.register_dim, 2 ** layout.ancilla_qubits
    blocks = u.reshape(dr, da, dr, da)
    v0 = np.einsum("iaib->ab", blocks) / dr
    v, _ = polar(v0)
    factored = np.kron(np.eye(dr), v)
    phase = float(np.angle(np.vdot(factored, u)))
    residual = operator_norm(u - np.exp(1j * phase) * factored)
    passed = residual <= tol
    logger.debug(f"recovery condition residual {residual:.3e} ({'PASS' if passed else 'FAIL'})")
    return RecoveryConditionReport(residual, phase, passed, v)
