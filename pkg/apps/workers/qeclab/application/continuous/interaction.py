from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qeclab.application.continuous.propagator import hamiltonian_propagator
from qeclab.application.noise.replacement import PHI_KRAUS, apply_phi_matrix
from qeclab.application.pulses.schedule import Schedule
from qeclab.domain.tensor import apply_local


def interaction_phi_matrix(u: np.ndarray, k: int, mat: np.ndarray, n_qubits: int) -> np.ndarray:
    """Φ_k(t) X = U† Φ_k(U X U†) U with U = U(t, 0)."""
    lab = u @ mat @ u.conj().T
    return u.conj().T @ apply_phi_matrix(lab, n_qubits, k) @ u


@dataclass(frozen=True)
class InteractionChannel:
    """Φ_k conjugated into the interaction picture, in Kraus form."""
    target_qubit: int
    time: float
    kraus_operators: tuple[np.ndarray, ...]

    def apply_matrix(self, mat: np.ndarray, n_qubits: int) -> np.ndarray:
        out = np.zeros_like(mat, dtype=complex)
        for K in self.kraus_operators:
            out += K @ mat @ K.conj().T
        return out

    def completeness_defect(self) -> float:
        s = sum(K.conj().T @ K for K in self.kraus_operators)
        return float(np.max(np.abs(s - np.eye(s.shape[0]))))


def interaction_phi(schedule: Schedule, k: int, t: float) -> InteractionChannel:
    schedule.layout.check_register_site(k)
    u = hamiltonian_propagator(schedule, 0.0, t)
    n = schedule.layout.n_qubits
    kraus = tuple(u.conj().T @ apply_local(e, (k,), u, n) for e in PHI_KRAUS)
    return InteractionChannel(k, float(t), kraus)
