"""
Discrete-time model: E′_T R_T E_{T-1} R_{T-1} ... R_1 E_0 with E_0 = E and E_k = E∘E′ for k >= 1.
- Each R_k consumes a fresh ancilla block; the used block is traced out afterwards.
- The almost-final state is the state before the last gate-noise map E′_T.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger
from typing import Sequence

import numpy as np

from qeclab.application.codes.base import Code
from qeclab.application.codes.gates import Gate
from qeclab.application.codes.recovery import RecoveryCircuit, check_recovery_layout
from qeclab.application.noise.channels import DiscreteErrorMap
from qeclab.application.noise.replacement import LindbladGenerator
from qeclab.domain.entities import PureState
from qeclab.domain.errors import DimensionError
from qeclab.domain.ports import Channel
from qeclab.domain.tensor import conjugate_local

logger = getLogger(__name__)


def _fidelity(psi: PureState, mat: np.ndarray) -> float:
    value = np.vdot(psi.amplitudes, mat @ psi.amplitudes).real
    return float(min(1.0, max(0.0, value)))


def run_uncorrected(E: Channel, T: int, psi: PureState) -> list[float]:
    """<ψ|E^t(P_ψ)|ψ> for t = 0..T."""
    if T < 0:
        raise ValueError(f"T must be non-negative, got {T}")
    n = psi.layout.n_qubits
    rho = psi.projector()
    out = [_fidelity(psi, rho)]
    for _ in range(T):
        rho = E.apply_matrix(rho, n)
        out.append(_fidelity(psi, rho))
    return out


@dataclass(frozen=True)
class CorrectionCycle:
    code: Code
    recovery: RecoveryCircuit
    error_map: DiscreteErrorMap
    gate_noise: DiscreteErrorMap | None = None

    def __post_init__(self):
        check_recovery_layout(self.code, self.recovery)
        for m in (self.error_map, self.gate_noise):
            if m is None:
                continue
            for sites in m.locations:
                if max(sites) >= self.code.n_physical:
                    raise DimensionError(f"error map location {sites} is outside the register")


@dataclass(frozen=True)
class DiscreteRun:
    T: int
    cycle: CorrectionCycle
    include_gate_noise: bool
    trajectory: tuple[float, ...]
    almost_final_fidelity: float
    final_fidelity: float
    states: tuple[np.ndarray, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if len(self.trajectory) != self.T:
            raise ValueError(f"trajectory has {len(self.trajectory)} entries for T={self.T}")
        for f in (*self.trajectory, self.almost_final_fidelity, self.final_fidelity):
            if not 0.0 <= f <= 1.0:
                raise ValueError(f"fidelity {f} outside [0, 1]")


def run_corrected(
        cycle: CorrectionCycle,
        T: int,
        psi: PureState,
        gate_noise: DiscreteErrorMap | None = None,
        *,
        keep_states: bool = False,
) -> DiscreteRun:
    """Run T correction cycles; `gate_noise` overrides the cycle's own E′."""
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    cycle.code.require_code_state(psi)
    e_gate = gate_noise if gate_noise is not None else cycle.gate_noise
    n = cycle.code.n_physical
    R = cycle.recovery

    rho = cycle.error_map.apply_matrix(psi.projector(), n)
    trajectory: list[float] = []
    states: list[np.ndarray] = []
    for k in range(1, T + 1):
        rho = R.apply_to_register(rho)
        rho = 0.5 * (rho + rho.conj().T)
        trajectory.append(_fidelity(psi, rho))
        if keep_states:
            states.append(rho.copy())
        if k < T:
            if e_gate is not None:
                rho = e_gate.apply_matrix(rho, n)
            rho = cycle.error_map.apply_matrix(rho, n)

    almost_final = trajectory[-1]
    final = _fidelity(psi, e_gate.apply_matrix(rho, n)) if e_gate is not None else almost_final
    logger.debug(f"{cycle.code.name} {R.style}: T={T} almost-final={almost_final:.10f} final={final:.10f}")
    return DiscreteRun(
        T=T,
        cycle=cycle,
        include_gate_noise=e_gate is not None,
        trajectory=tuple(trajectory),
        almost_final_fidelity=almost_final,
        final_fidelity=final,
        states=tuple(states),
    )


def run_timed_circuit(
        instants: Sequence[tuple[float, Gate]],
        generator: LindbladGenerator,
        mat: np.ndarray,
        tau: float,
) -> np.ndarray:
    """
    Instantaneous gates at fixed times with exact noise between them:
    e^{(τ - t_m)L} U_m ... U_1 e^{t_1 L} X.
    `instants` holds (time, gate) pairs in time order.
    """
    n = generator.layout.n_qubits
    out = np.asarray(mat, dtype=complex)
    now = 0.0
    for t, gate in instants:
        if t < now - 1e-12 or t > tau + 1e-12:
            raise ValueError(f"gate time {t} out of order or outside [0, {tau}]")
        out = generator.semigroup_matrix(out, max(0.0, t - now), n)
        out = conjugate_local(gate.matrix(), gate.sites, out, n)
        now = t
    return generator.semigroup_matrix(out, max(0.0, tau - now), n)


def fidelity_lower_bound(mu: float, B: float, T: int) -> float:
    """(1-μ)^T - B[1 - (1-μ)^T]; negative values are returned as-is."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu={mu} outside [0, 1]")
    if B < 1.0:
        raise ValueError(f"B={B} below 1")
    if T < 0:
        raise ValueError(f"T={T} negative")
    survive = (1.0 - mu) ** T
    bound = survive - B * (1.0 - survive)
    if bound < 0.0:
        logger.warning(f"fidelity lower bound is negative ({bound:.4g}) for mu={mu:g}, B={B:g}, T={T}")
    return bound


def required_mu(epsilon: float, B: float, T: int) -> float:
    """Accuracy μ = ε / ((B+1) T) that keeps the final error below ε."""
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon={epsilon} outside [0, 1)")
    if T < 1:
        raise ValueError(f"T={T} must be at least 1")
    return epsilon / ((B + 1.0) * T)


def required_fidelity(mu: float, B: float) -> float:
    """Per-cycle fidelity 1 - (B+1)μ demanded by a target accuracy μ."""
    return 1.0 - (B + 1.0) * mu
