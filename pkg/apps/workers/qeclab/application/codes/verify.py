"""
Verifier for the error-correction property
    R E (P_ψ ⊗ P_φA) = (1 - μ) P_ψ ⊗ ρ_A + σ,   ‖σ‖₁ <= B μ
- F₁ is the worst register fidelity over the samples, μ = 1 - F₁.
- ρ_A is the ancilla marginal of the actual output; B_est = max ‖σ‖₁ / μ.
"""
from __future__ import annotations

from dataclasses import dataclass
from logging import getLogger
from typing import Mapping, Sequence

import numpy as np

from qeclab.application.codes.base import Code
from qeclab.application.codes.recovery import RecoveryCircuit
from qeclab.application.noise.channels import DiscreteErrorMap, compose
from qeclab.domain.entities import PureState
from qeclab.domain.errors import DimensionError, NumericalError
from qeclab.domain.ports import Channel
from qeclab.domain.tensor import append_fresh_ancillas, partial_trace_matrix, trace_norm

logger = getLogger(__name__)

B_FLAG_THRESHOLD = 10.0
_MU_ZERO = 1e-14


@dataclass(frozen=True)
class CorrectionReport:
    mu: float
    B_est: float
    fidelity_F1: float
    worst_sample: str = ""
    per_sample: tuple[tuple[str, float], ...] = ()
    flagged: bool = False

    def __post_init__(self):
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu={self.mu} outside [0, 1]")
        if not 0.0 <= self.fidelity_F1 <= 1.0:
            raise ValueError(f"F1={self.fidelity_F1} outside [0, 1]")

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "B_est": self.B_est,
            "F1": self.fidelity_F1,
            "worstSample": self.worst_sample,
            "perSample": {label: f for label, f in self.per_sample},
            "flagged": self.flagged,
        }


def _as_samples(psi_samples: Sequence[PureState] | Mapping[str, PureState]) -> list[tuple[str, PureState]]:
    if isinstance(psi_samples, Mapping):
        return list(psi_samples.items())
    return [(f"psi{i}", s) for i, s in enumerate(psi_samples)]


def corrected_outputs(
        R: RecoveryCircuit,
        E: Channel,
        samples: list[tuple[str, PureState]],
) -> list[tuple[str, PureState, np.ndarray]]:
    """Normalized R E (P_ψ ⊗ P_φA) for every sample."""
    n = R.layout.n_qubits
    out = []
    for label, psi in samples:
        if psi.layout.n_qubits != R.layout.register_qubits:
            raise DimensionError(f"sample {label} has {psi.layout.n_qubits} qubits, register has {R.layout.register_qubits}")
        full = append_fresh_ancillas(psi.projector(), R.layout.ancilla_qubits)
        full = R.apply_matrix(E.apply_matrix(full, n), n)
        tr = float(np.real(np.trace(full)))
        if tr <= 0.0:
            raise NumericalError(f"sample {label}: error map annihilated the state")
        out.append((label, psi, full / tr))
    return out


def _register_fidelity(psi: PureState, full: np.ndarray, R: RecoveryCircuit) -> float:
    reg = partial_trace_matrix(full, R.layout.n_qubits, R.layout.ancilla_sites) if R.layout.ancilla_qubits else full
    value = np.vdot(psi.amplitudes, reg @ psi.amplitudes).real
    return float(min(1.0, max(0.0, value)))


def _residual_norm(psi: PureState, full: np.ndarray, R: RecoveryCircuit, mu: float) -> float:
    layout = R.layout
    if layout.ancilla_qubits:
        rho_a = partial_trace_matrix(full, layout.n_qubits, layout.register_sites)
    else:
        rho_a = np.ones((1, 1), dtype=complex)
    sigma = full - (1.0 - mu) * np.kron(psi.projector(), rho_a)
    return trace_norm(sigma)


def _b_estimate(residuals: list[float], mu: float) -> float:
    if mu < _MU_ZERO:
        return 1.0
    return max(1.0, max(residuals) / mu)


def verify_correction_property(
        R: RecoveryCircuit,
        E: Channel,
        psi_samples: Sequence[PureState] | Mapping[str, PureState],
        *,
        code: Code | None = None,
        mu: float | None = None,
) -> CorrectionReport:
    """
    Measure μ, B_est and F₁ for one cycle R∘E over the sample states.
    With `code`, every sample must lie in its code space; `mu` fixes μ instead of measuring it.
    """
    samples = _as_samples(psi_samples)
    if not samples:
        raise ValueError("verify_correction_property: no sample states")
    if code is not None:
        for _, psi in samples:
            code.require_code_state(psi)

    outputs = corrected_outputs(R, E, samples)
    fidelities = [(label, _register_fidelity(psi, full, R)) for label, psi, full in outputs]
    worst_label, f1 = min(fidelities, key=lambda item: item[1])
    mu_eff = float(min(1.0, max(0.0, 1.0 - f1))) if mu is None else float(mu)

    residuals = [_residual_norm(psi, full, R, mu_eff) for _, psi, full in outputs]
    b_est = _b_estimate(residuals, mu_eff)
    flagged = b_est > B_FLAG_THRESHOLD
    if flagged:
        logger.warning(f"B_est={b_est:.3g} exceeds {B_FLAG_THRESHOLD:g} (mu={mu_eff:.3e}, worst={worst_label})")

    return CorrectionReport(
        mu=mu_eff,
        B_est=b_est,
        fidelity_F1=f1,
        worst_sample=worst_label,
        per_sample=tuple(fidelities),
        flagged=flagged,
    )


def certify_cycle(
        R: RecoveryCircuit,
        E: DiscreteErrorMap,
        E_gate: DiscreteErrorMap | None,
        psi_samples: Sequence[PureState] | Mapping[str, PureState],
        *,
        code: Code | None = None,
) -> CorrectionReport:
    """
    Common (μ, B) for the first-step map E and the later-step map E∘E′.
    Without gate noise both maps coincide.
    """
    maps = [E] if E_gate is None or not E_gate.elements else [E, compose(E, E_gate)]
    measured = [verify_correction_property(R, m, psi_samples, code=code) for m in maps]
    if len(measured) == 1:
        return measured[0]
    worst = max(measured, key=lambda r: r.mu)
    mu = worst.mu
    fixed = [verify_correction_property(R, m, psi_samples, code=code, mu=mu) for m in maps]
    b_est = max(r.B_est for r in fixed)
    return CorrectionReport(
        mu=mu,
        B_est=b_est,
        fidelity_F1=1.0 - mu,
        worst_sample=worst.worst_sample,
        per_sample=worst.per_sample,
        flagged=b_est > B_FLAG_THRESHOLD,
    )


@dataclass(frozen=True)
class ReadoutResult:
    bit: int
    confidence: float
    tie: bool
    leaked: bool
    code_weight: float


def logical_readout(rho_register: np.ndarray, code: Code) -> ReadoutResult:
    """Most likely logical bit from the code-space populations of a register state."""
    rho = np.asarray(getattr(rho_register, "data", rho_register))
    if rho.shape != (code.layout.total_dim,) * 2:
        raise DimensionError(f"logical_readout: state of shape {rho.shape} does not fit {code.name}")
    p0 = float(np.vdot(code.logical_zero.amplitudes, rho @ code.logical_zero.amplitudes).real)
    p1 = float(np.vdot(code.logical_one.amplitudes, rho @ code.logical_one.amplitudes).real)
    weight = p0 + p1
    tie = abs(p0 - p1) <= 1e-12
    bit = 1 if (p1 > p0 and not tie) else 0
    confidence = 0.5 if weight <= 0.0 else max(p0, p1) / weight
    leaked = weight < 0.5
    if leaked:
        logger.info(f"logical_readout: code-space weight {weight:.3g} < 0.5 (leaked)")
    return ReadoutResult(bit=bit, confidence=confidence, tie=tie, leaked=leaked, code_weight=weight)
