"""
Replacement noise.
- Φ_k ρ = ½ Tr_k(ρ) ⊗ 1_k, in partial-trace form and in Kraus form.
- L ρ = λ² Σ_k (Φ_k ρ - ρ) over register qubits; ancillas are noiseless.
- e^{tL_k} = e^{-λ²t} Id + (1 - e^{-λ²t}) Φ_k, and e^{tL} is the product over register qubits.
"""
from __future__ import annotations

from dataclasses import dataclass
from logging import getLogger

import numpy as np

from qeclab.application.noise.channels import DiscreteErrorMap, LocalChannel
from qeclab.domain.entities import DensityMatrix
from qeclab.domain.errors import DimensionError
from qeclab.domain.tensor import embed
from qeclab.domain.values import HilbertLayout

logger = getLogger(__name__)

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _unit(mu: int, nu: int) -> np.ndarray:
    e = np.zeros((2, 2), dtype=complex)
    e[mu, nu] = 1.0
    return e


# (1/√2)|μ><ν| for μ, ν ∈ {0, 1}
PHI_KRAUS: tuple[np.ndarray, ...] = tuple(
    _unit(mu, nu) / np.sqrt(2.0) for mu in (0, 1) for nu in (0, 1)
)


def apply_phi_matrix(mat: np.ndarray, n_qubits: int, k: int) -> np.ndarray:
    """½ Tr_k(X) ⊗ 1_k for any 2^n x 2^n matrix X."""
    if k < 0 or k >= n_qubits:
        raise DimensionError(f"qubit {k} out of range for {n_qubits} qubits")
    a = 2 ** k
    b = 2 ** (n_qubits - k - 1)
    t = np.asarray(mat).reshape(a, 2, b, a, 2, b)
    half = 0.5 * (t[:, 0, :, :, 0, :] + t[:, 1, :, :, 1, :])
    out = np.zeros_like(t, dtype=complex)
    out[:, 0, :, :, 0, :] = half
    out[:, 1, :, :, 1, :] = half
    return out.reshape(mat.shape)


def apply_phi(rho: DensityMatrix, k: int) -> DensityMatrix:
    k = rho.layout.check_register_site(k)
    return DensityMatrix(rho.layout, apply_phi_matrix(rho.data, rho.layout.n_qubits, k))


def mixing_weight(lambda_sq: float, t: float) -> float:
    """Weight 1 - e^{-λ²t} on Φ_k in e^{tL_k}."""
    if lambda_sq < 0 or t < 0:
        raise ValueError(f"rate and time must be non-negative (lambda_sq={lambda_sq}, t={t})")
    return float(-np.expm1(-lambda_sq * t))


def mixed_replacement_channel(w: float, k: int) -> LocalChannel:
    """(1-w) Id + w Φ_k as a local Kraus channel on site k."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"mixing weight {w} outside [0, 1]")
    ops = [np.sqrt(1.0 - w) * _I2] if w < 1.0 else []
    ops += [np.sqrt(w) * e for e in PHI_KRAUS] if w > 0.0 else []
    return LocalChannel(tuple(ops), (k,))


@dataclass(frozen=True)
class ReplacementChannel:
    target_qubit: int
    layout: HilbertLayout

    def __post_init__(self):
        self.layout.check_register_site(self.target_qubit)

    @property
    def local(self) -> LocalChannel:
        return LocalChannel(PHI_KRAUS, (self.target_qubit,))

    @property
    def kraus_operators(self) -> list[np.ndarray]:
        """The four Kraus operators embedded at the target qubit."""
        return [embed(e, (self.target_qubit,), self.layout) for e in PHI_KRAUS]

    def apply_matrix(self, mat: np.ndarray, n_qubits: int) -> np.ndarray:
        return apply_phi_matrix(mat, n_qubits, self.target_qubit)

    def apply_kraus(self, rho: DensityMatrix) -> np.ndarray:
        return self.local.apply_matrix(rho.data, rho.layout.n_qubits)


def kraus_phi(k: int, layout: HilbertLayout) -> ReplacementChannel:
    return ReplacementChannel(k, layout)


@dataclass(frozen=True)
class LindbladGenerator:
    lambda_sq: float
    layout: HilbertLayout

    def __post_init__(self):
        if self.lambda_sq < 0:
            raise ValueError(f"lambda_sq must be non-negative, got {self.lambda_sq}")

    @property
    def n_noisy(self) -> int:
        return self.layout.register_qubits

    def apply_matrix(self, mat: np.ndarray, n_qubits: int) -> np.ndarray:
        out = np.zeros_like(mat, dtype=complex)
        if self.lambda_sq == 0.0:
            return out
        for k in self.layout.register_sites:
            out += apply_phi_matrix(mat, n_qubits, k) - mat
        return self.lambda_sq * out

    def apply_lindblad(self, rho: DensityMatrix) -> np.ndarray:
        """λ² Σ_k (Φ_k ρ - ρ); traceless and Hermitian."""
        return self.apply_matrix(rho.data, rho.layout.n_qubits)

    def semigroup_matrix(self, mat: np.ndarray, t: float, n_qubits: int | None = None) -> np.ndarray:
        """e^{tL} X, exact."""
        n = self.layout.n_qubits if n_qubits is None else n_qubits
        w = mixing_weight(self.lambda_sq, t)
        if w == 0.0:
            return np.array(mat, dtype=complex, copy=True)
        out = np.asarray(mat, dtype=complex)
        for k in self.layout.register_sites:
            out = (1.0 - w) * out + w * apply_phi_matrix(out, n, k)
        return out

    def semigroup(self, t: float) -> DiscreteErrorMap:
        return register_error_map(self.lambda_sq, t, self.layout)


def discrete_error_from_time(lambda_sq: float, t_clock: float, k: int) -> DiscreteErrorMap:
    w = mixing_weight(lambda_sq, t_clock)
    if w == 0.0:
        return DiscreteErrorMap((), 0.0)
    return DiscreteErrorMap((mixed_replacement_channel(w, k),))


def register_error_map(lambda_sq: float, t_clock: float, layout: HilbertLayout) -> DiscreteErrorMap:
    """e^{t_clock L} on every register qubit, one elementary map per location."""
    w = mixing_weight(lambda_sq, t_clock)
    if w == 0.0:
        return DiscreteErrorMap((), 0.0)
    elements = tuple(mixed_replacement_channel(w, k) for k in layout.register_sites)
    logger.debug(f"register error map: M={layout.register_qubits} w={w:.6g}")
    return DiscreteErrorMap(elements)


def bit_flip_map(w: float, layout: HilbertLayout) -> DiscreteErrorMap:
    """Independent X flips with probability w on every register qubit."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"flip probability {w} outside [0, 1]")
    if w == 0.0:
        return DiscreteErrorMap((), 0.0)
    elements = tuple(
        LocalChannel((np.sqrt(1.0 - w) * _I2, np.sqrt(w) * _X), (k,)) for k in layout.register_sites
    )
    return DiscreteErrorMap(elements)
