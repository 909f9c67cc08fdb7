"""
Stabilizer-style codes on an M-qubit register.
- A code is the 2-dimensional span of |0_L> and |1_L>.
- Sample frame for verification: |0_L>, |1_L>, |+_L>, |i_L>.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from qeclab.application.codes.paulis import pauli_string
from qeclab.domain.entities import PureState
from qeclab.domain.errors import CodeSpaceError
from qeclab.settings import DEFAULT_TOLERANCES

RecoveryStyle = Literal["syndrome-correct", "decode-reencode"]

DEFAULT_RECOVERY_STYLE: RecoveryStyle = "syndrome-correct"

SAMPLE_LABELS: tuple[str, ...] = ("0L", "1L", "+L", "iL")


@dataclass(frozen=True)
class Code:
    name: str
    n_physical: int
    logical_zero: PureState
    logical_one: PureState
    stabilizers: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for s in (self.logical_zero, self.logical_one):
            if s.layout.register_qubits != self.n_physical or s.layout.ancilla_qubits:
                raise CodeSpaceError(f"{self.name}: logical state does not live on {self.n_physical} register qubits")
        overlap = abs(np.vdot(self.logical_zero.amplitudes, self.logical_one.amplitudes))
        if overlap > DEFAULT_TOLERANCES.hermiticity:
            raise CodeSpaceError(f"{self.name}: logical states overlap ({overlap:.2e})")
        for g in self.stabilizers:
            op = pauli_string(g)
            for s in (self.logical_zero, self.logical_one):
                if not np.allclose(op @ s.amplitudes, s.amplitudes, atol=1e-10):
                    raise CodeSpaceError(f"{self.name}: logical state is not stabilized by {g}")

    @property
    def layout(self):
        return self.logical_zero.layout

    def projector(self) -> np.ndarray:
        return self.logical_zero.projector() + self.logical_one.projector()

    def encode(self, alpha: complex, beta: complex) -> PureState:
        return encode(self, alpha, beta)

    def code_overlap(self, psi: PureState) -> float:
        """<psi|Π|psi> for the code projector Π."""
        a = np.vdot(self.logical_zero.amplitudes, psi.amplitudes)
        b = np.vdot(self.logical_one.amplitudes, psi.amplitudes)
        return float(abs(a) ** 2 + abs(b) ** 2)

    def require_code_state(self, psi: PureState) -> None:
        if psi.layout.total_dim != self.layout.total_dim:
            raise CodeSpaceError(f"{self.name}: sample state has dimension {psi.layout.total_dim}")
        w = self.code_overlap(psi)
        if w < 1.0 - DEFAULT_TOLERANCES.code_overlap:
            raise CodeSpaceError(f"{self.name}: sample state is outside the code space (overlap {w:.12f})")

    def sample_frame(self) -> dict[str, PureState]:
        r = 1.0 / np.sqrt(2.0)
        return {
            "0L": self.encode(1.0, 0.0),
            "1L": self.encode(0.0, 1.0),
            "+L": self.encode(r, r),
            "iL": self.encode(r, 1j * r),
        }


def encode(code: Code, alpha: complex, beta: complex) -> PureState:
    norm = abs(alpha) ** 2 + abs(beta) ** 2
    if abs(norm - 1.0) > DEFAULT_TOLERANCES.normalization:
        raise ValueError(f"encode: |alpha|^2 + |beta|^2 = {norm!r} != 1")
    amps = alpha * code.logical_zero.amplitudes + beta * code.logical_one.amplitudes
    return PureState(code.layout, amps)
