from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qeclab.domain.errors import DimensionError, NumericalError
from qeclab.domain.values import HilbertLayout
from qeclab.settings import DEFAULT_TOLERANCES


def _frozen_copy(arr, dtype=complex) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


def _check_square(data: np.ndarray, layout: HilbertLayout, what: str) -> None:
    d = layout.total_dim
    if data.shape != (d, d):
        raise DimensionError(f"{what}: expected shape {(d, d)}, got {data.shape}")


@dataclass(frozen=True)
class HermitianOperator:
    layout: HilbertLayout
    data: np.ndarray

    def __post_init__(self):
        data = _frozen_copy(self.data)
        _check_square(data, self.layout, "HermitianOperator")
        if not np.allclose(data, data.conj().T, atol=DEFAULT_TOLERANCES.hermiticity, rtol=0.0):
            raise ValueError("HermitianOperator: matrix is not Hermitian")
        object.__setattr__(self, "data", data)

    @classmethod
    def zero(cls, layout: HilbertLayout) -> HermitianOperator:
        return cls(layout, np.zeros((layout.total_dim, layout.total_dim), dtype=complex))


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive, unit-trace operator on a qubit Hilbert space."""
    layout: HilbertLayout
    data: np.ndarray

    def __post_init__(self):
        tol = DEFAULT_TOLERANCES
        data = _frozen_copy(self.data)
        _check_square(data, self.layout, "DensityMatrix")
        if not np.allclose(data, data.conj().T, atol=tol.hermiticity, rtol=0.0):
            raise ValueError("DensityMatrix: not Hermitian")
        tr = np.trace(data)
        if abs(tr - 1.0) > tol.trace:
            raise ValueError(f"DensityMatrix: trace {tr.real:.3e} != 1")
        try:
            lowest = float(np.linalg.eigvalsh(data)[0])
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"DensityMatrix: eigensolver failed: {e}") from e
        if lowest < -tol.positivity:
            raise ValueError(f"DensityMatrix: negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "data", data)

    @classmethod
    def maximally_mixed(cls, layout: HilbertLayout) -> DensityMatrix:
        d = layout.total_dim
        return cls(layout, np.eye(d, dtype=complex) / d)

    def purity(self) -> float:
        return float(np.real(np.vdot(self.data, self.data)))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.data)[0])


@dataclass(frozen=True)
class PureState:
    layout: HilbertLayout
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_copy(np.ravel(self.amplitudes))
        if amps.shape != (self.layout.total_dim,):
            raise DimensionError(
                f"PureState: expected {self.layout.total_dim} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.real(np.vdot(amps, amps)))
        if abs(norm - 1.0) > DEFAULT_TOLERANCES.normalization:
            raise ValueError(f"PureState: squared norm {norm!r} != 1")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis(cls, layout: HilbertLayout, index: int = 0) -> PureState:
        amps = np.zeros(layout.total_dim, dtype=complex)
        amps[index] = 1.0
        return cls(layout, amps)

    @classmethod
    def from_bits(cls, bits: str) -> PureState:
        """|b0 b1 ...> with qubit 0 as the leftmost character."""
        layout = HilbertLayout(len(bits))
        return cls.basis(layout, int(bits, 2) if bits else 0)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.layout, self.projector())

    def with_ancillas(self, count: int) -> PureState:
        """Append a fresh |0...0> ancilla block."""
        if count == 0:
            return self
        fresh = np.zeros(2 ** count, dtype=complex)
        fresh[0] = 1.0
        return PureState(
            HilbertLayout(self.layout.register_qubits, self.layout.ancilla_qubits + count),
            np.kron(self.amplitudes, fresh),
        )
