from __future__ import annotations

from dataclasses import dataclass

from qeclab.domain.errors import DimensionError
from qeclab.settings import DEFAULT_TOLERANCES


@dataclass(frozen=True)
class HilbertLayout:
    """Qubit bookkeeping for a register of M qubits followed by an ancilla block.

    Register qubits are indexed 0..M-1 and ancillas M..M+|A|-1.
    Qubit 0 is the most significant bit of a basis index.
    """
    register_qubits: int
    ancilla_qubits: int = 0

    def __post_init__(self):
        if self.register_qubits < 0 or self.ancilla_qubits < 0:
            raise DimensionError("qubit counts must be non-negative")
        if self.n_qubits > DEFAULT_TOLERANCES.max_qubits:
            raise DimensionError(
                f"{self.n_qubits} qubits exceed the dense limit of {DEFAULT_TOLERANCES.max_qubits}"
            )

    @property
    def n_qubits(self) -> int:
        return self.register_qubits + self.ancilla_qubits

    @property
    def total_dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def register_dim(self) -> int:
        return 2 ** self.register_qubits

    @property
    def register_sites(self) -> tuple[int, ...]:
        return tuple(range(self.register_qubits))

    @property
    def ancilla_sites(self) -> tuple[int, ...]:
        return tuple(range(self.register_qubits, self.n_qubits))

    def register_only(self) -> HilbertLayout:
        return HilbertLayout(self.register_qubits, 0)

    def with_ancillas(self, count: int) -> HilbertLayout:
        return HilbertLayout(self.register_qubits, count)

    def check_sites(self, sites: tuple[int, ...] | list[int]) -> tuple[int, ...]:
        s = tuple(int(q) for q in sites)
        if len(set(s)) != len(s):
            raise DimensionError(f"duplicate site in {s}")
        for q in s:
            if q < 0 or q >= self.n_qubits:
                raise DimensionError(f"site {q} out of range for {self.n_qubits} qubits")
        return s

    def check_register_site(self, k: int) -> int:
        if k < 0 or k >= self.register_qubits:
            raise DimensionError(f"qubit {k} is not a register qubit (M={self.register_qubits})")
        return int(k)
