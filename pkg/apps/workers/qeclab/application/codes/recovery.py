"""
Measurement-free recovery circuits R acting on the register and a fresh ancilla block.
- syndrome-correct: coherent syndrome extraction onto ancillas, then ancilla-controlled corrections.
- decode-reencode: W then W^-1; the noiseless register action is exactly the identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from qeclab.application.codes import perfect5
from qeclab.application.codes.base import Code, RecoveryStyle
from qeclab.application.codes.gates import Gate, is_unitary
from qeclab.domain.errors import DimensionError
from qeclab.domain.tensor import (
    append_fresh_ancillas,
    apply_local,
    conjugate_local,
    partial_trace_matrix,
)
from qeclab.domain.values import HilbertLayout


@dataclass(frozen=True)
class RecoveryCircuit:
    gates: tuple[Gate, ...]
    layout: HilbertLayout
    style: RecoveryStyle
    code_name: str = ""

    def __post_init__(self):
        gates = tuple(self.gates)
        for g in gates:
            self.layout.check_sites(g.sites)
        object.__setattr__(self, "gates", gates)

    @property
    def ancilla_block(self) -> tuple[int, ...]:
        return self.layout.ancilla_sites

    def layers(self) -> list[list[int]]:
        """ASAP layering: gate indices grouped by the earliest slot their sites allow."""
        free_at = [0] * self.layout.n_qubits
        layers: list[list[int]] = []
        for i, g in enumerate(self.gates):
            slot = max(free_at[q] for q in g.sites)
            if slot == len(layers):
                layers.append([])
            layers[slot].append(i)
            for q in g.sites:
                free_at[q] = slot + 1
        return layers

    @property
    def depth(self) -> int:
        return len(self.layers())

    @property
    def composite_gates(self) -> tuple[Gate, ...]:
        """Gates on more than two qubits; each still compiles to a single pulse."""
        return tuple(g for g in self.gates if not g.is_elementary)

    @cached_property
    def unitary(self) -> np.ndarray:
        n = self.layout.n_qubits
        u = np.eye(self.layout.total_dim, dtype=complex)
        for g in self.gates:
            u = apply_local(g.matrix(), g.sites, u, n)
        if not is_unitary(u):
            raise ValueError(f"{self.code_name} {self.style}: circuit is not unitary")
        return u

    def apply_matrix(self, mat: np.ndarray, n_qubits: int) -> np.ndarray:
        out = mat
        for g in self.gates:
            out = conjugate_local(g.matrix(), g.sites, out, n_qubits)
        return out

    def apply_to_register(self, mat: np.ndarray) -> np.ndarray:
        """Append fresh ancillas, run the circuit, trace the ancillas out."""
        n_anc = self.layout.ancilla_qubits
        full = append_fresh_ancillas(mat, n_anc)
        full = self.apply_matrix(full, self.layout.n_qubits)
        if n_anc == 0:
            return full
        return partial_trace_matrix(full, self.layout.n_qubits, self.layout.ancilla_sites)


# ─── builders ─────────────────────────────────────────────────────────────────

def repetition_syndrome_correct(code: Code) -> RecoveryCircuit:
    if code.n_physical != 3:
        raise ValueError(f"syndrome-correct recovery is only defined for repetition-3, not {code.name}")
    a0, a1 = 3, 4
    gates = (
        Gate("CNOT", (0, a0)),
        Gate("CNOT", (1, a1)),
        Gate("CNOT", (1, a0)),
        Gate("CNOT", (2, a1)),
        Gate("CCX-coherent", (a0, a1, 0), ctrl="10"),
        Gate("CCX-coherent", (a0, a1, 1), ctrl="11"),
        Gate("CCX-coherent", (a0, a1, 2), ctrl="01"),
    )
    return RecoveryCircuit(gates, HilbertLayout(3, 2), "syndrome-correct", code.name)


def repetition_decode_reencode(code: Code) -> RecoveryCircuit:
    n = code.n_physical
    decode = [Gate("CNOT", (0, j)) for j in range(1, n)]
    encode = list(reversed(decode))
    return RecoveryCircuit(tuple(decode + encode), HilbertLayout(n, 0), "decode-reencode", code.name)


def perfect5_syndrome_correct(code: Code) -> RecoveryCircuit:
    n = perfect5.N_PHYSICAL
    ancillas = tuple(range(n, n + perfect5.N_SYNDROME_BITS))
    gates: list[Gate] = []
    for a, g in zip(ancillas, perfect5.STABILIZERS):
        gates.append(Gate("H", (a,)))
        for j, p in enumerate(g):
            if p == "X":
                gates.append(Gate("CNOT", (a, j)))
            elif p == "Z":
                gates.append(Gate("CZ", (a, j)))
        gates.append(Gate("H", (a,)))
    for j in range(n):
        gates.append(Gate("SYN5", ancillas + (j,)))
    return RecoveryCircuit(
        tuple(gates), HilbertLayout(n, perfect5.N_SYNDROME_BITS), "syndrome-correct", code.name
    )


def perfect5_decode_reencode(code: Code) -> RecoveryCircuit:
    sites = tuple(range(perfect5.N_PHYSICAL))
    gates = (Gate("W5", sites), Gate("W5INV", sites))
    return RecoveryCircuit(gates, HilbertLayout(perfect5.N_PHYSICAL, 0), "decode-reencode", code.name)


def check_recovery_layout(code: Code, circuit: RecoveryCircuit) -> None:
    if circuit.layout.register_qubits != code.n_physical:
        raise DimensionError(
            f"circuit register of {circuit.layout.register_qubits} qubits does not match {code.name}"
        )
