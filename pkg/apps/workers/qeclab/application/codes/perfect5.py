"""
Five-qubit perfect code.
- Stabilizer generators XZZXI, IXZZX, XIXZZ, ZXIXZ; logical X = XXXXX, logical Z = ZZZZZ.
- The 15 weight-one Paulis have distinct non-zero syndromes, so E_s |b_L> over
  (b, s) is an orthonormal basis of the 32-dimensional register space.
- Syndrome bit i is 1 when the error anticommutes with generator i; bit 0 is
  the most significant.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from qeclab.application.codes.base import Code
from qeclab.application.codes.paulis import PAULI_BY_LETTER, anticommutes, pauli_string, single_qubit_errors
from qeclab.domain.entities import PureState
from qeclab.domain.values import HilbertLayout

NAME = "perfect-5"
N_PHYSICAL = 5
STABILIZERS: tuple[str, ...] = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")
N_SYNDROME_BITS = len(STABILIZERS)


def syndrome_of(pauli: str) -> int:
    s = 0
    for g in STABILIZERS:
        s = (s << 1) | int(anticommutes(pauli, g))
    return s


@lru_cache(maxsize=1)
def correction_table() -> dict[int, str]:
    """syndrome -> weight <= 1 Pauli string producing it."""
    table = {0: "I" * N_PHYSICAL}
    for e in single_qubit_errors(N_PHYSICAL):
        s = syndrome_of(e)
        if s in table:
            raise AssertionError(f"syndrome collision for {e}")
        table[s] = e
    return table


def correction_on_qubit(syndrome: int, j: int) -> np.ndarray:
    """Single-qubit factor on data qubit j of the correction for `syndrome`."""
    return PAULI_BY_LETTER[correction_table()[syndrome][j]]


@lru_cache(maxsize=1)
def perfect_five_code() -> Code:
    layout = HilbertLayout(N_PHYSICAL)
    d = layout.total_dim
    proj = np.eye(d, dtype=complex)
    for g in STABILIZERS:
        proj = proj @ (np.eye(d) + pauli_string(g)) / 2.0
    zero = proj[:, 0]
    zero = zero / np.linalg.norm(zero)
    one = pauli_string("X" * N_PHYSICAL) @ zero
    return Code(NAME, N_PHYSICAL, PureState(layout, zero), PureState(layout, one), STABILIZERS)


@lru_cache(maxsize=1)
def decoder_unitary() -> np.ndarray:
    """W = Σ_{b,s} |b>|s> <b_L| E_s†; maps the code space onto (bare qubit) ⊗ |0000>."""
    code = perfect_five_code()
    d = 2 ** N_PHYSICAL
    w = np.zeros((d, d), dtype=complex)
    for s, e in correction_table().items():
        es = pauli_string(e)
        for b, logical in enumerate((code.logical_zero, code.logical_one)):
            row = (b << N_SYNDROME_BITS) | s
            w[row, :] = (es @ logical.amplitudes).conj()
    w.setflags(write=False)
    return w


def syndrome_controlled_correction(j: int) -> np.ndarray:
    """Σ_s |s><s| ⊗ P_j(s) on (4 syndrome ancillas, data qubit j)."""
    blocks = [correction_on_qubit(s, j) for s in range(2 ** N_SYNDROME_BITS)]
    out = np.zeros((2 ** (N_SYNDROME_BITS + 1),) * 2, dtype=complex)
    for s, p in enumerate(blocks):
        out[2 * s:2 * s + 2, 2 * s:2 * s + 2] = p
    return out
