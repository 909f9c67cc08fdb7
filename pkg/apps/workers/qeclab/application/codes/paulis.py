from __future__ import annotations

from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)

PAULI_BY_LETTER: dict[str, np.ndarray] = {"I": I2, "X": X, "Y": Y, "Z": Z}

for _m in (I2, X, Y, Z, H):
    _m.setflags(write=False)


def pauli_string(letters: str) -> np.ndarray:
    """Dense matrix of a Pauli string, leftmost letter on qubit 0."""
    try:
        return reduce(np.kron, (PAULI_BY_LETTER[c] for c in letters), np.eye(1, dtype=complex))
    except KeyError as e:
        raise ValueError(f"not a Pauli string: {letters!r}") from e


def anticommutes(a: str, b: str) -> bool:
    """True when the two Pauli strings anticommute."""
    if len(a) != len(b):
        raise ValueError("Pauli strings of different length")
    clashes = sum(1 for p, q in zip(a, b) if p != "I" and q != "I" and p != q)
    return clashes % 2 == 1


def single_qubit_errors(n: int) -> list[str]:
    """All 3n weight-one Pauli strings, ordered by qubit then X, Y, Z."""
    out = []
    for k in range(n):
        for p in "XYZ":
            out.append("I" * k + p + "I" * (n - k - 1))
    return out
