from __future__ import annotations

from functools import lru_cache

from qeclab.application.codes.base import Code
from qeclab.domain.entities import PureState

MAX_REPETITION = 9


@lru_cache(maxsize=None)
def repetition_code(n: int) -> Code:
    """Bit-flip repetition code |0...0>, |1...1> on n qubits."""
    if not 1 <= n <= MAX_REPETITION:
        raise ValueError(f"repetition code length {n} outside 1..{MAX_REPETITION}")
    stabilizers = tuple("I" * i + "ZZ" + "I" * (n - i - 2) for i in range(n - 1))
    return Code(
        name=f"repetition-{n}",
        n_physical=n,
        logical_zero=PureState.from_bits("0" * n),
        logical_one=PureState.from_bits("1" * n),
        stabilizers=stabilizers,
    )
