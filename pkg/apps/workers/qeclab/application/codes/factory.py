from typing import Callable, Final, Mapping

from qeclab.application.codes.base import DEFAULT_RECOVERY_STYLE, Code, RecoveryStyle
from qeclab.application.codes.perfect5 import perfect_five_code
from qeclab.application.codes.recovery import (
    RecoveryCircuit,
    perfect5_decode_reencode,
    perfect5_syndrome_correct,
    repetition_decode_reencode,
    repetition_syndrome_correct,
)
from qeclab.application.codes.repetition import MAX_REPETITION, repetition_code

# supported recovery builders per code family
_RECOVERY_BY_KEY: Final[Mapping[tuple[str, RecoveryStyle], Callable[[Code], RecoveryCircuit]]] = {
    ("repetition", "syndrome-correct"): repetition_syndrome_correct,
    ("repetition", "decode-reencode"): repetition_decode_reencode,
    ("perfect", "syndrome-correct"): perfect5_syndrome_correct,
    ("perfect", "decode-reencode"): perfect5_decode_reencode,
}

CODE_NAMES: Final[tuple[str, ...]] = tuple(
    [f"repetition-{n}" for n in range(1, MAX_REPETITION + 1)] + ["perfect-5"]
)


def _family(name: str) -> str:
    return name.split("-", 1)[0]


def build_code(name: str) -> Code:
    """Return a code by name: `repetition-n` (n = 1..9) or `perfect-5`."""
    if name == "perfect-5":
        return perfect_five_code()
    family, _, size = name.partition("-")
    if family == "repetition" and size.isdigit():
        return repetition_code(int(size))
    raise ValueError(f"Unsupported code: {name}")


def build_recovery(code: Code, style: RecoveryStyle = DEFAULT_RECOVERY_STYLE) -> RecoveryCircuit:
    builder = _RECOVERY_BY_KEY.get((_family(code.name), style))
    if builder is None:
        raise ValueError(f"Unsupported code/style combination: {code.name} / {style}")
    return builder(code)
