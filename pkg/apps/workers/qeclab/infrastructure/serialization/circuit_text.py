"""
Plain-text circuit files.

    # circuit code=repetition-3 register=3 ancilla=2 style=syndrome-correct
    CNOT 0 3
    CCX-coherent 3 4 0 ctrl=10

One gate per line: name, sites, optional control pattern. Blank lines and other `#` lines are skipped.
"""
from __future__ import annotations

from typing import get_args

from qeclab.application.codes.base import RecoveryStyle
from qeclab.application.codes.gates import Gate
from qeclab.application.codes.recovery import RecoveryCircuit
from qeclab.domain.errors import ConfigError
from qeclab.domain.values import HilbertLayout

_HEADER = "# circuit"


def dump_circuit(circuit: RecoveryCircuit) -> str:
    lines = [
        f"{_HEADER} code={circuit.code_name} register={circuit.layout.register_qubits} "
        f"ancilla={circuit.layout.ancilla_qubits} style={circuit.style}"
    ]
    for g in circuit.gates:
        if g.name == "U":
            raise ValueError("explicit-unitary gates have no text form")
        line = " ".join([g.name, *(str(q) for q in g.sites)])
        if g.ctrl is not None:
            line += f" ctrl={g.ctrl}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _parse_header(line: str, lineno: int) -> dict[str, str]:
    fields = {}
    for token in line[len(_HEADER):].split():
        key, sep, value = token.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: malformed header field {token!r}")
        fields[key] = value
    for key in ("code", "register", "ancilla", "style"):
        if key not in fields:
            raise ConfigError(f"line {lineno}: header lacks {key}=")
    return fields


def parse_circuit(text: str) -> RecoveryCircuit:
    header = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(_HEADER):
            header = _parse_header(line, lineno)
            continue
        if line.startswith("#"):
            continue
        tokens = line.split()
        ctrl = None
        if tokens[-1].startswith("ctrl="):
            ctrl = tokens.pop()[len("ctrl="):]
        name, sites = tokens[0], tokens[1:]
        try:
            gates.append(Gate(name, tuple(int(s) for s in sites), ctrl=ctrl))
        except ValueError as e:
            raise ConfigError(f"line {lineno}: {e}") from e
    if header is None:
        raise ConfigError("circuit text has no '# circuit' header")
    if header["style"] not in get_args(RecoveryStyle):
        raise ConfigError(f"unknown recovery style {header['style']!r}")
    try:
        layout = HilbertLayout(int(header["register"]), int(header["ancilla"]))
        return RecoveryCircuit(tuple(gates), layout, header["style"], header["code"])
    except ValueError as e:
        raise ConfigError(f"invalid circuit: {e}") from e
