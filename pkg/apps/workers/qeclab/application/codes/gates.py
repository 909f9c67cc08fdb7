"""
Named gates of recovery circuits.
- Elementary: X, Z, H on one site; CNOT, CZ on (control, target).
- Composite: CCX-coherent (controls..., target) with a control-value pattern,
  SYN5 (4 syndrome ancillas, data qubit), W5 / W5INV on the five code qubits.
- "U" carries an explicit unitary and has no text form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Final, Mapping

import numpy as np

from qeclab.application.codes import perfect5
from qeclab.application.codes.paulis import H, X, Z
from qeclab.domain.errors import DimensionError
from qeclab.settings import DEFAULT_TOLERANCES


@dataclass(frozen=True)
class Gate:
    name: str
    sites: tuple[int, ...]
    ctrl: str | None = None
    unitary: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        sites = tuple(int(q) for q in self.sites)
        object.__setattr__(self, "sites", sites)
        if len(set(sites)) != len(sites):
            raise DimensionError(f"{self.name}: duplicate site in {sites}")
        if self.name == "U":
            if self.unitary is None:
                raise ValueError("U gate needs an explicit unitary")
            u = np.array(self.unitary, dtype=complex, copy=True)
            if u.shape != (2 ** len(sites),) * 2:
                raise DimensionError(f"U: matrix {u.shape} does not act on {len(sites)} sites")
            u.setflags(write=False)
            object.__setattr__(self, "unitary", u)
        elif self.name not in _MATRIX_BY_NAME:
            raise ValueError(f"Unsupported gate: {self.name}")
        arity = _ARITY.get(self.name)
        if arity is not None and len(sites) != arity:
            raise DimensionError(f"{self.name} acts on {arity} sites, got {len(sites)}")
        if self.ctrl is not None:
            if self.name != "CCX-coherent":
                raise ValueError(f"{self.name} takes no control pattern")
            if len(self.ctrl) != len(sites) - 1 or set(self.ctrl) - {"0", "1"}:
                raise ValueError(f"bad control pattern {self.ctrl!r} for {len(sites) - 1} controls")
        if self.name == "CCX-coherent" and len(sites) < 2:
            raise DimensionError("CCX-coherent needs at least one control")
        if self.name == "SYN5" and sites[-1] >= perfect5.N_PHYSICAL:
            raise DimensionError(f"SYN5 data site {sites[-1]} is not a code qubit")

    def matrix(self) -> np.ndarray:
        if self.name == "U":
            return self.unitary
        return _MATRIX_BY_NAME[self.name](self)

    @property
    def is_elementary(self) -> bool:
        return len(self.sites) <= 2


def _cnot(_: Gate) -> np.ndarray:
    return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def _cz(_: Gate) -> np.ndarray:
    return np.diag([1, 1, 1, -1]).astype(complex)


def _controlled_x(g: Gate) -> np.ndarray:
    """X on the last site when the other sites equal the control pattern."""
    n_ctrl = len(g.sites) - 1
    pattern = int(g.ctrl if g.ctrl is not None else "1" * n_ctrl, 2)
    d = 2 ** len(g.sites)
    u = np.eye(d, dtype=complex)
    lo, hi = 2 * pattern, 2 * pattern + 1
    u[[lo, hi], :] = u[[hi, lo], :]
    return u


_MATRIX_BY_NAME: Final[Mapping[str, Callable[[Gate], np.ndarray]]] = {
    "X": lambda _: X,
    "Z": lambda _: Z,
    "H": lambda _: H,
    "CNOT": _cnot,
    "CZ": _cz,
    "CCX-coherent": _controlled_x,
    "SYN5": lambda g: perfect5.syndrome_controlled_correction(g.sites[-1]),
    "W5": lambda _: perfect5.decoder_unitary(),
    "W5INV": lambda _: perfect5.decoder_unitary().conj().T,
}

_ARITY: Final[Mapping[str, int]] = {
    "X": 1, "Z": 1, "H": 1, "CNOT": 2, "CZ": 2,
    "SYN5": perfect5.N_SYNDROME_BITS + 1,
    "W5": perfect5.N_PHYSICAL, "W5INV": perfect5.N_PHYSICAL,
}


def is_unitary(u: np.ndarray, tol: float = DEFAULT_TOLERANCES.unitarity) -> bool:
    u = np.asarray(u)
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=tol, rtol=0.0))
