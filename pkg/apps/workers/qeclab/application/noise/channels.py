"""
Kraus-form channels.
- LocalChannel: one elementary map on a few sites.
- DiscreteErrorMap: a product of elementary maps with the bound p on their deviation from identity.
Channels are applied as Kraus sums on dense matrices; superoperator matrices are never built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from qeclab.domain.errors import DimensionError
from qeclab.domain.tensor import conjugate_local, trace_norm
from qeclab.settings import DEFAULT_TOLERANCES


def _freeze(op) -> np.ndarray:
    arr = np.array(op, dtype=complex, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LocalChannel:
    kraus: tuple[np.ndarray, ...]
    sites: tuple[int, ...]

    def __post_init__(self):
        sites = tuple(int(q) for q in self.sites)
        if not sites or len(set(sites)) != len(sites):
            raise DimensionError(f"LocalChannel: bad sites {sites}")
        d = 2 ** len(sites)
        ops = tuple(_freeze(k) for k in self.kraus)
        if not ops:
            raise ValueError("LocalChannel: at least one Kraus operator is required")
        for k in ops:
            if k.shape != (d, d):
                raise DimensionError(f"LocalChannel: Kraus operator {k.shape} does not act on {len(sites)} qubits")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "kraus", ops)

    @property
    def dim(self) -> int:
        return 2 ** len(self.sites)

    def completeness_defect(self) -> float:
        s = sum(k.conj().T @ k for k in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def is_trace_preserving(self, tol: float = DEFAULT_TOLERANCES.cptp) -> bool:
        return self.completeness_defect() <= tol

    def apply_matrix(self, mat: np.ndarray, n_qubits: int) -> np.ndarray:
        out = np.zeros_like(mat, dtype=complex)
        for k in self.kraus:
            out += conjugate_local(k, self.sites, mat, n_qubits)
        return out

    def choi(self) -> np.ndarray:
        """Unit-trace Choi matrix Σ_K |K>><<K| / d on the channel's own sites."""
        d = self.dim
        j = np.zeros((d * d, d * d), dtype=complex)
        for k in self.kraus:
            v = k.T.reshape(-1) / np.sqrt(d)
            j += np.outer(v, v.conj())
        return j

    def shifted(self, offset: int) -> LocalChannel:
        return LocalChannel(self.kraus, tuple(q + offset for q in self.sites))


def _identity_choi(d: int) -> np.ndarray:
    omega = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return np.outer(omega, omega.conj())


def element_deviation(channel: LocalChannel) -> float:
    """Trace-norm distance between the normalized Choi matrices of the channel and the identity."""
    return trace_norm(channel.choi() - _identity_choi(channel.dim))


@dataclass(frozen=True)
class DiscreteErrorMap:
    """
    CPTP error map E = Π_α E^(α) composed of elementary maps at 1-2 qubit locations.
    `deviation_bound` is the p with ‖E^(α) - I‖ <= p for every element; when omitted it is measured.
    """
    elements: tuple[LocalChannel, ...] = ()
    deviation_bound: float | None = None

    def __post_init__(self):
        elements = tuple(self.elements)
        for el in elements:
            if not el.is_trace_preserving():
                raise ValueError(
                    f"DiscreteErrorMap: element on {el.sites} is not trace preserving "
                    f"(defect {el.completeness_defect():.2e})"
                )
        measured = max((element_deviation(el) for el in elements), default=0.0)
        p = measured if self.deviation_bound is None else float(self.deviation_bound)
        if p < measured - 1e-12:
            raise ValueError(f"DiscreteErrorMap: bound p={p} below measured deviation {measured}")
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "deviation_bound", p)

    @property
    def kraus_operators(self) -> list[tuple[np.ndarray, ...]]:
        return [el.kraus for el in self.elements]

    @property
    def locations(self) -> list[tuple[int, ...]]:
        return [el.sites for el in self.elements]

    def element_deviations(self) -> list[float]:
        return [element_deviation(el) for el in self.elements]

    def apply_matrix(self, mat: np.ndarray, n_qubits: int) -> np.ndarray:
        out = mat
        for el in self.elements:
            out = el.apply_matrix(out, n_qubits)
        return out


def identity_map() -> DiscreteErrorMap:
    return DiscreteErrorMap((), 0.0)


def compose(*maps: DiscreteErrorMap) -> DiscreteErrorMap:
    """compose(A, B) applies B first, then A."""
    elements: list[LocalChannel] = []
    for m in reversed(maps):
        elements.extend(m.elements)
    return DiscreteErrorMap(tuple(elements))


def deviation_from_identity(channel: DiscreteErrorMap | LocalChannel | Sequence[LocalChannel]) -> float:
    """
    Choi-proxy deviation of a map from the identity.
    For a product of elementary maps the per-element proxies are summed (triangle inequality),
    so the value bounds the map as a whole.
    """
    if isinstance(channel, LocalChannel):
        return element_deviation(channel)
    elements = channel.elements if isinstance(channel, DiscreteErrorMap) else tuple(channel)
    return float(sum(element_deviation(el) for el in elements))
