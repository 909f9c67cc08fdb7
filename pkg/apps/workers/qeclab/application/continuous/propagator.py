"""
Noiseless propagators U(t, s) of a pulse schedule.
- Built from exact local pulse factors; no time stepping.
- PropagatorCache stores U(t_i, 0) on a grid and is read-only after construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from logging import getLogger
from typing import Iterator

import numpy as np

from qeclab.application.pulses.grid import TimeGrid
from qeclab.application.pulses.schedule import Schedule, check_time
from qeclab.domain.errors import ConfigError
from qeclab.domain.tensor import apply_local

logger = getLogger(__name__)

DEFAULT_MEMORY_BUDGET_MB = 512.0


def apply_flow(factors: list[tuple[np.ndarray, tuple[int, ...]]], mat: np.ndarray, n_qubits: int) -> np.ndarray:
    """Left-multiply by the product of local factors (first factor applied first)."""
    out = mat
    for op, sites in factors:
        out = apply_local(op, sites, out, n_qubits)
    return out


def conjugate_flow(factors: list[tuple[np.ndarray, tuple[int, ...]]], mat: np.ndarray, n_qubits: int) -> np.ndarray:
    """U X U† for U given as local factors."""
    left = apply_flow(factors, mat, n_qubits)
    return apply_flow(factors, left.conj().T, n_qubits).conj().T


def hamiltonian_propagator(schedule: Schedule, s: float, t: float) -> np.ndarray:
    """U(t, s); U(s, t) = U(t, s)^-1."""
    check_time(schedule, s)
    check_time(schedule, t)
    d = schedule.layout.total_dim
    return apply_flow(schedule.local_flow(s, t), np.eye(d, dtype=complex), schedule.layout.n_qubits)


def iter_propagators(schedule: Schedule, times) -> Iterator[np.ndarray]:
    """U(t_i, 0) for increasing t_i, advancing step by step."""
    n = schedule.layout.n_qubits
    u = np.eye(schedule.layout.total_dim, dtype=complex)
    prev = 0.0
    for t in times:
        t = float(t)
        if t < prev:
            raise ValueError("iter_propagators needs non-decreasing times")
        u = apply_flow(schedule.local_flow(prev, t), u, n)
        prev = t
        yield u


@dataclass(frozen=True)
class PropagatorCache:
    times: np.ndarray
    unitaries: np.ndarray

    @classmethod
    def build(
            cls,
            schedule: Schedule,
            grid: TimeGrid,
            *,
            memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB,
    ) -> PropagatorCache:
        d = schedule.layout.total_dim
        need_mb = len(grid) * d * d * 16 / 2 ** 20
        if need_mb > memory_budget_mb:
            raise ConfigError(
                f"propagator cache needs {need_mb:.0f} MB for {len(grid)} points at dimension {d} "
                f"(budget {memory_budget_mb:.0f} MB)"
            )
        us = np.empty((len(grid), d, d), dtype=complex)
        for i, u in enumerate(iter_propagators(schedule, grid.points)):
            us[i] = u
        us.setflags(write=False)
        logger.debug(f"propagator cache: {len(grid)} points, dim {d}, {need_mb:.1f} MB")
        return cls(grid.points, us)

    def __len__(self) -> int:
        return len(self.times)

    def at(self, i: int) -> np.ndarray:
        return self.unitaries[i]

    def unitarity_defect(self) -> float:
        eye = np.eye(self.unitaries.shape[1])
        return float(max(np.max(np.abs(u.conj().T @ u - eye)) for u in self.unitaries))
