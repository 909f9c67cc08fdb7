from __future__ import annotations

from pathlib import Path
from typing import Any, Callable, Protocol, Sequence, TypeVar, runtime_checkable

import numpy as np

from qeclab.domain.entities import DensityMatrix

T = TypeVar("T")
R = TypeVar("R")


@runtime_checkable
class Channel(Protocol):
    def apply_matrix(self, mat: np.ndarray, n_qubits: int) -> np.ndarray:
        """
        Apply the map to a 2^n x 2^n matrix whose first qubits carry the sites the map acts on.
        Implementations must not mutate `mat`.
        """
        ...


@runtime_checkable
class PointRunner(Protocol):
    async def map(self, fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
        """
        Evaluate `fn` on every item, possibly in worker processes.
        Results come back in the order of `items`; `fn` must be a picklable top-level function.
        """
        ...

    async def close(self) -> None:
        """
        Release worker processes. Called once when the experiment is done.
        """
        ...


@runtime_checkable
class ArtifactSink(Protocol):
    def write_table(self, name: str, columns: Sequence[str], rows: Sequence[Sequence[Any]], config_hash: str) -> Path:
        """
        Write one CSV data file carrying the schema version and the config hash in its header.
        Returns the path written.
        """
        ...

    def write_json(self, name: str, payload: dict, config_hash: str) -> Path:
        """
        Write one JSON document with `configHash` embedded at the top level.
        """
        ...


def apply_channel(channel: Channel, rho: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(rho.layout, channel.apply_matrix(rho.data, rho.layout.n_qubits))
