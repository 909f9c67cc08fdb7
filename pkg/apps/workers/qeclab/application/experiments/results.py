from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger
from typing import Any, Sequence

logger = getLogger(__name__)

TRAJECTORY_COLUMNS: tuple[str, ...] = ("t", "fidelity", "trace", "purity", "min_eig")
SWEEP_COLUMNS: tuple[str, ...] = ("sweep_param", "F_tau", "E_tau", "E_bound", "Mq", "regime")


@dataclass(frozen=True)
class Table:
    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"table {self.name}: row of {len(row)} values for {len(self.columns)} columns")


@dataclass
class ExperimentOutput:
    """
    Accumulates what a run produces so that a failure part-way still leaves
    the finished tables and reports to be written (and flagged as partial).
    """
    kind: str
    tables: list[Table] = field(default_factory=list)
    reports: dict[str, dict] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)

    def add_table(self, name: str, columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> Table:
        table = Table(name, tuple(columns), tuple(tuple(r) for r in rows))
        self.tables.append(table)
        return table

    def add_report(self, name: str, payload: dict) -> None:
        self.reports[name] = payload

    def flag(self, message: str) -> None:
        logger.warning(f"⚠️ {message}")
        self.flags.append(message)
