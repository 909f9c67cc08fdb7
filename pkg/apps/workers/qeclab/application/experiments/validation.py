"""
Config validation without running anything.
- Parse errors carry line/column; schema errors carry the field path.
- Precondition checks compile every schedule the run would build.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from logging import getLogger
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError

from qeclab.application.codes.factory import build_code, build_recovery
from qeclab.application.continuous.dyson import series_memory_mb
from qeclab.application.experiments.config import DISCRETE_KINDS, ExperimentConfig
from qeclab.application.pulses.grid import build_time_grid
from qeclab.application.pulses.schedule import compile_circuit
from qeclab.domain.errors import ConfigError, DimensionError, ScheduleOverflowError

logger = getLogger(__name__)


@dataclass(frozen=True)
class ConfigIssue:
    loc: str
    message: str
    line: Optional[int] = None
    column: Optional[int] = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"loc": self.loc, "message": self.message}
        if self.line is not None:
            out["line"] = self.line
            out["column"] = self.column
        return out


@dataclass(frozen=True)
class ValidationReport:
    source: str
    issues: tuple[ConfigIssue, ...]
    config: Optional[ExperimentConfig] = field(default=None, compare=False, repr=False)

    @property
    def ok(self) -> bool:
        return not self.issues and self.config is not None

    @property
    def config_hash(self) -> Optional[str]:
        return self.config.config_hash() if self.config is not None else None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "status": "PASS" if self.ok else "FAIL",
            "source": self.source,
            "configHash": self.config_hash,
            "errors": [i.to_dict() for i in self.issues],
        }

    def raise_for_issues(self) -> ExperimentConfig:
        if not self.ok:
            raise ConfigError("; ".join(f"{i.loc}: {i.message}" if i.loc else i.message for i in self.issues))
        return self.config


def _loc(parts) -> str:
    return ".".join(str(p) for p in parts)


def _t0_values(config: ExperimentConfig) -> list[float]:
    if config.kind in ("t0-sweep", "delta-limit"):
        return config.t0_values
    return [config.t0]


def check_preconditions(config: ExperimentConfig) -> list[ConfigIssue]:
    """Every check a run would hit before its first numerical step."""
    issues: list[ConfigIssue] = []
    codes = config.code_values if config.kind == "M-sweep" else [config.code]
    for name in codes:
        try:
            code = build_code(name)
        except (ValueError, DimensionError) as e:
            issues.append(ConfigIssue("code", str(e)))
            continue
        if config.kind == "uncorrected":
            continue
        try:
            recovery = build_recovery(code, config.recovery_style)
        except ValueError as e:
            issues.append(ConfigIssue("recoveryStyle", str(e)))
            continue
        if config.kind in DISCRETE_KINDS:
            continue

        integrator = config.integrator.to_config()
        for t0 in _t0_values(config):
            try:
                schedule = compile_circuit(
                    recovery, t0, config.period(recovery.depth, t0), shape=config.shape, t0_min=config.speed_limit(t0)
                )
            except ScheduleOverflowError as e:
                issues.append(ConfigIssue("tau", str(e)))
                continue
            except ConfigError as e:
                issues.append(ConfigIssue("t0", f"{e} (t0 >= t0_min)"))
                continue
            try:
                grid = build_time_grid(schedule, integrator.resolve_step(schedule))
            except ConfigError as e:
                issues.append(ConfigIssue("integrator.stepSize", str(e)))
                continue
            if config.kind == "dyson-validate":
                need = series_memory_mb(len(grid), schedule.layout.total_dim)
                if need > config.memory_budget_mb:
                    issues.append(ConfigIssue(
                        "memoryBudgetMb",
                        f"Dyson series for {name} at t0={t0} needs ~{need:.0f} MB; budget {config.memory_budget_mb:.0f} MB",
                    ))
    return issues


def validate_data(data: Any, source: str = "<config>", overrides: Optional[dict] = None) -> ValidationReport:
    if not isinstance(data, dict):
        return ValidationReport(source, (ConfigIssue("", "config must be a JSON object"),))
    if overrides:
        data = {**data, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        config = ExperimentConfig.model_validate(data)
    except ValidationError as e:
        issues = tuple(ConfigIssue(_loc(err["loc"]) or "config", err["msg"]) for err in e.errors())
        return ValidationReport(source, issues)
    issues = tuple(check_preconditions(config))
    return ValidationReport(source, issues, config)


def validate_text(text: str, source: str = "<config>", overrides: Optional[dict] = None) -> ValidationReport:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        issue = ConfigIssue("", f"parse error: {e.msg}", line=e.lineno, column=e.colno)
        return ValidationReport(source, (issue,))
    return validate_data(data, source, overrides)


def validate_config(path: str | Path, overrides: Optional[dict] = None) -> ValidationReport:
    """Full precondition report for a config file; never runs a simulation."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        return ValidationReport(str(path), (ConfigIssue("path", f"cannot read config: {e}"),))
    report = validate_text(text, str(path), overrides)
    logger.debug(f"validated {path}: {'PASS' if report.ok else f'{len(report.issues)} issue(s)'}")
    return report
