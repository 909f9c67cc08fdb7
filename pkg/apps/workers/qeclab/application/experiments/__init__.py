from qeclab.application.experiments.config import ExperimentConfig, ExperimentKind, IntegratorSettings
from qeclab.application.experiments.kinds import run_kind
from qeclab.application.experiments.presets import PRESET_NAMES, preset_config, preset_data
from qeclab.application.experiments.results import SWEEP_COLUMNS, TRAJECTORY_COLUMNS, ExperimentOutput, Table
from qeclab.application.experiments.validation import (
    ConfigIssue,
    ValidationReport,
    check_preconditions,
    validate_config,
    validate_data,
    validate_text,
)

__all__ = [
    "PRESET_NAMES",
    "SWEEP_COLUMNS",
    "TRAJECTORY_COLUMNS",
    "ConfigIssue",
    "ExperimentConfig",
    "ExperimentKind",
    "ExperimentOutput",
    "IntegratorSettings",
    "Table",
    "ValidationReport",
    "check_preconditions",
    "preset_config",
    "preset_data",
    "run_kind",
    "validate_config",
    "validate_data",
    "validate_text",
]
