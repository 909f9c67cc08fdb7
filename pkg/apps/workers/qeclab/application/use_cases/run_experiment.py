from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from qeclab.application.experiments.validation import ValidationReport, validate_config, validate_data
from qeclab.application.run_experiment import EXIT_CONFIG, ExperimentResult, run_experiment
from qeclab.domain.ports import ArtifactSink, PointRunner


@dataclass(frozen=True)
class RunExperimentCommand:
    config_path: Optional[str] = None
    # raw config document (presets); used when no path is given
    config_data: Optional[dict] = None
    output_dir: Optional[str] = None
    seed: Optional[int] = None


class RunExperimentUseCase:
    """
    Thin application layer:
    - Validates the command's config (file or document) with the CLI overrides applied
    - Resolves the output directory and builds the artifact sink for it
    - Delegates to the orchestrator (run_experiment) and returns its result unchanged
    """
    def __init__(
            self,
            *,
            make_sink: Callable[[Path], ArtifactSink],
            runner: PointRunner,
            default_out_dir: Optional[str] = None,
            base_dir: str = "runs",
    ) -> None:
        self.make_sink = make_sink
        self.runner = runner
        self.default_out_dir = default_out_dir
        self.base_dir = base_dir

    def validate(self, cmd: RunExperimentCommand) -> ValidationReport:
        overrides = {"seed": cmd.seed}
        if cmd.config_path is not None:
            return validate_config(cmd.config_path, overrides)
        return validate_data(cmd.config_data or {}, "<preset>", overrides)

    def resolve_output_dir(self, cmd: RunExperimentCommand, report: ValidationReport) -> Path:
        """--out, then the environment override, then the config, then runs/<name>-<hash>."""
        config = report.config
        for candidate in (cmd.output_dir, self.default_out_dir, config.output_dir):
            if candidate:
                return Path(candidate)
        return Path(self.base_dir) / f"{config.name or config.kind}-{report.config_hash}"

    async def execute(self, cmd: RunExperimentCommand) -> ExperimentResult:
        t0 = time.time()
        report = self.validate(cmd)
        if not report.ok:
            return ExperimentResult(
                ok=False,
                exit_code=EXIT_CONFIG,
                config_hash=report.config_hash,
                duration_ms=int((time.time() - t0) * 1000),
                files=[],
                flags=[],
                partial=False,
                error="config validation failed",
                errors=[i.to_dict() for i in report.issues],
            )
        out_dir = self.resolve_output_dir(cmd, report)
        return await run_experiment(
            config=report.config,
            sink=self.make_sink(out_dir),
            runner=self.runner,
            output_dir=str(out_dir),
        )
