# apps/workers/qeclab/infrastructure/di.py
from pathlib import Path
from typing import Optional

from qeclab.application.use_cases.run_experiment import RunExperimentUseCase
from qeclab.domain.ports import ArtifactSink, PointRunner
from qeclab.infrastructure.output.file_sink import FileArtifactSink
from qeclab.infrastructure.pool.runners import ProcessPoolRunner, SerialRunner
from qeclab.settings import Settings


def make_sink(out_dir: Path) -> ArtifactSink:
    return FileArtifactSink(out_dir)

def make_runner(settings: Settings, jobs: Optional[int] = None) -> PointRunner:
    n = jobs if jobs is not None else settings.JOBS
    return ProcessPoolRunner(n) if n > 1 else SerialRunner()

def make_run_experiment(settings: Settings, runner: PointRunner) -> RunExperimentUseCase:
    return RunExperimentUseCase(make_sink=make_sink, runner=runner, default_out_dir=settings.OUT_DIR)

async def shutdown_runner(runner: PointRunner):
    await runner.close()
