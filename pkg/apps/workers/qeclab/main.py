"""
qeclab Entrypoint
- `run`: execute one experiment config (or preset) and write CSV/JSON artifacts + manifest.
- `validate`: full precondition report without running anything.
- `presets list|show`, `circuit`: inspect the shipped configs, recovery circuits and pulse schedules.
Exit codes: 0 ok, 2 config error, 3 numerical error.
"""
# main.py
import os

# single-threaded BLAS in this process and in every pool worker; must precede the numpy import
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import asyncio
import json
import logging
import sys
from logging import getLogger
from typing import Optional, get_args

import click

from qeclab import __version__
from qeclab.application.codes.base import DEFAULT_RECOVERY_STYLE, RecoveryStyle
from qeclab.application.codes.factory import CODE_NAMES, build_code, build_recovery
from qeclab.application.experiments.presets import PRESET_NAMES, preset_data
from qeclab.application.experiments.validation import validate_config
from qeclab.application.pulses.schedule import DEFAULT_SPEED_CONSTANT, check_speed_constraint, compile_circuit
from qeclab.application.pulses.shapes import DEFAULT_PULSE_SHAPE, PulseShapeName
from qeclab.application.run_experiment import EXIT_CONFIG, EXIT_OK, ExperimentResult
from qeclab.application.use_cases.run_experiment import RunExperimentCommand
from qeclab.domain.errors import ConfigError
from qeclab.infrastructure.di import make_run_experiment, make_runner, shutdown_runner
from qeclab.infrastructure.serialization.circuit_text import dump_circuit
from qeclab.infrastructure.serialization.schedule_json import schedule_to_dict
from qeclab.settings import Settings

logger = getLogger("qeclab")

settings = Settings()
LOG_LEVEL = settings.LOG_LEVEL
# stdout carries the machine-readable results
logging.basicConfig(
    level=getattr(logging, LOG_LEVEL, logging.INFO),
    format="%(asctime)s %(levelname).1s %(name)s: %(message)s",
    datefmt="%H:%M:%S",
    handlers=[logging.StreamHandler(sys.stderr)],
)

for noisy in ("asyncio", "concurrent.futures"):
    logging.getLogger(noisy).setLevel(settings.NOISY_LEVEL)


def _echo_json(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2, default=str))


async def _run(cmd: RunExperimentCommand, jobs: Optional[int]) -> ExperimentResult:
    runner = make_runner(settings, jobs)
    try:
        use_case = make_run_experiment(settings, runner)
        return await use_case.execute(cmd)
    finally:
        await shutdown_runner(runner)


@click.group()
@click.version_option(__version__, prog_name="qeclab")
def cli() -> None:
    """Continuous-time quantum error correction simulator."""


@cli.command()
@click.argument("config_path", required=False, type=click.Path(dir_okay=False))
@click.option("--preset", "preset", default=None, help="Run a shipped preset instead of a config file.")
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False), help="Output directory.")
@click.option("--jobs", default=None, type=click.IntRange(min=1), help="Worker processes for sweeps.")
@click.option("--seed", default=None, type=int, help="Seed for random sample states.")
@click.pass_context
def run(ctx: click.Context, config_path: Optional[str], preset: Optional[str], out_dir: Optional[str],
        jobs: Optional[int], seed: Optional[int]) -> None:
    """Run one experiment and write its artifacts."""
    if (config_path is None) == (preset is None):
        raise click.UsageError("give exactly one of CONFIG_PATH or --preset")
    if preset is not None:
        try:
            data = preset_data(preset)
        except ConfigError as e:
            _echo_json({"ok": False, "exit_code": EXIT_CONFIG, "error": str(e)})
            ctx.exit(EXIT_CONFIG)
        cmd = RunExperimentCommand(config_data=data, output_dir=out_dir, seed=seed)
    else:
        cmd = RunExperimentCommand(config_path=config_path, output_dir=out_dir, seed=seed)

    result = asyncio.run(_run(cmd, jobs))
    _echo_json(dict(result))
    ctx.exit(result.get("exit_code", EXIT_OK))


@cli.command()
@click.argument("config_path", type=click.Path(dir_okay=False))
@click.option("--seed", default=None, type=int)
@click.pass_context
def validate(ctx: click.Context, config_path: str, seed: Optional[int]) -> None:
    """Check a config against every precondition without running it."""
    report = validate_config(config_path, {"seed": seed})
    _echo_json(report.to_dict())
    ctx.exit(EXIT_OK if report.ok else EXIT_CONFIG)


@cli.group()
def presets() -> None:
    """Shipped desk-scale configs."""


@presets.command("list")
def presets_list() -> None:
    for name in PRESET_NAMES:
        click.echo(f"{name}\t{preset_data(name)['kind']}")


@presets.command("show")
@click.argument("name")
@click.pass_context
def presets_show(ctx: click.Context, name: str) -> None:
    try:
        _echo_json(preset_data(name))
    except ConfigError as e:
        click.echo(str(e), err=True)
        ctx.exit(EXIT_CONFIG)


@cli.command()
@click.argument("code", type=click.Choice(CODE_NAMES))
@click.option("--style", type=click.Choice(get_args(RecoveryStyle)), default=DEFAULT_RECOVERY_STYLE)
@click.option("--schedule", "as_schedule", is_flag=True, help="Print the compiled pulse schedule as JSON.")
@click.option("--t0", default=0.05, type=click.FloatRange(min=0, min_open=True))
@click.option("--tau", default=1.0, type=click.FloatRange(min=0, min_open=True))
@click.option("--shape", type=click.Choice(get_args(PulseShapeName)), default=DEFAULT_PULSE_SHAPE)
@click.option("--speed-constant", "C", default=DEFAULT_SPEED_CONSTANT, type=float)
@click.pass_context
def circuit(ctx: click.Context, code: str, style: str, as_schedule: bool, t0: float, tau: float,
            shape: str, C: float) -> None:
    """Print a recovery circuit, or its pulse schedule with the speed check."""
    try:
        recovery = build_recovery(build_code(code), style)
        if not as_schedule:
            click.echo(dump_circuit(recovery), nl=False)
            return
        schedule = compile_circuit(recovery, t0, tau, shape=shape)
    except (ConfigError, ValueError) as e:
        click.echo(str(e), err=True)
        ctx.exit(EXIT_CONFIG)
    _echo_json({**schedule_to_dict(schedule), "speed": check_speed_constraint(schedule, C).to_dict()})


if __name__ == "__main__":
    cli()
