from __future__ import annotations

import logging
import time
from datetime import datetime, timezone
from typing import TypedDict

import numpy as np

from qeclab import __version__
from qeclab.application.experiments.config import ExperimentConfig
from qeclab.application.experiments.kinds import run_kind
from qeclab.application.experiments.results import ExperimentOutput
from qeclab.domain.errors import ConfigError, NumericalError
from qeclab.domain.ports import ArtifactSink, PointRunner

UTC = timezone.utc

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


# --- Result type ------------------------------------------------------------
class ExperimentResult(TypedDict, total=False):
    ok: bool
    exit_code: int
    kind: str
    config_hash: str | None
    duration_ms: int
    files: list[str]
    flags: list[str]
    partial: bool
    error: str | None
    errors: list[dict]


def _write_outputs(sink: ArtifactSink, out: ExperimentOutput, config_hash: str) -> list[str]:
    files = []
    for table in out.tables:
        files.append(sink.write_table(table.name, table.columns, table.rows, config_hash).name)
    for name, payload in out.reports.items():
        files.append(sink.write_json(name, payload, config_hash).name)
    return files


# --- Orchestrator -----------------------------------------------------------
async def run_experiment(
    *,
    config: ExperimentConfig,
    sink: ArtifactSink,
    runner: PointRunner,
    output_dir: str | None = None,
) -> ExperimentResult:
    """
    config -> kind runner -> CSV tables + JSON reports -> manifest.

    Failures never escape: a numerical failure still writes whatever finished,
    marked partial in the manifest.
    """
    t0 = time.time()
    started_at = datetime.now(UTC).isoformat()
    config_hash = config.config_hash()
    out = ExperimentOutput(config.kind)
    exit_code = EXIT_OK
    error: str | None = None

    logger.info(f"▶️ {config.kind} ({config.code}, hash {config_hash})")
    try:
        await run_kind(config, out, runner)
    except ConfigError as e:
        exit_code, error = EXIT_CONFIG, str(e)
        logger.error(f"config error: {e}")
    except (NumericalError, np.linalg.LinAlgError) as e:
        exit_code, error = EXIT_NUMERICAL, str(e)
        logger.error(f"numerical failure: {e}")
    except Exception as e:
        exit_code, error = EXIT_FAILURE, f"{type(e).__name__}: {e}"
        logger.exception("experiment failed")

    partial = exit_code != EXIT_OK and bool(out.tables or out.reports)
    files: list[str] = []
    try:
        files = _write_outputs(sink, out, config_hash)
        manifest = {
            "tool": "qeclab",
            "version": __version__,
            "kind": config.kind,
            "ok": exit_code == EXIT_OK,
            "exitCode": exit_code,
            "partial": partial,
            "error": error,
            "flags": out.flags,
            "files": files,
            "outputDir": output_dir,
            "startedAt": started_at,
            "finishedAt": datetime.now(UTC).isoformat(),
            "wallTimeSeconds": round(time.time() - t0, 3),
            "config": config.echo(),
        }
        files.append(sink.write_json("manifest", manifest, config_hash).name)
    except OSError as e:
        logger.exception("writing artifacts failed")
        exit_code = exit_code or EXIT_FAILURE
        error = error or f"cannot write artifacts: {e}"

    return _done(exit_code, t0, config, config_hash, files, out.flags, partial, error)


def _done(
    exit_code: int,
    t0: float,
    config: ExperimentConfig,
    config_hash: str,
    files: list[str],
    flags: list[str],
    partial: bool,
    error: str | None = None,
) -> ExperimentResult:
    dur = int((time.time() - t0) * 1000)
    if exit_code == EXIT_OK:
        logger.info(f"✅ {config.kind} done in {dur} ms, {len(files)} file(s), {len(flags)} flag(s)")
    return ExperimentResult(
        ok=exit_code == EXIT_OK,
        exit_code=exit_code,
        kind=config.kind,
        config_hash=config_hash,
        duration_ms=dur,
        files=files,
        flags=list(flags),
        partial=partial,
        error=error,
    )
