import asyncio

import pytest

from qeclab.domain.ports import ArtifactSink, PointRunner
from qeclab.infrastructure.di import make_run_experiment, make_runner, make_sink
from qeclab.infrastructure.pool.runners import ProcessPoolRunner, SerialRunner
from qeclab.settings import DEFAULT_TOLERANCES, Settings


def test_serial_runner_keeps_order():
    assert asyncio.run(SerialRunner().map(abs, [-3, 1, -2])) == [3, 1, 2]


def test_process_pool_runner_keeps_order():
    async def go():
        runner = ProcessPoolRunner(2)
        try:
            return await runner.map(abs, [-5, 4, -3, 2, -1])
        finally:
            await runner.close()

    assert asyncio.run(go()) == [5, 4, 3, 2, 1]


def test_process_pool_runner_single_item_stays_in_process():
    runner = ProcessPoolRunner(4)
    assert asyncio.run(runner.map(abs, [-1])) == [1]
    assert runner._executor is None
    asyncio.run(runner.close())


def test_process_pool_runner_rejects_zero_jobs():
    with pytest.raises(ValueError):
        ProcessPoolRunner(0)


def test_make_runner_picks_by_job_count():
    settings = Settings(JOBS=1)
    assert isinstance(make_runner(settings), SerialRunner)
    pool = make_runner(settings, jobs=3)
    assert isinstance(pool, ProcessPoolRunner)
    assert pool.jobs == 3
    assert isinstance(pool, PointRunner)


def test_make_run_experiment_uses_out_dir_override(tmp_path):
    settings = Settings(OUT_DIR=str(tmp_path))
    use_case = make_run_experiment(settings, SerialRunner())
    assert use_case.default_out_dir == str(tmp_path)
    assert isinstance(make_sink(tmp_path), ArtifactSink)


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv("QECLAB_JOBS", "4")
    monkeypatch.setenv("QECLAB_TOLERANCES__POSITIVITY", "1e-8")
    settings = Settings()
    assert settings.JOBS == 4
    assert settings.TOLERANCES.positivity == 1e-8
    assert DEFAULT_TOLERANCES.positivity == 1e-10
    assert DEFAULT_TOLERANCES.max_dim == 4096
