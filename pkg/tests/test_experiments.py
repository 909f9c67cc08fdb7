import asyncio
import json

import numpy as np
import pytest

from qeclab.application.bounds.analysis import fit_kappa
from qeclab.application.experiments import (
    PRESET_NAMES,
    ExperimentConfig,
    preset_config,
    preset_data,
    validate_config,
    validate_data,
    validate_text,
)
from qeclab.application.experiments.kinds import SweepPoint, evaluate_sweep_point
from qeclab.application.experiments.setup import continuous_setup
from qeclab.application.run_experiment import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK
from qeclab.application.use_cases.run_experiment import RunExperimentCommand, RunExperimentUseCase
from qeclab.domain.errors import ConfigError, NumericalError
from qeclab.infrastructure.output.file_sink import FileArtifactSink, read_table
from qeclab.infrastructure.pool.runners import ProcessPoolRunner, SerialRunner


def _locs(report) -> list[str]:
    return [i.loc for i in report.issues]


def _manifest(path) -> dict:
    return json.loads((path / "manifest.json").read_text())


# ─── config and validation ───

@pytest.mark.parametrize("name", PRESET_NAMES)
def test_presets_validate(name):
    report = validate_data(preset_data(name), name)
    assert report.ok, report.to_dict()
    assert report.to_dict()["status"] == "PASS"


def test_unknown_preset():
    with pytest.raises(ConfigError, match="Unknown preset"):
        preset_data("nope")


def test_aliases_and_echo():
    config = ExperimentConfig.model_validate(
        {"kind": "discrete-cycle", "T": 3, "TGrid": [1, 2], "C": 7.0, "lambdaSq": 0.2}
    )
    assert config.T == 3
    assert config.T_grid == [1, 2]
    assert config.speed_constant == 7.0
    echo = config.echo()
    assert echo["TGrid"] == [1, 2]
    assert echo["lambdaSq"] == 0.2
    assert ExperimentConfig.model_validate(echo) == config


def test_config_hash_ignores_output_location():
    a = ExperimentConfig(kind="uncorrected", code="repetition-1")
    b = ExperimentConfig(kind="uncorrected", code="repetition-1", output_dir="/tmp/x", name="other")
    c = ExperimentConfig(kind="uncorrected", code="repetition-1", lambda_sq=0.2)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert len(a.config_hash()) == 16


def test_clock_defaults_to_tau():
    assert ExperimentConfig(kind="uncorrected", tau=2.0).clock == 2.0
    assert ExperimentConfig(kind="uncorrected", tau=2.0, t_clock=0.5).clock == 0.5


def test_back_to_back_period_follows_pulse_width(continuous_doc):
    config = ExperimentConfig.model_validate({**continuous_doc, "backToBack": True})
    setup = continuous_setup(config)
    assert setup.schedule.tau == pytest.approx(0.4)
    centers = sorted({p.center for p in setup.schedule.pulses})
    np.testing.assert_allclose(centers, [0.05, 0.15, 0.25, 0.35])
    assert config.period(4, 0.2) == pytest.approx(0.8)
    assert ExperimentConfig.model_validate(continuous_doc).period(4, 0.2) == 1.0
    # wide pulses would overflow the fixed period
    assert validate_data({**continuous_doc, "t0": 0.3, "backToBack": True}).ok


def test_pulse_below_speed_limit_is_reported(continuous_doc):
    report = validate_data({**continuous_doc, "t0": 0.05, "t0Min": 0.1})
    assert not report.ok
    assert _locs(report) == ["t0"]
    assert "t0 >= t0_min" in report.issues[0].message


def test_schedule_overflow_is_reported(continuous_doc):
    report = validate_data({**continuous_doc, "recoveryStyle": "syndrome-correct", "t0": 0.25})
    assert _locs(report) == ["tau"]
    assert "schedule overflow" in report.issues[0].message


def test_coarse_step_is_reported(continuous_doc):
    report = validate_data({**continuous_doc, "integrator": {"stepSize": 0.05}})
    assert _locs(report) == ["integrator.stepSize"]


def test_dyson_memory_budget_is_reported():
    doc = {**preset_data("repetition3-dyson-validate"), "recoveryStyle": "syndrome-correct", "memoryBudgetMb": 1.0}
    report = validate_data(doc)
    assert _locs(report) == ["memoryBudgetMb"]


def test_parse_error_carries_position():
    report = validate_text('{\n  "kind": }\n')
    assert not report.ok
    issue = report.issues[0]
    assert issue.line == 2
    assert issue.to_dict()["line"] == 2
    assert issue.message.startswith("parse error")


@pytest.mark.parametrize(
    "doc, loc, fragment",
    [
        ({"kind": "uncorrected", "bogus": 1}, "bogus", "Extra inputs"),
        ({"kind": "t0-sweep"}, "config", "t0Grid"),
        ({"kind": "M-sweep"}, "config", "codeGrid"),
        ({"kind": "delta-limit", "t0Grid": [0.1]}, "config", "at least two"),
        ({"kind": "continuous-cycle", "noise": "bit-flip", "flipProbability": 0.1}, "config", "discrete kinds"),
        ({"kind": "discrete-cycle", "noise": "bit-flip"}, "config", "flipProbability"),
        ({"kind": "uncorrected", "code": "steane-7"}, "code", "unknown code"),
        ({"kind": "uncorrected", "samples": ["2L"]}, "samples", "unknown sample"),
        ({"kind": "uncorrected", "randomSamples": 2}, "config", "seed"),
        ({"kind": "uncorrected", "lambdaSq": -1}, "lambdaSq", "greater than or equal"),
        ({"kind": "total-fidelity", "T": 1}, "config", "T >= 2"),
    ],
)
def test_schema_errors(doc, loc, fragment):
    report = validate_data(doc)
    assert not report.ok
    assert report.issues[0].loc == loc
    assert fragment in report.issues[0].message
    with pytest.raises(ConfigError):
        report.raise_for_issues()


def test_seed_override_enables_random_samples():
    report = validate_data({"kind": "uncorrected", "randomSamples": 2}, overrides={"seed": 7})
    assert report.ok
    assert report.config.seed == 7


def test_validate_config_file(tmp_path, continuous_doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(continuous_doc))
    assert validate_config(path).ok
    missing = validate_config(tmp_path / "missing.json")
    assert _locs(missing) == ["path"]


def test_recovery_style_not_available(continuous_doc):
    report = validate_data({**continuous_doc, "code": "repetition-5", "recoveryStyle": "syndrome-correct"})
    assert _locs(report) == ["recoveryStyle"]


# ─── runs ───

def test_uncorrected_preset_run(use_case, uncorrected_doc, tmp_path):
    result = asyncio.run(use_case.execute(RunExperimentCommand(config_data=uncorrected_doc)))
    assert result["ok"], result
    assert result["exit_code"] == EXIT_OK
    out = tmp_path / "runs" / f"uncorrected-{result['config_hash']}"
    assert sorted(result["files"]) == ["manifest.json", "uncorrected.csv", "uncorrected.json"]
    report = json.loads((out / "uncorrected.json").read_text())
    assert report["configHash"] == result["config_hash"]
    for entry in report["samples"].values():
        assert entry["maxDeviation"] < 1e-12
    meta, columns, rows = read_table(out / "uncorrected.csv")
    assert meta["config_hash"] == result["config_hash"]
    assert columns == ["sample", "step", "t", "fidelity"]
    assert len(rows) == 4 * 4
    manifest = _manifest(out)
    assert manifest["ok"] is True
    assert manifest["partial"] is False
    assert manifest["config"]["kind"] == "uncorrected"


def test_discrete_run_is_byte_identical(use_case, tmp_path):
    data = preset_data("repetition3-discrete")
    first = asyncio.run(use_case.execute(RunExperimentCommand(config_data=data, output_dir=str(tmp_path / "a"))))
    second = asyncio.run(use_case.execute(RunExperimentCommand(config_data=data, output_dir=str(tmp_path / "b"))))
    assert first["ok"] and second["ok"]
    a = (tmp_path / "a" / "discrete_cycle.csv").read_bytes()
    b = (tmp_path / "b" / "discrete_cycle.csv").read_bytes()
    assert a == b
    _, _, rows = read_table(tmp_path / "a" / "discrete_cycle.csv")
    assert all(r[4] == "1" for r in rows)
    report = json.loads((tmp_path / "a" / "discrete_cycle.json").read_text())
    assert set(report["bounds"]) == {"1", "5", "10", "20"}


def test_config_failure_writes_nothing(use_case, tmp_path):
    result = asyncio.run(use_case.execute(RunExperimentCommand(config_data={"kind": "t0-sweep"})))
    assert result["exit_code"] == EXIT_CONFIG
    assert result["files"] == []
    assert result["errors"][0]["loc"] == "config"
    assert not (tmp_path / "runs").exists()


def test_numerical_failure_leaves_partial_manifest(use_case, uncorrected_doc, tmp_path, monkeypatch):
    async def failing(config, out, runner):
        out.add_table("partial", ("a",), [(1,)])
        raise NumericalError("positivity violation")

    monkeypatch.setattr("qeclab.application.run_experiment.run_kind", failing)
    out_dir = tmp_path / "failed"
    result = asyncio.run(use_case.execute(RunExperimentCommand(config_data=uncorrected_doc, output_dir=str(out_dir))))
    assert result["exit_code"] == EXIT_NUMERICAL
    assert result["partial"]
    manifest = _manifest(out_dir)
    assert manifest["partial"] is True
    assert manifest["error"] == "positivity violation"
    assert manifest["files"] == ["partial.csv"]


def test_continuous_run_artifacts(use_case, continuous_doc, tmp_path):
    out_dir = tmp_path / "cont"
    result = asyncio.run(use_case.execute(RunExperimentCommand(config_data=continuous_doc, output_dir=str(out_dir))))
    assert result["ok"], result
    assert (out_dir / "trajectory_0L.csv").exists()
    assert (out_dir / "trajectory_plusL.csv").exists()
    report = json.loads((out_dir / "bound_report.json").read_text())
    assert report["recoveryCondition"]["passed"] is True
    assert report["depth"] == 4
    assert report["tMax"] == pytest.approx(100.0)
    for sample in report["samples"].values():
        assert sample["bound"]["boundHolds"] is True
        assert sample["labFidelity"] == pytest.approx(sample["F_tau"], abs=1e-10)
    _, columns, rows = read_table(out_dir / "trajectory_plusL.csv")
    assert columns == ["t", "fidelity", "trace", "purity", "min_eig"]
    assert float(rows[0][1]) == pytest.approx(1.0)


def test_output_dir_precedence(tmp_path, continuous_doc):
    use_case = RunExperimentUseCase(
        make_sink=FileArtifactSink, runner=SerialRunner(), default_out_dir=str(tmp_path / "env")
    )
    report = use_case.validate(RunExperimentCommand(config_data={**continuous_doc, "outputDir": "cfg"}))
    assert use_case.resolve_output_dir(RunExperimentCommand(output_dir="cli"), report).name == "cli"
    assert use_case.resolve_output_dir(RunExperimentCommand(), report) == tmp_path / "env"


def test_sweep_point_matches_across_runners():
    config = ExperimentConfig.model_validate({
        "kind": "M-sweep",
        "codeGrid": ["repetition-1", "repetition-2"],
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.1,
        "t0": 0.1,
        "samples": ["0L"],
    })
    points = [SweepPoint(config, "M", name, 0.1, 0.1) for name in config.code_values]

    async def both():
        pool = ProcessPoolRunner(2)
        try:
            return await SerialRunner().map(evaluate_sweep_point, points), await pool.map(evaluate_sweep_point, points)
        finally:
            await pool.close()

    serial, pooled = asyncio.run(both())
    assert [r["row"][0] for r in pooled] == [1.0, 2.0]
    for a, b in zip(serial, pooled):
        assert a["row"][1] == pytest.approx(b["row"][1], abs=1e-12)
    assert serial[0]["row"][1] == pytest.approx(0.5 * (1.0 + np.exp(-0.1)), abs=1e-12)


def test_preset_config_builds_model():
    config = preset_config("repetition3-t0-sweep")
    assert config.t0_values == [0.2, 0.1, 0.05, 0.025, 0.01]


# ─── desk-scale acceptance ───

def _run_preset(use_case, name, out_dir, **overrides):
    data = {**preset_data(name), **overrides}
    result = asyncio.run(use_case.execute(RunExperimentCommand(config_data=data, output_dir=str(out_dir))))
    assert result["ok"], result
    return result


@pytest.mark.slow
def test_delta_limit_converges(use_case, tmp_path):
    _run_preset(use_case, "repetition3-delta-limit", tmp_path)
    report = json.loads((tmp_path / "delta_limit.json").read_text())
    assert report["monotoneDecreasing"]
    assert report["empiricalOrder"] >= 0.9


@pytest.mark.slow
def test_total_fidelity_is_log_linear(use_case, tmp_path):
    _run_preset(use_case, "repetition3-total-fidelity", tmp_path)
    report = json.loads((tmp_path / "total_fidelity.json").read_text())
    for fit in report["fits"].values():
        assert fit["slope"] < 0.0
        assert fit["rSquared"] >= 0.95
    assert report["period"] == pytest.approx(0.2)


@pytest.mark.slow
def test_total_fidelity_slope_scales_with_pulse_width(use_case, tmp_path):
    slopes = []
    for t0 in (0.05, 0.2):
        out = tmp_path / f"t0-{t0}"
        _run_preset(use_case, "repetition3-total-fidelity", out, t0=t0, T=4, samples=["0L"])
        report = json.loads((out / "total_fidelity.json").read_text())
        slopes.append(report["fits"]["0L"]["slope"])
    assert 3.0 <= slopes[1] / slopes[0] <= 5.0


@pytest.mark.slow
def test_ceiling_saturates(use_case, tmp_path):
    _run_preset(use_case, "ceiling-saturation", tmp_path)
    report = json.loads((tmp_path / "lambda_sweep.json").read_text())
    last = report["points"][-1]
    assert last["samples"][last["worstSample"]]["F_tau"] <= 0.52
    _, _, rows = read_table(tmp_path / "lambda_sweep.csv")
    assert rows[-1][5] == "large"
    assert report["nonincreasingInMq"]


def test_sweep_fidelity_falls_with_mq_and_kappa_is_stable():
    config = ExperimentConfig.model_validate({
        "kind": "lambda-sweep",
        "code": "repetition-3",
        "recoveryStyle": "decode-reencode",
        "lambdaGrid": [0.04, 0.1],
        "t0": 0.05,
        "backToBack": True,
        "samples": ["0L", "+L"],
    })
    widths = (0.05, 0.1)
    rows = {
        (lam, t0): evaluate_sweep_point(SweepPoint(config, "lambda_sq", "repetition-3", t0, lam))["row"]
        for lam in config.lambda_values
        for t0 in widths
    }
    ordered = sorted(rows.values(), key=lambda r: r[4])
    assert [r[4] for r in ordered] == pytest.approx([0.006, 0.012, 0.015, 0.03])
    assert all(b[1] <= a[1] + 1e-9 for a, b in zip(ordered, ordered[1:]))

    kappas = []
    for lam in config.lambda_values:
        mq = [rows[(lam, t0)][4] for t0 in widths]
        fid = [rows[(lam, t0)][1] for t0 in widths]
        kappas.append(fit_kappa(mq, fid).kappa)
    assert kappas[0] > 0.0
    assert kappas[1] == pytest.approx(kappas[0], rel=0.2)
