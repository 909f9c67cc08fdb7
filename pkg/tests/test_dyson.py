import numpy as np
import pytest

from qeclab.application.codes.factory import build_code, build_recovery
from qeclab.application.continuous.dyson import (
    dyson_fidelity,
    poisson_tail,
    required_order,
    series_memory_mb,
)
from qeclab.application.continuous.integrator import (
    IntegratorConfig,
    initial_state,
    integrate_master_equation,
)
from qeclab.application.noise.replacement import LindbladGenerator
from qeclab.application.pulses.schedule import compile_circuit
from qeclab.domain.errors import ConfigError, DimensionError


def _schedule(code_name: str, style: str = "decode-reencode", t0: float = 0.1):
    code = build_code(code_name)
    return code, compile_circuit(build_recovery(code, style), t0, 1.0)


def test_poisson_tail():
    assert poisson_tail(0, 1.0) == pytest.approx(1.0 - np.exp(-1.0))
    assert poisson_tail(1, 1.0) == pytest.approx(1.0 - 2.0 * np.exp(-1.0))
    assert poisson_tail(5, 0.0) == 0.0


def test_required_order():
    assert required_order(0.0) == 0
    n = required_order(0.5, 1e-8)
    assert poisson_tail(n, 0.5) <= 1e-8 < poisson_tail(n - 1, 0.5)
    assert required_order(100.0, 1e-8, max_order=10) is None


def test_single_qubit_series_matches_closed_form():
    code, schedule = _schedule("repetition-1")
    gen = LindbladGenerator(0.5, schedule.layout)
    result = dyson_fidelity(schedule, gen, code.logical_zero, step_size=0.005, tol=1e-10)
    assert result.tail_ok
    assert result.fidelity == pytest.approx(0.5 * (1.0 + np.exp(-0.5)), abs=1e-8)
    np.testing.assert_allclose(result.curve, 0.5 * (1.0 + np.exp(-0.5 * result.times)), atol=1e-8)
    # Tr(P ρ^(n)) = (λ²t)^n / (2 n!) for n >= 1
    assert result.terms[0] == pytest.approx(1.0)
    assert result.terms[2] == pytest.approx(0.5 ** 2 / 4.0, rel=1e-6)


def test_series_at_intermediate_time():
    code, schedule = _schedule("repetition-1")
    gen = LindbladGenerator(0.5, schedule.layout)
    result = dyson_fidelity(schedule, gen, code.logical_zero, t=0.5, step_size=0.005)
    assert result.t == 0.5
    assert result.times[-1] == pytest.approx(0.5)
    assert result.fidelity == pytest.approx(0.5 * (1.0 + np.exp(-0.25)), abs=1e-8)


def test_truncated_series_reports_required_order():
    code, schedule = _schedule("repetition-1")
    gen = LindbladGenerator(0.5, schedule.layout)
    result = dyson_fidelity(schedule, gen, code.logical_zero, truncation=0)
    assert not result.tail_ok
    assert result.n_required == required_order(0.5)
    assert result.fidelity == pytest.approx(np.exp(-0.5))
    assert result.to_dict()["tailOk"] is False


def test_noiseless_series():
    code, schedule = _schedule("repetition-3")
    gen = LindbladGenerator(0.0, schedule.layout)
    result = dyson_fidelity(schedule, gen, code.sample_frame()["+L"])
    assert result.order == 0
    assert result.fidelity == pytest.approx(1.0)


def test_series_rejects_bad_inputs():
    code, schedule = _schedule("repetition-3")
    gen = LindbladGenerator(0.1, schedule.layout)
    with pytest.raises(DimensionError):
        dyson_fidelity(schedule, gen, build_code("repetition-2").logical_zero)
    with pytest.raises(ValueError):
        dyson_fidelity(schedule, gen, code.logical_zero, t=2.0)
    with pytest.raises(ValueError):
        dyson_fidelity(schedule, gen, code.logical_zero, truncation=-1)


def test_series_memory_budget():
    code, schedule = _schedule("repetition-3", "syndrome-correct")
    gen = LindbladGenerator(0.1, schedule.layout)
    assert series_memory_mb(100, 32) == pytest.approx(4 * 100 * 32 * 32 * 16 / 2 ** 20)
    with pytest.raises(ConfigError, match="Dyson series needs"):
        dyson_fidelity(schedule, gen, code.logical_zero, memory_budget_mb=1.0)


def test_series_agrees_with_integrator():
    code, schedule = _schedule("repetition-3")
    gen = LindbladGenerator(0.1, schedule.layout)
    psi = code.sample_frame()["+L"]
    series = dyson_fidelity(schedule, gen, psi)
    traj = integrate_master_equation(
        schedule, gen, initial_state(psi, 0), IntegratorConfig(step_size=0.0005), psi=psi
    )
    assert series.tail_ok
    assert series.fidelity == pytest.approx(traj.F_tau, abs=1e-6)


@pytest.mark.slow
def test_series_agrees_with_integrator_with_ancillas():
    code, schedule = _schedule("repetition-3", "syndrome-correct")
    gen = LindbladGenerator(0.05, schedule.layout)
    psi = code.logical_zero
    series = dyson_fidelity(schedule, gen, psi)
    assert series.tail_ok
    traj = integrate_master_equation(
        schedule, gen, initial_state(psi, 2), IntegratorConfig(step_size=0.0005), psi=psi
    )
    assert series.fidelity == pytest.approx(traj.F_tau, abs=1e-6)
