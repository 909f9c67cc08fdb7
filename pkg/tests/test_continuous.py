import numpy as np
import pytest

from qeclab.application.codes.factory import build_code, build_recovery
from qeclab.application.codes.recovery import RecoveryCircuit
from qeclab.application.codes.verify import verify_correction_property
from qeclab.application.continuous.cycle import continuous_cycle_output, delta_cycle_output
from qeclab.application.continuous.integrator import (
    IntegratorConfig,
    initial_state,
    integrate_master_equation,
)
from qeclab.application.continuous.interaction import interaction_phi, interaction_phi_matrix
from qeclab.application.continuous.propagator import PropagatorCache, hamiltonian_propagator
from qeclab.application.continuous.recovery_check import check_recovery_condition
from qeclab.application.noise.replacement import LindbladGenerator, register_error_map
from qeclab.application.pulses.grid import build_time_grid
from qeclab.application.pulses.schedule import compile_circuit
from qeclab.domain.entities import DensityMatrix
from qeclab.domain.errors import ConfigError, DimensionError
from qeclab.domain.tensor import trace_norm
from qeclab.domain.values import HilbertLayout


def _setup(code_name: str, style: str, t0: float, lambda_sq: float):
    code = build_code(code_name)
    R = build_recovery(code, style)
    schedule = compile_circuit(R, t0, 1.0)
    return code, schedule, LindbladGenerator(lambda_sq, schedule.layout)


def test_noiseless_fidelity_stays_one():
    code, schedule, gen = _setup("repetition-3", "syndrome-correct", 0.1, 0.0)
    psi = code.sample_frame()["+L"]
    traj = integrate_master_equation(schedule, gen, initial_state(psi, 2), psi=psi)
    np.testing.assert_allclose(traj.fidelity, 1.0, atol=1e-10)
    np.testing.assert_allclose(traj.trace, 1.0, atol=1e-12)
    np.testing.assert_allclose(traj.purity, 1.0, atol=1e-10)


def test_single_qubit_closed_form():
    code, schedule, gen = _setup("repetition-1", "decode-reencode", 0.1, 0.5)
    psi = code.logical_zero
    traj = integrate_master_equation(schedule, gen, initial_state(psi, 0), psi=psi)
    np.testing.assert_allclose(traj.fidelity, 0.5 * (1.0 + np.exp(-0.5 * traj.times)), atol=1e-12)
    assert traj.F_tau == pytest.approx(0.5 * (1.0 + np.exp(-0.5)), abs=1e-12)


def test_decode_reencode_interaction_fidelity_equals_lab_fidelity():
    code, schedule, gen = _setup("repetition-3", "decode-reencode", 0.1, 0.1)
    psi = code.sample_frame()["iL"]
    traj = integrate_master_equation(schedule, gen, initial_state(psi, 0), psi=psi)
    assert traj.lab_fidelity == pytest.approx(traj.F_tau, abs=1e-10)
    assert 0.0 < traj.E_tau < 1.0
    assert np.min(traj.min_eig) > -1e-10


def test_strang_and_fourth_order_splitting_agree():
    code, schedule, gen = _setup("repetition-3", "decode-reencode", 0.1, 0.1)
    psi = code.sample_frame()["+L"]
    # full rank start: the backward sub-steps of splitting-4 are not positivity preserving
    rho0 = DensityMatrix(schedule.layout, 0.9 * psi.projector() + 0.1 * np.eye(8) / 8)
    strang = integrate_master_equation(schedule, gen, rho0, IntegratorConfig(step_size=0.001), psi=psi)
    fourth = integrate_master_equation(
        schedule, gen, rho0, IntegratorConfig(step_size=0.001, method="splitting-4"), psi=psi
    )
    assert strang.F_tau == pytest.approx(fourth.F_tau, abs=5e-4)
    np.testing.assert_allclose(strang.trace, 1.0, atol=1e-12)


def test_rk4_matches_single_qubit_closed_form():
    code, schedule, gen = _setup("repetition-1", "decode-reencode", 0.1, 0.5)
    psi = code.logical_zero
    traj = integrate_master_equation(
        schedule, gen, initial_state(psi, 0), IntegratorConfig(method="rk4"), psi=psi
    )
    assert traj.method == "rk4"
    np.testing.assert_allclose(traj.fidelity, 0.5 * (1.0 + np.exp(-0.5 * traj.times)), atol=1e-9)


def test_keep_states():
    code, schedule, gen = _setup("repetition-2", "decode-reencode", 0.1, 0.1)
    psi = code.logical_zero
    traj = integrate_master_equation(
        schedule, gen, initial_state(psi, 0), IntegratorConfig(keep_states=True), psi=psi
    )
    assert len(traj.states) == len(traj.times)
    np.testing.assert_allclose(traj.states[-1], traj.final_state.data, atol=1e-12)


def test_integrator_config_validation():
    with pytest.raises(ConfigError):
        IntegratorConfig(method="euler")
    with pytest.raises(ConfigError):
        IntegratorConfig(step_size=-1.0)
    _, schedule, _ = _setup("repetition-3", "decode-reencode", 0.1, 0.1)
    with pytest.raises(ConfigError):
        IntegratorConfig(step_size=0.05).resolve_step(schedule)
    assert IntegratorConfig().resolve_step(schedule) == pytest.approx(0.1 / 50)


def test_integrator_rejects_mismatched_state():
    code, schedule, gen = _setup("repetition-3", "syndrome-correct", 0.1, 0.1)
    with pytest.raises(DimensionError):
        integrate_master_equation(schedule, gen, initial_state(code.logical_zero, 0))


@pytest.mark.parametrize("code_name", ["repetition-3", "perfect-5"])
def test_recovery_condition_decode_reencode(code_name):
    _, schedule, _ = _setup(code_name, "decode-reencode", 0.1, 0.1)
    report = check_recovery_condition(schedule)
    assert report.passed
    assert report.residual < 1e-8


def test_recovery_condition_fails_for_syndrome_extraction():
    _, schedule, _ = _setup("repetition-3", "syndrome-correct", 0.1, 0.1)
    report = check_recovery_condition(schedule)
    assert not report.passed
    assert report.to_dict()["passed"] is False


def test_interaction_phi_kraus_matches_direct_form(random_density):
    _, schedule, _ = _setup("repetition-3", "syndrome-correct", 0.1, 0.1)
    rho = random_density(5)
    t = 0.3
    ch = interaction_phi(schedule, 1, t)
    u = hamiltonian_propagator(schedule, 0.0, t)
    np.testing.assert_allclose(ch.apply_matrix(rho, 5), interaction_phi_matrix(u, 1, rho, 5), atol=1e-12)
    assert ch.completeness_defect() < 1e-12


def test_propagator_cache(rep3_syndrome):
    schedule = compile_circuit(rep3_syndrome, 0.1, 1.0)
    grid = build_time_grid(schedule, 0.01)
    cache = PropagatorCache.build(schedule, grid)
    assert len(cache) == len(grid)
    assert cache.unitarity_defect() < 1e-12
    np.testing.assert_allclose(cache.at(len(grid) - 1), rep3_syndrome.unitary, atol=1e-10)
    with pytest.raises(ConfigError, match="propagator cache"):
        PropagatorCache.build(schedule, grid, memory_budget_mb=0.01)


def test_delta_limit_outputs_are_close_for_narrow_pulses():
    code, schedule, gen = _setup("repetition-3", "decode-reencode", 0.025, 0.1)
    psi = code.sample_frame()["+L"]
    a = continuous_cycle_output(schedule, gen, psi)
    b = delta_cycle_output(schedule, gen, psi)
    assert np.trace(a).real == pytest.approx(1.0, abs=1e-9)
    assert trace_norm(a - b) < 0.05


def test_purity_never_grows_without_pulses(random_density):
    layout = HilbertLayout(3)
    R = RecoveryCircuit((), layout, "decode-reencode", "repetition-3")
    schedule = compile_circuit(R, 0.1, 1.0)
    assert schedule.pulses == ()
    gen = LindbladGenerator(0.5, layout)
    rho0 = DensityMatrix(layout, random_density(3))
    traj = integrate_master_equation(schedule, gen, rho0, IntegratorConfig(step_size=0.01))
    assert traj.purity[-1] < traj.purity[0]
    assert np.all(np.diff(traj.purity) <= 1e-12)


def test_continuous_fidelity_stays_below_instantaneous_recovery():
    code, schedule, gen = _setup("repetition-3", "syndrome-correct", 0.1, 0.1)
    R = build_recovery(code, "syndrome-correct")
    frame = code.sample_frame()
    continuous = [
        integrate_master_equation(schedule, gen, initial_state(psi, 2), psi=psi).F_tau
        for psi in frame.values()
    ]
    E = register_error_map(0.1, 1.0, code.layout)
    F1 = verify_correction_property(R, E, frame, code=code).fidelity_F1
    assert F1 < 1.0
    assert min(continuous) <= F1 + 1e-9
