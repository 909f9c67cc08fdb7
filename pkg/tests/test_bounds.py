import numpy as np
import pytest

from qeclab.application.bounds.analysis import (
    classify_regime,
    derivative_bound_check,
    direct_force,
    empirical_order,
    error_lower_bound,
    fidelity_ceiling,
    fit_kappa,
    fit_log_fidelity,
    protection_verdict,
    t_max_estimate,
    total_fidelity_model,
    verify_error_ode,
    volume,
    x_of_t,
    x_samples,
)
from qeclab.application.bounds.report import build_bound_report
from qeclab.application.codes.factory import build_code, build_recovery
from qeclab.application.continuous.integrator import (
    IntegratorConfig,
    initial_state,
    integrate_master_equation,
)
from qeclab.application.noise.replacement import LindbladGenerator
from qeclab.application.pulses.schedule import compile_circuit
from qeclab.domain.errors import ConfigError


@pytest.fixture
def rep3_cycle():
    """Decode-reencode on rep-3 with |+L>, integrated with states kept."""
    code = build_code("repetition-3")
    schedule = compile_circuit(build_recovery(code, "decode-reencode"), 0.1, 1.0)
    gen = LindbladGenerator(0.1, schedule.layout)
    psi = code.sample_frame()["+L"]
    traj = integrate_master_equation(
        schedule, gen, initial_state(psi, 0), IntegratorConfig(keep_states=True), psi=psi
    )
    return schedule, gen, psi, traj


# ─── x(t) ───

def test_x_is_one_half_for_product_states(rep3_syndrome):
    schedule = compile_circuit(rep3_syndrome, 0.1, 1.0)
    assert x_of_t(schedule, build_code("repetition-3").logical_zero, 0.0) == pytest.approx(0.5)
    single = build_code("repetition-1")
    one = compile_circuit(build_recovery(single, "decode-reencode"), 0.1, 1.0)
    assert x_of_t(one, single.logical_zero, 0.5) == pytest.approx(0.5)


def test_x_follows_decoding(rep3_cycle):
    schedule, _, psi, _ = rep3_cycle
    # GHZ-like at the ends, a product state once decoded
    assert x_of_t(schedule, psi, 0.0) == pytest.approx(0.75)
    assert x_of_t(schedule, psi, 0.5) == pytest.approx(0.5)
    assert x_of_t(schedule, psi, 1.0) == pytest.approx(0.75)


def test_x_samples_stay_in_range(rep3_cycle):
    schedule, _, psi, traj = rep3_cycle
    x = x_samples(schedule, psi, traj.times)
    assert x.shape == traj.times.shape
    assert np.all(x >= 0.5 - 1e-9)
    assert np.all(x <= 1.0)


def test_direct_force_dominates_x(rep3_cycle):
    schedule, _, psi, traj = rep3_cycle
    X = direct_force(schedule, psi, traj.times, traj.states)
    x = x_samples(schedule, psi, traj.times)
    assert X[0] == pytest.approx(0.75)
    assert np.all(X >= x - 1e-9)
    with pytest.raises(ValueError):
        direct_force(schedule, psi, traj.times, traj.states[:-1])


# ─── error bound ───

def test_error_lower_bound_constant_x():
    times = np.linspace(0.0, 1.0, 101)
    x = np.full_like(times, 0.5)
    assert error_lower_bound(times, x, 0.1, 3) == pytest.approx(0.5 * (1.0 - np.exp(-0.3)), abs=1e-10)
    assert error_lower_bound(times, x, 0.0, 3) == 0.0
    with pytest.raises(ConfigError):
        error_lower_bound(times, x, 0.1, 3, t0=0.05)
    with pytest.raises(ValueError):
        error_lower_bound(times, x[:-1], 0.1, 3)


def test_error_lower_bound_holds(rep3_cycle):
    schedule, gen, psi, traj = rep3_cycle
    x = x_samples(schedule, psi, traj.times)
    lower = error_lower_bound(traj.times, x, gen.lambda_sq, 3, t0=0.1)
    assert 0.0 < lower <= traj.E_tau + 1e-9


def test_error_ode_on_exact_solution():
    rate, c = 0.3, 0.6
    times = np.linspace(0.0, 1.0, 201)
    F = 1.0 - c * (1.0 - np.exp(-rate * times))
    ok = verify_error_ode(times, F, np.full_like(times, c - 0.1), 0.1, 3)
    assert ok.passed
    assert ok.min_X == pytest.approx(c, abs=1e-5)
    bad = verify_error_ode(times, F, np.full_like(times, c + 0.1), 0.1, 3)
    assert not bad.passed
    assert "falls below" in bad.advice
    assert verify_error_ode(times, F, F, 0.0, 3).passed


def test_derivative_bound_check():
    times = np.linspace(0.0, 1.0, 101)
    x = 0.5 + 50.0 * times
    assert not derivative_bound_check(times, x, 0.1, 1.0).passed
    report = derivative_bound_check(times, x, 0.1, 2 * np.pi)
    assert report.passed
    assert report.max_slope == pytest.approx(50.0)
    assert report.limit == pytest.approx(8 * np.pi / 0.1)
    with pytest.raises(ConfigError):
        derivative_bound_check(times, x, 0.001, 1.0)


def test_bound_report(rep3_cycle):
    schedule, gen, psi, traj = rep3_cycle
    report = build_bound_report(schedule, gen, psi, traj, t0=0.1, C=2 * np.pi)
    assert report.bound_holds
    assert report.boundary_values == pytest.approx((0.75, 0.75))
    assert report.q == pytest.approx(0.01)
    assert report.Mq == pytest.approx(0.03)
    assert report.regime == "small"
    doc = report.to_dict(include_samples=False)
    assert "xSamples" not in doc
    assert doc["boundHolds"] is True
    assert doc["inputs"]["M"] == 3


# ─── ceilings and global estimates ───

def test_fidelity_ceiling_regimes():
    small = fidelity_ceiling(5, 0.01)
    assert small.regime == "small"
    assert small.ceiling == pytest.approx(0.95)
    assert fidelity_ceiling(5, 0.01, kappa=2.0).ceiling == pytest.approx(0.9)
    assert fidelity_ceiling(1, 0.2).ceiling == pytest.approx(0.8)
    assert fidelity_ceiling(1, 1.0).ceiling == 0.5
    large = fidelity_ceiling(10, 2.0)
    assert large.regime == "large"
    assert large.ceiling == 0.5
    assert classify_regime(0.5) == "crossover"
    with pytest.raises(ValueError):
        fidelity_ceiling(0, 0.1)
    with pytest.raises(ValueError):
        fidelity_ceiling(3, -0.1)


def test_fit_kappa_ignores_points_outside_small_regime():
    mq = [0.01, 0.02, 0.05, 0.5]
    F = [1.0 - 2.0 * m for m in mq[:3]] + [0.6]
    fit = fit_kappa(mq, F)
    assert fit.kappa == pytest.approx(2.0)
    assert fit.n_points == 3
    assert fit.rms_residual < 1e-12
    with pytest.raises(ValueError):
        fit_kappa([0.5, 1.0], [0.6, 0.5])


def test_t_max_estimate():
    assert t_max_estimate(1.0, 0.01) == pytest.approx(100.0)
    assert t_max_estimate(1.0, 1e-5) == pytest.approx(1e5)
    with pytest.raises(ValueError):
        t_max_estimate(0.0, 0.1)


def test_total_fidelity_model_and_fit():
    assert volume(10, 3) == 30
    assert total_fidelity_model(0.1, 0.1, 30) == pytest.approx(np.exp(-0.3))
    steps = np.arange(1, 11)
    fit = fit_log_fidelity(steps, np.exp(-0.1 * steps))
    assert fit.slope == pytest.approx(-0.1)
    assert fit.intercept == pytest.approx(0.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    with pytest.raises(ValueError):
        total_fidelity_model(-0.1, 0.1, 3)


def test_empirical_order():
    t0 = np.array([0.2, 0.1, 0.05, 0.025])
    assert empirical_order(t0, 3.0 * t0 ** 2) == pytest.approx(2.0)


def test_protection_verdict():
    verdict = protection_verdict(0.9995, 0.01, 10, 1.0)
    assert verdict.mu_target == pytest.approx(5e-4)
    assert verdict.required == pytest.approx(0.999)
    assert verdict.satisfiable
    assert not protection_verdict(0.998, 0.01, 10, 1.0).satisfiable


# ─── perfect-5 decode-reencode ───

@pytest.fixture(scope="module")
def perfect5_cycles():
    code = build_code("perfect-5")
    schedule = compile_circuit(build_recovery(code, "decode-reencode"), 0.1, 1.0)
    gen = LindbladGenerator(0.1, schedule.layout)
    frame = code.sample_frame()
    runs = {}
    for label in ("0L", "+L"):
        psi = frame[label]
        runs[label] = (
            psi,
            integrate_master_equation(
                schedule, gen, initial_state(psi, 0), IntegratorConfig(keep_states=True), psi=psi
            ),
        )
    return schedule, gen, runs


@pytest.mark.parametrize("label", ["0L", "+L"])
def test_perfect5_x_at_cycle_ends(perfect5_cycles, label):
    schedule, _, runs = perfect5_cycles
    psi, _ = runs[label]
    assert x_of_t(schedule, psi, 0.0) >= 0.5 - 1e-9
    assert x_of_t(schedule, psi, schedule.tau) >= 0.5 - 1e-9


@pytest.mark.parametrize("label", ["0L", "+L"])
def test_perfect5_error_above_lower_bound(perfect5_cycles, label):
    schedule, gen, runs = perfect5_cycles
    psi, traj = runs[label]
    x = x_samples(schedule, psi, traj.times)
    lower = error_lower_bound(traj.times, x, gen.lambda_sq, 5, t0=0.1)
    assert lower > 0.0
    assert traj.E_tau >= lower - 1e-5


@pytest.mark.parametrize("label", ["0L", "+L"])
def test_perfect5_direct_force_dominates_x(perfect5_cycles, label):
    schedule, _, runs = perfect5_cycles
    psi, traj = runs[label]
    X = direct_force(schedule, psi, traj.times, traj.states)
    x = x_samples(schedule, psi, traj.times)
    assert np.all(X >= -1e-12)
    assert np.all(X >= x - 1e-9)
