"""
Analytic bounds for one working period.
- x(t) = 1 - max_k ‖Φ_k(t)(P_ψ ⊗ 1_A)‖_∞, with Φ_k(t) the interaction-picture replacement map.
- E(τ) = λ²M ∫ e^{-λ²M(τ-s)} X(s) ds >= λ²M ∫ e^{-λ²M(τ-s)} x(s) ds.
- Ceilings on the per-period fidelity in terms of Mq, q = λ² t0_min.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger
from typing import Literal, Sequence

import numpy as np
from scipy.integrate import simpson

from qeclab.application.continuous.integrator import fidelity_observable
from qeclab.application.continuous.propagator import hamiltonian_propagator, iter_propagators
from qeclab.application.discrete.engine import required_fidelity, required_mu
from qeclab.application.noise.replacement import apply_phi_matrix
from qeclab.application.pulses.schedule import Schedule
from qeclab.domain.entities import PureState
from qeclab.domain.errors import ConfigError, DimensionError
from qeclab.domain.tensor import partial_trace_matrix

logger = getLogger(__name__)

Regime = Literal["small", "crossover", "large"]

SMALL_MQ = 0.1
LARGE_MQ = 10.0


# ─── x(t) ─────────────────────────────────────────────────────────────────────

def _x_from_lab_observable(q_lab: np.ndarray, n_qubits: int, register_sites: Sequence[int]) -> float:
    """1 - max_k top eigenvalue of Φ_k(Q); Φ_k(Q) = ½ Tr_k(Q) ⊗ 1 shares the spectrum of ½ Tr_k(Q)."""
    top = 0.0
    for k in register_sites:
        reduced = 0.5 * partial_trace_matrix(q_lab, n_qubits, (k,))
        reduced = 0.5 * (reduced + reduced.conj().T)
        top = max(top, float(np.linalg.eigvalsh(reduced)[-1]))
    return float(min(1.0, max(0.0, 1.0 - top)))


def _check_psi(schedule: Schedule, psi: PureState) -> None:
    if psi.layout.n_qubits != schedule.layout.register_qubits:
        raise DimensionError(
            f"psi has {psi.layout.n_qubits} qubits, register has {schedule.layout.register_qubits}"
        )


def x_of_t(schedule: Schedule, psi: PureState, t: float) -> float:
    _check_psi(schedule, psi)
    layout = schedule.layout
    u = hamiltonian_propagator(schedule, 0.0, t)
    q = fidelity_observable(psi, layout.ancilla_qubits)
    return _x_from_lab_observable(u @ q @ u.conj().T, layout.n_qubits, layout.register_sites)


def x_samples(schedule: Schedule, psi: PureState, times) -> np.ndarray:
    """x(t_i) over increasing times, streaming the propagator."""
    _check_psi(schedule, psi)
    layout = schedule.layout
    q = fidelity_observable(psi, layout.ancilla_qubits)
    out = [
        _x_from_lab_observable(u @ q @ u.conj().T, layout.n_qubits, layout.register_sites)
        for u in iter_propagators(schedule, times)
    ]
    return np.array(out)


def boundary_values(x: np.ndarray) -> tuple[float, float]:
    return float(x[0]), float(x[-1])


# ─── error lower bound and ODE check ─────────────────────────────────────────

def error_lower_bound(
        times: np.ndarray,
        x: np.ndarray,
        lambda_sq: float,
        M: int,
        tau: float | None = None,
        *,
        t0: float | None = None,
) -> float:
    """λ²M ∫_0^τ e^{-λ²M(τ-s)} x(s) ds by Simpson's rule on the sample grid."""
    times = np.asarray(times, dtype=float)
    x = np.asarray(x, dtype=float)
    if times.shape != x.shape or times.ndim != 1 or len(times) < 2:
        raise ValueError("x samples and times must be matching 1-d arrays with at least two points")
    tau = float(times[-1]) if tau is None else float(tau)
    if t0 is not None and np.max(np.diff(times)) > t0 / 10.0 * (1.0 + 1e-9):
        raise ConfigError(f"grid spacing {np.max(np.diff(times)):.3g} is too coarse for t0={t0} (need <= t0/10)")
    rate = lambda_sq * M
    if rate == 0.0:
        return 0.0
    weights = np.exp(-rate * (tau - times))
    return float(rate * simpson(weights * x, x=times))


@dataclass(frozen=True)
class OdeReport:
    X: np.ndarray = field(repr=False)
    slack: np.ndarray = field(repr=False)
    min_X: float
    min_margin: float
    passed: bool
    advice: str = ""

    def to_dict(self) -> dict:
        return {
            "minX": self.min_X,
            "minMargin": self.min_margin,
            "maxSlack": float(np.max(self.slack)) if self.slack.size else 0.0,
            "passed": self.passed,
            "advice": self.advice,
        }


def _derivative_with_error(times: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Second-order derivative and a Richardson estimate of its error from the half-resolution grid."""
    fine = np.gradient(y, times, edge_order=2)
    err = np.zeros_like(fine)
    if len(times) >= 5 and len(times) % 2 == 1:
        coarse = np.gradient(y[::2], times[::2], edge_order=2)
        err[::2] = np.abs(fine[::2] - coarse) / 3.0
        err[1::2] = np.maximum(err[:-1:2], err[2::2])
    return fine, err


def verify_error_ode(
        times: np.ndarray,
        fidelity: np.ndarray,
        x: np.ndarray,
        lambda_sq: float,
        M: int,
        *,
        slack_factor: float = 10.0,
        slack_floor: float = 1e-7,
) -> OdeReport:
    """
    Reconstruct X = E + E'/(λ²M) from E = 1 - F and check X >= 0 and X >= x pointwise,
    within slack = slack_factor × Richardson error estimate + slack_floor.
    """
    times = np.asarray(times, dtype=float)
    E = 1.0 - np.asarray(fidelity, dtype=float)
    x = np.asarray(x, dtype=float)
    rate = lambda_sq * M
    if rate == 0.0:
        zeros = np.zeros_like(times)
        return OdeReport(zeros, zeros, 0.0, 0.0, True, "noiseless: E vanishes identically")
    dE, err = _derivative_with_error(times, E)
    X = E + dE / rate
    slack = slack_factor * err / rate + slack_floor
    margin = X - x + slack
    passed = bool(np.all(X + slack >= 0.0) and np.all(margin >= 0.0))
    advice = ""
    if not passed:
        i = int(np.argmin(margin))
        advice = (
            f"X(t) falls below x(t) by {-margin[i]:.3e} at t={times[i]:.6g}; "
            f"refine the step size or check the integrator"
        )
        logger.warning(f"error ODE check failed: {advice}")
    return OdeReport(X, slack, float(np.min(X)), float(np.min(X - x)), passed, advice)


def direct_force(
        schedule: Schedule,
        psi: PureState,
        times: np.ndarray,
        states: Sequence[np.ndarray],
) -> np.ndarray:
    """X(t) = 1 - (1/M) Σ_k Tr(Φ_k(Q(t)) ρ(t)) from lab-frame states, Q(t) = U(P_ψ⊗1_A)U†."""
    _check_psi(schedule, psi)
    layout = schedule.layout
    if len(states) != len(times):
        raise ValueError(f"{len(states)} states for {len(times)} times")
    q = fidelity_observable(psi, layout.ancilla_qubits)
    n = layout.n_qubits
    M = layout.register_qubits
    out = []
    for u, rho in zip(iter_propagators(schedule, times), states):
        q_lab = u @ q @ u.conj().T
        s = sum(float(np.real(np.vdot(apply_phi_matrix(q_lab, n, k), rho))) for k in layout.register_sites)
        out.append(1.0 - s / M)
    return np.array(out)


# ─── derivative bound ────────────────────────────────────────────────────────

@dataclass(frozen=True)
class DerivativeReport:
    max_slope: float
    limit: float
    passed: bool
    C: float
    t0_min: float

    def to_dict(self) -> dict:
        return {
            "maxSlope": self.max_slope,
            "limit": self.limit,
            "passed": self.passed,
            "C": self.C,
            "t0Min": self.t0_min,
        }


def derivative_bound_check(
        times: np.ndarray,
        x: np.ndarray,
        t0_min: float,
        C: float,
        tau: float | None = None,
) -> DerivativeReport:
    """max |dx/dt| over [0, t0_min] ∪ [τ - t0_min, τ] against 4C / t0_min."""
    times = np.asarray(times, dtype=float)
    x = np.asarray(x, dtype=float)
    tau = float(times[-1]) if tau is None else float(tau)
    if np.max(np.diff(times)) > t0_min * (1.0 + 1e-9):
        raise ConfigError(f"grid does not resolve t0_min={t0_min}")
    slope = np.abs(np.gradient(x, times, edge_order=2))
    window = (times <= t0_min + 1e-12) | (times >= tau - t0_min - 1e-12)
    max_slope = float(np.max(slope[window])) if np.any(window) else 0.0
    limit = 4.0 * C / t0_min
    passed = max_slope <= limit
    if not passed:
        logger.warning(f"boundary-window slope {max_slope:.4g} exceeds 4C/t0_min = {limit:.4g}")
    return DerivativeReport(max_slope, limit, passed, C, t0_min)


# ─── ceilings and global estimates ───────────────────────────────────────────

@dataclass(frozen=True)
class CeilingResult:
    regime: Regime
    ceiling: float
    Mq: float
    kappa: float
    expression: str


def classify_regime(Mq: float) -> Regime:
    if Mq <= SMALL_MQ:
        return "small"
    if Mq >= LARGE_MQ:
        return "large"
    return "crossover"


def fidelity_ceiling(M: int, q: float, kappa: float = 1.0) -> CeilingResult:
    """
    Ceiling on F(τ): 1 - κMq for small Mq, 1/2 for large Mq, and the larger of the two in between.
    κ is a fitted constant; 1.0 until a fit is available.
    """
    if M < 1:
        raise ValueError(f"M must be at least 1, got {M}")
    if q < 0.0:
        raise ValueError(f"q must be non-negative, got {q}")
    mq = M * q
    regime = classify_regime(mq)
    if regime == "small":
        return CeilingResult(regime, 1.0 - kappa * mq, mq, kappa, "1 - kappa*Mq")
    if regime == "large":
        return CeilingResult(regime, 0.5, mq, kappa, "1/2")
    return CeilingResult(regime, max(0.5, 1.0 - kappa * mq), mq, kappa, "max(1/2, 1 - kappa*Mq)")


@dataclass(frozen=True)
class KappaFit:
    kappa: float
    n_points: int
    rms_residual: float


def fit_kappa(mq: Sequence[float], fidelity: Sequence[float], *, small_only: bool = True) -> KappaFit:
    """Least-squares slope of 1 - F against Mq through the origin."""
    mq = np.asarray(mq, dtype=float)
    loss = 1.0 - np.asarray(fidelity, dtype=float)
    if small_only:
        keep = mq <= SMALL_MQ
        mq, loss = mq[keep], loss[keep]
    if mq.size == 0 or not np.any(mq > 0.0):
        raise ValueError("fit_kappa: no points with Mq > 0 in range")
    kappa = float(np.dot(mq, loss) / np.dot(mq, mq))
    rms = float(np.sqrt(np.mean((loss - kappa * mq) ** 2)))
    return KappaFit(kappa, int(mq.size), rms)


def t_max_estimate(lambda_sq: float, t0_min: float) -> float:
    """Largest useful number of steps, 1 / (λ² t0_min)."""
    denom = lambda_sq * t0_min
    if denom <= 0.0:
        raise ValueError(f"lambda_sq * t0_min must be positive, got {denom}")
    return 1.0 / denom


def volume(T: int, M: int) -> int:
    """Working periods × register qubits."""
    return T * M


def total_fidelity_model(lambda_sq: float, t0: float, V: float) -> float:
    if lambda_sq < 0 or t0 < 0 or V < 0:
        raise ValueError("total_fidelity_model takes non-negative inputs")
    return float(np.exp(-lambda_sq * t0 * V))


@dataclass(frozen=True)
class LogLinearFit:
    slope: float
    intercept: float
    r_squared: float


def fit_log_fidelity(steps: Sequence[float], fidelity: Sequence[float]) -> LogLinearFit:
    """Linear fit of log F against the step count."""
    x = np.asarray(steps, dtype=float)
    y = np.log(np.asarray(fidelity, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LogLinearFit(float(slope), float(intercept), r2)


def empirical_order(t0: Sequence[float], distance: Sequence[float]) -> float:
    """Slope of log(distance) against log(t0)."""
    slope, _ = np.polyfit(np.log(np.asarray(t0, dtype=float)), np.log(np.asarray(distance, dtype=float)), 1)
    return float(slope)


@dataclass(frozen=True)
class ProtectionVerdict:
    F_cont: float
    required: float
    mu_target: float
    satisfiable: bool


def protection_verdict(F_cont: float, epsilon: float, T: int, B: float) -> ProtectionVerdict:
    """
    Juxtapose the continuous per-period fidelity with the requirement 1 - (B+1)μ at μ = ε/((B+1)T),
    which simplifies to 1 - ε/T.
    """
    mu = required_mu(epsilon, B, T)
    need = required_fidelity(mu, B)
    return ProtectionVerdict(F_cont, need, mu, F_cont >= need)

