from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger

from qeclab.application.bounds.analysis import (
    CeilingResult,
    DerivativeReport,
    OdeReport,
    Regime,
    boundary_values,
    derivative_bound_check,
    error_lower_bound,
    fidelity_ceiling,
    verify_error_ode,
    x_samples,
)
from qeclab.application.continuous.integrator import Trajectory
from qeclab.application.noise.replacement import LindbladGenerator
from qeclab.application.pulses.schedule import Schedule
from qeclab.domain.entities import PureState

logger = getLogger(__name__)

BOUND_TOLERANCE = 1e-5


@dataclass(frozen=True)
class BoundReport:
    x_samples: tuple[tuple[float, float], ...] = field(repr=False)
    E_tau_measured: float
    E_tau_lower_bound: float
    q: float
    Mq: float
    regime: Regime
    boundary_values: tuple[float, float]
    max_derivative_observed: float
    ceiling: CeilingResult
    derivative: DerivativeReport
    ode: OdeReport
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        for _, x in self.x_samples:
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"x sample {x} outside [0, 1]")

    @property
    def bound_holds(self) -> bool:
        return self.E_tau_lower_bound <= self.E_tau_measured + BOUND_TOLERANCE

    def to_dict(self, *, include_samples: bool = True) -> dict:
        out = {
            "inputs": self.inputs,
            "E_tau_measured": self.E_tau_measured,
            "E_tau_lower_bound": self.E_tau_lower_bound,
            "boundHolds": self.bound_holds,
            "q": self.q,
            "Mq": self.Mq,
            "regime": self.regime,
            "ceiling": self.ceiling.ceiling,
            "ceilingExpression": self.ceiling.expression,
            "boundaryValues": list(self.boundary_values),
            "maxDerivativeObserved": self.max_derivative_observed,
            "derivativeCheck": self.derivative.to_dict(),
            "odeCheck": self.ode.to_dict(),
        }
        if include_samples:
            out["xSamples"] = [list(p) for p in self.x_samples]
        return out


def build_bound_report(
        schedule: Schedule,
        lindblad: LindbladGenerator,
        psi: PureState,
        trajectory: Trajectory,
        *,
        t0: float,
        C: float,
        kappa: float = 1.0,
) -> BoundReport:
    """All bound quantities of one integrated working period, on the trajectory's grid."""
    times = trajectory.times
    M = schedule.layout.register_qubits
    x = x_samples(schedule, psi, times)
    lower = error_lower_bound(times, x, lindblad.lambda_sq, M, schedule.tau, t0=schedule.min_width)
    q = lindblad.lambda_sq * schedule.t0_min
    ceiling = fidelity_ceiling(M, q, kappa)
    deriv = derivative_bound_check(times, x, schedule.t0_min, C, schedule.tau)
    ode = verify_error_ode(times, trajectory.fidelity, x, lindblad.lambda_sq, M)
    report = BoundReport(
        x_samples=tuple((float(t), float(v)) for t, v in zip(times, x)),
        E_tau_measured=trajectory.E_tau,
        E_tau_lower_bound=lower,
        q=q,
        Mq=M * q,
        regime=ceiling.regime,
        boundary_values=boundary_values(x),
        max_derivative_observed=deriv.max_slope,
        ceiling=ceiling,
        derivative=deriv,
        ode=ode,
        inputs={
            "lambdaSq": lindblad.lambda_sq,
            "t0": t0,
            "t0Min": schedule.t0_min,
            "tau": schedule.tau,
            "M": M,
            "C": C,
            "kappa": kappa,
            "gridPoints": int(len(times)),
            "stepSize": trajectory.step_size,
            "method": trajectory.method,
        },
    )
    if not report.bound_holds:
        logger.warning(
            f"E(tau)={report.E_tau_measured:.6g} below its lower bound {report.E_tau_lower_bound:.6g}"
        )
    if min(report.boundary_values) < 0.5 - 1e-9:
        logger.warning(f"boundary values {report.boundary_values} fall below 1/2")
    return report

