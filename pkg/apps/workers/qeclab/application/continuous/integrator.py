"""
Master-equation integration
    dρ/dt = -i[H(t), ρ] + λ² Σ_k (Φ_k ρ - ρ)
on the pulse-aware time grid.
- strang: half dissipator, exact Hamiltonian flow, half dissipator. Both pieces are exact, so each step is CPTP.
- splitting-4: triple-jump composition of Strang steps (fourth order); the middle step runs backwards, positivity is monitored.
- rk4: classical Runge-Kutta in the lab frame, kept as a cross-check.
The fidelity column is the interaction-picture fidelity Tr(U Q U† ρ) with Q = P_ψ ⊗ 1_A.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from logging import getLogger
from typing import Literal

import numpy as np

from qeclab.application.continuous.propagator import conjugate_flow
from qeclab.application.noise.replacement import LindbladGenerator, apply_phi_matrix
from qeclab.application.pulses.grid import TimeGrid, build_time_grid
from qeclab.application.pulses.schedule import Schedule, evaluate_hamiltonian
from qeclab.domain.entities import DensityMatrix, PureState
from qeclab.domain.errors import ConfigError, DimensionError, NumericalError
from qeclab.domain.tensor import append_fresh_ancillas, partial_trace_matrix
from qeclab.settings import DEFAULT_TOLERANCES

logger = getLogger(__name__)

IntegratorMethod = Literal["strang", "splitting-4", "rk4"]

DEFAULT_STEPS_PER_PULSE = 50
MIN_RESOLUTION = 10

_CBRT2 = 2.0 ** (1.0 / 3.0)
_W1 = 1.0 / (2.0 - _CBRT2)
_W0 = -_CBRT2 / (2.0 - _CBRT2)


@dataclass(frozen=True)
class IntegratorConfig:
    step_size: float | None = None
    method: IntegratorMethod = "strang"
    keep_states: bool = False

    def __post_init__(self):
        if self.method not in ("strang", "splitting-4", "rk4"):
            raise ConfigError(f"Unsupported integrator: {self.method}")
        if self.step_size is not None and self.step_size <= 0.0:
            raise ConfigError(f"step size must be positive, got {self.step_size}")

    def resolve_step(self, schedule: Schedule) -> float:
        """Explicit step, or t0/50 for the narrowest pulse; must resolve every pulse by 10 steps."""
        width = schedule.min_width
        step = self.step_size if self.step_size is not None else width / DEFAULT_STEPS_PER_PULSE
        if schedule.pulses and step > width / MIN_RESOLUTION * (1.0 + 1e-9):
            raise ConfigError(f"step size {step} exceeds t0/{MIN_RESOLUTION} = {width / MIN_RESOLUTION}")
        return step


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    fidelity: np.ndarray
    trace: np.ndarray
    purity: np.ndarray
    min_eig: np.ndarray
    final_state: DensityMatrix
    lab_fidelity: float | None
    method: IntegratorMethod
    step_size: float
    grid: TimeGrid = field(repr=False)
    states: tuple[np.ndarray, ...] = field(default=(), compare=False, repr=False)

    @property
    def F_tau(self) -> float:
        return float(self.fidelity[-1])

    @property
    def E_tau(self) -> float:
        return 1.0 - self.F_tau

    def rows(self) -> list[tuple[float, float, float, float, float]]:
        return [
            (float(t), float(f), float(tr), float(p), float(m))
            for t, f, tr, p, m in zip(self.times, self.fidelity, self.trace, self.purity, self.min_eig)
        ]


class _Stepper:
    def __init__(self, schedule: Schedule, lindblad: LindbladGenerator):
        self.schedule = schedule
        self.lindblad = lindblad
        self.n = schedule.layout.n_qubits
        self.sites = schedule.layout.register_sites

    def dissipate(self, mat: np.ndarray, s: float) -> np.ndarray:
        """e^{sL} for either sign of s; only s >= 0 is CPTP."""
        if self.lindblad.lambda_sq == 0.0 or s == 0.0:
            return mat
        w = -np.expm1(-self.lindblad.lambda_sq * s)
        for k in self.sites:
            mat = (1.0 - w) * mat + w * apply_phi_matrix(mat, self.n, k)
        return mat

    def strang(self, mat: np.ndarray, a: float, b: float) -> np.ndarray:
        h = b - a
        mat = self.dissipate(mat, h / 2.0)
        mat = conjugate_flow(self.schedule.local_flow(a, b), mat, self.n)
        return self.dissipate(mat, h / 2.0)

    def splitting4(self, mat: np.ndarray, a: float, b: float) -> np.ndarray:
        h = b - a
        t1 = a + _W1 * h
        t2 = t1 + _W0 * h
        mat = self.strang(mat, a, t1)
        mat = self.strang(mat, t1, t2)
        return self.strang(mat, t2, b)

    def _rhs(self, t: float, mat: np.ndarray) -> np.ndarray:
        t = min(max(t, 0.0), self.schedule.tau)
        h = evaluate_hamiltonian(self.schedule, t).data
        return -1j * (h @ mat - mat @ h) + self.lindblad.apply_matrix(mat, self.n)

    def rk4(self, mat: np.ndarray, a: float, b: float) -> np.ndarray:
        h = b - a
        k1 = self._rhs(a, mat)
        k2 = self._rhs(a + h / 2.0, mat + (h / 2.0) * k1)
        k3 = self._rhs(a + h / 2.0, mat + (h / 2.0) * k2)
        k4 = self._rhs(b, mat + h * k3)
        return mat + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def step(self, method: IntegratorMethod, mat: np.ndarray, a: float, b: float) -> np.ndarray:
        if method == "strang":
            out = self.strang(mat, a, b)
        elif method == "splitting-4":
            out = self.splitting4(mat, a, b)
        else:
            out = self.rk4(mat, a, b)
        return 0.5 * (out + out.conj().T)


def fidelity_observable(psi: PureState, n_ancillas: int) -> np.ndarray:
    """P_ψ ⊗ 1_A."""
    return np.kron(psi.projector(), np.eye(2 ** n_ancillas, dtype=complex))


def initial_state(psi: PureState, n_ancillas: int) -> DensityMatrix:
    """P_ψ ⊗ |0...0><0...0|."""
    layout = psi.layout.with_ancillas(n_ancillas)
    return DensityMatrix(layout, append_fresh_ancillas(psi.projector(), n_ancillas))


def integrate_master_equation(
        schedule: Schedule,
        lindblad: LindbladGenerator,
        rho0: DensityMatrix,
        config: IntegratorConfig = IntegratorConfig(),
        *,
        psi: PureState | None = None,
        grid: TimeGrid | None = None,
) -> Trajectory:
    """
    Integrate over [0, τ]. With `psi` the fidelity column tracks P_ψ ⊗ 1_A, otherwise the
    overlap with ρ0 itself.
    """
    layout = schedule.layout
    if rho0.layout.total_dim != layout.total_dim or lindblad.layout.total_dim != layout.total_dim:
        raise DimensionError("schedule, generator and initial state live on different spaces")
    tol = DEFAULT_TOLERANCES
    step = config.resolve_step(schedule)
    grid = grid or build_time_grid(schedule, step)
    n = layout.n_qubits
    stepper = _Stepper(schedule, lindblad)

    if psi is not None:
        if psi.layout.n_qubits != layout.register_qubits:
            raise DimensionError(f"psi has {psi.layout.n_qubits} qubits, register has {layout.register_qubits}")
        q = fidelity_observable(psi, layout.ancilla_qubits)
    else:
        q = np.array(rho0.data, copy=True)

    rho = np.array(rho0.data, dtype=complex, copy=True)
    npts = len(grid)
    fid, tr, pur, mins = (np.empty(npts) for _ in range(4))
    states: list[np.ndarray] = []

    def record(i: int) -> None:
        fid[i] = float(np.real(np.vdot(q, rho)))
        tr[i] = float(np.real(np.trace(rho)))
        pur[i] = float(np.real(np.vdot(rho, rho)))
        try:
            mins[i] = float(np.linalg.eigvalsh(rho)[0])
        except np.linalg.LinAlgError as e:
            raise NumericalError(f"eigensolver failed at t={grid.points[i]:.6g}: {e}") from e
        if mins[i] < -tol.positivity:
            raise NumericalError(
                f"positivity violation at t={grid.points[i]:.6g}: min eigenvalue {mins[i]:.3e} ({config.method})"
            )
        if abs(tr[i] - 1.0) > tol.trajectory_trace:
            raise NumericalError(f"trace drift {tr[i] - 1.0:.3e} at t={grid.points[i]:.6g}")
        if config.keep_states:
            states.append(rho.copy())

    record(0)
    pts = grid.points
    for i in range(1, npts):
        a, b = float(pts[i - 1]), float(pts[i])
        rho = stepper.step(config.method, rho, a, b)
        q = conjugate_flow(schedule.local_flow(a, b), q, n)
        record(i)

    lab_fidelity = None
    if psi is not None:
        reg = partial_trace_matrix(rho, n, layout.ancilla_sites) if layout.ancilla_qubits else rho
        lab_fidelity = float(min(1.0, max(0.0, np.vdot(psi.amplitudes, reg @ psi.amplitudes).real)))

    logger.debug(
        f"integrated {npts - 1} steps ({config.method}, h={step:.3g}): F(tau)={fid[-1]:.10f} "
        f"min_eig={np.min(mins):.2e}"
    )
    final = DensityMatrix(layout, rho / tr[-1])
    return Trajectory(
        times=np.array(pts),
        fidelity=fid,
        trace=tr,
        purity=pur,
        min_eig=mins,
        final_state=final,
        lab_fidelity=lab_fidelity,
        method=config.method,
        step_size=step,
        grid=grid,
        states=tuple(states),
    )
