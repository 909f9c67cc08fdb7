"""
Truncated Dyson series for the interaction-picture fidelity
    F(t) = e^{-λ²Mt} Σ_n Tr(P_ψ⊗1_A ρ^(n)(t)),
    ρ^(0) = P_ψ ⊗ P_φA,   ρ^(n)(t) = λ² ∫_0^t Σ_k Φ_k(u) ρ^(n-1)(u) du.
- Nested integrals are cumulative Simpson sums over the pulse-aware grid, one segment at a time.
- The tail beyond order N is bounded by the Poisson mass P(n > N) with mean λ²Mt.
"""
from __future__ import annotations

from dataclasses import dataclass
from logging import getLogger

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.stats import poisson

from qeclab.application.continuous.integrator import fidelity_observable, initial_state
from qeclab.application.continuous.interaction import interaction_phi_matrix
from qeclab.application.continuous.propagator import DEFAULT_MEMORY_BUDGET_MB, PropagatorCache
from qeclab.application.noise.replacement import LindbladGenerator
from qeclab.application.pulses.grid import TimeGrid, build_time_grid
from qeclab.application.pulses.schedule import Schedule
from qeclab.domain.entities import PureState
from qeclab.domain.errors import ConfigError, DimensionError

logger = getLogger(__name__)

DEFAULT_TAIL_TOLERANCE = 1e-8
MAX_ORDER = 60


@dataclass(frozen=True)
class DysonResult:
    t: float
    fidelity: float
    order: int
    tail: float
    tail_ok: bool
    n_required: int | None
    times: np.ndarray
    curve: np.ndarray
    terms: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "fidelity": self.fidelity,
            "order": self.order,
            "tail": self.tail,
            "tailOk": self.tail_ok,
            "nRequired": self.n_required,
            "terms": list(self.terms),
        }


def poisson_tail(order: int, mean: float) -> float:
    """e^{-m} Σ_{n > N} m^n / n!."""
    if mean <= 0.0:
        return 0.0
    return float(poisson.sf(order, mean))


def required_order(mean: float, tol: float = DEFAULT_TAIL_TOLERANCE, max_order: int = MAX_ORDER) -> int | None:
    for n in range(max_order + 1):
        if poisson_tail(n, mean) <= tol:
            return n
    return None


def series_memory_mb(n_points: int, dim: int) -> float:
    """Working set of the series: four stacks of n_points complex dim x dim matrices."""
    return 4 * n_points * dim * dim * 16 / 2 ** 20


def _cumulative(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    if len(x) >= 3:
        re = cumulative_simpson(y.real, x=x, axis=0, initial=0.0)
        im = cumulative_simpson(y.imag, x=x, axis=0, initial=0.0)
        return re + 1j * im
    out = np.zeros_like(y)
    out[1:] = 0.5 * (y[1:] + y[:-1]) * np.diff(x)[:, None, None]
    return np.cumsum(out, axis=0)


def _integrate_on_grid(values: np.ndarray, grid: TimeGrid) -> np.ndarray:
    """∫_0^{t_i} values(u) du for every grid point, segment by segment."""
    out = np.empty_like(values)
    out[0] = 0.0
    offset = np.zeros(values.shape[1:], dtype=complex)
    for seg in grid.segments():
        part = _cumulative(values[seg], grid.points[seg]) + offset
        out[seg] = part
        offset = part[-1]
    return out


def _truncate_grid(grid: TimeGrid, t: float) -> TimeGrid:
    if t >= grid.points[-1] - 1e-12:
        return grid
    idx = int(np.searchsorted(grid.points, t - 1e-12))
    pts = list(grid.points[:idx])
    pts.append(t)
    bps = [b for b in grid.breakpoints if b < len(pts) - 1] + [len(pts) - 1]
    return TimeGrid(np.array(pts), tuple(bps))


def dyson_fidelity(
        schedule: Schedule,
        lindblad: LindbladGenerator,
        psi: PureState,
        t: float | None = None,
        truncation: int | None = None,
        *,
        tol: float = DEFAULT_TAIL_TOLERANCE,
        step_size: float | None = None,
        grid: TimeGrid | None = None,
        memory_budget_mb: float = DEFAULT_MEMORY_BUDGET_MB,
) -> DysonResult:
    """
    F(t) summed to order N (automatic from the tail bound when `truncation` is None).
    When the tail exceeds `tol` the result carries the order that would meet it.
    """
    layout = schedule.layout
    if psi.layout.n_qubits != layout.register_qubits:
        raise DimensionError(f"psi has {psi.layout.n_qubits} qubits, register has {layout.register_qubits}")
    t = schedule.tau if t is None else float(t)
    if not 0.0 <= t <= schedule.tau + 1e-12:
        raise ValueError(f"t={t} outside [0, {schedule.tau}]")
    M = layout.register_qubits
    lam = lindblad.lambda_sq
    mean = lam * M * t

    auto = required_order(mean, tol)
    order = truncation if truncation is not None else (auto if auto is not None else MAX_ORDER)
    if order < 0:
        raise ValueError(f"truncation order must be non-negative, got {order}")
    tail = poisson_tail(order, mean)
    tail_ok = tail <= tol
    n_required = None if tail_ok else auto
    if not tail_ok:
        logger.warning(f"Dyson tail {tail:.2e} > {tol:.0e} at N={order}; N_required={n_required}")

    if grid is None:
        step = step_size if step_size is not None else schedule.min_width / 50.0
        grid = build_time_grid(schedule, step)
    grid = _truncate_grid(grid, t)
    d = layout.total_dim
    npts = len(grid)
    need_mb = series_memory_mb(npts, d)
    if order > 0 and need_mb > memory_budget_mb:
        raise ConfigError(
            f"Dyson series needs ~{need_mb:.0f} MB ({npts} points, dimension {d}); budget {memory_budget_mb:.0f} MB"
        )

    n = layout.n_qubits
    q = fidelity_observable(psi, layout.ancilla_qubits)
    rho0 = initial_state(psi, layout.ancilla_qubits).data
    base = float(np.real(np.vdot(q, rho0)))
    total = np.full(npts, base)
    terms = [base]

    if order > 0 and lam > 0.0:
        cache = PropagatorCache.build(schedule, grid, memory_budget_mb=memory_budget_mb)
        prev = np.broadcast_to(rho0, (npts, d, d))
        for level in range(1, order + 1):
            src = np.empty((npts, d, d), dtype=complex)
            for i in range(npts):
                u = cache.at(i)
                acc = np.zeros((d, d), dtype=complex)
                for k in layout.register_sites:
                    acc += interaction_phi_matrix(u, k, prev[i], n)
                src[i] = lam * acc
            prev = _integrate_on_grid(src, grid)
            contrib = np.real(np.einsum("ij,tij->t", q.conj(), prev))
            total = total + contrib
            terms.append(float(contrib[-1]))
    else:
        terms.extend([0.0] * order)

    curve = np.exp(-lam * M * grid.points) * total
    fidelity = float(curve[-1])
    logger.debug(f"Dyson F({t:.4g}) = {fidelity:.12f} with N={order}, tail={tail:.2e}")
    return DysonResult(
        t=t,
        fidelity=fidelity,
        order=order,
        tail=tail,
        tail_ok=tail_ok,
        n_required=n_required,
        times=np.array(grid.points),
        curve=curve,
        terms=tuple(terms),
    )
