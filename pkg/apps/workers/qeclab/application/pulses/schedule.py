"""
Pulse schedules H(t) = Σ_α f_α(t) h^α.
- Each gate U becomes one pulse with h = g, U = exp(-i g) (principal generator).
- Layers of the circuit occupy slots of width t0: the first starts at 0 and the last ends at τ.
- Pulses sharing a qubit never overlap in time; disjoint pulses may run in parallel.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from logging import getLogger

import numpy as np

from qeclab.application.codes.gates import Gate
from qeclab.application.codes.recovery import RecoveryCircuit
from qeclab.application.pulses.generators import principal_generator
from qeclab.application.pulses.shapes import DEFAULT_PULSE_SHAPE, PulseShapeName, build_shape
from qeclab.domain.entities import HermitianOperator
from qeclab.domain.errors import ConfigError, ScheduleOverflowError
from qeclab.domain.tensor import apply_local
from qeclab.domain.values import HilbertLayout

logger = getLogger(__name__)

DEFAULT_SPEED_CONSTANT = 2.0 * np.pi
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class Pulse:
    shape: PulseShapeName
    center: float
    width: float
    sites: tuple[int, ...]
    generator: np.ndarray = field(compare=False, repr=False)
    gate: Gate | None = None

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError(f"pulse width must be positive, got {self.width}")
        g = np.array(self.generator, dtype=complex, copy=True)
        if g.shape != (2 ** len(self.sites),) * 2:
            raise ValueError(f"generator {g.shape} does not act on sites {self.sites}")
        if not np.allclose(g, g.conj().T, atol=1e-12, rtol=0.0):
            raise ValueError("pulse generator is not Hermitian")
        g.setflags(write=False)
        object.__setattr__(self, "generator", g)
        object.__setattr__(self, "sites", tuple(int(q) for q in self.sites))
        build_shape(self.shape)

    @cached_property
    def _eig(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.generator)

    @property
    def start(self) -> float:
        return self.center - self.width / 2.0

    @property
    def end(self) -> float:
        return self.center + self.width / 2.0

    @property
    def generator_norm(self) -> float:
        return float(np.max(np.abs(self._eig[0]))) if self.generator.size else 0.0

    def density(self, t):
        return build_shape(self.shape).density(t, self.center, self.width)

    def cumulative(self, t):
        return build_shape(self.shape).cumulative(t, self.center, self.width)

    def factor(self, weight: float) -> np.ndarray:
        """exp(-i · weight · h), exact through the eigendecomposition of h."""
        w, v = self._eig
        return (v * np.exp(-1j * weight * w)) @ v.conj().T

    def unitary(self) -> np.ndarray:
        return self.factor(1.0)

    def order_key(self) -> tuple:
        return self.center, min(self.sites), self.sites


@dataclass(frozen=True)
class Schedule:
    pulses: tuple[Pulse, ...]
    tau: float
    t0_min: float
    layout: HilbertLayout

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.t0_min <= 0.0:
            raise ValueError(f"t0_min must be positive, got {self.t0_min}")
        pulses = tuple(sorted(self.pulses, key=Pulse.order_key))
        for p in pulses:
            self.layout.check_sites(p.sites)
            if p.width < self.t0_min - _EDGE_TOL:
                raise ConfigError(f"pulse width {p.width} is below the gate speed limit t0_min={self.t0_min}")
            if p.start < -_EDGE_TOL or p.end > self.tau + _EDGE_TOL:
                raise ScheduleOverflowError(f"pulse [{p.start}, {p.end}] leaves the period [0, {self.tau}]")
        for i, a in enumerate(pulses):
            for b in pulses[i + 1:]:
                if set(a.sites) & set(b.sites) and a.end > b.start + _EDGE_TOL and b.end > a.start + _EDGE_TOL:
                    raise ConfigError(f"pulses on shared sites {a.sites} / {b.sites} overlap in time")
        object.__setattr__(self, "pulses", pulses)

    @property
    def min_width(self) -> float:
        return min((p.width for p in self.pulses), default=self.tau)

    def edges(self) -> list[float]:
        pts = {0.0, float(self.tau)}
        for p in self.pulses:
            pts.add(min(max(p.start, 0.0), self.tau))
            pts.add(min(max(p.end, 0.0), self.tau))
        return sorted(pts)

    def active(self, s: float, t: float) -> list[Pulse]:
        """Pulses whose support meets the open interval between s and t."""
        lo, hi = min(s, t), max(s, t)
        return [p for p in self.pulses if p.start < hi and p.end > lo]

    def local_flow(self, s: float, t: float) -> list[tuple[np.ndarray, tuple[int, ...]]]:
        """
        Local factors of U(t, s) in application order.
        Exact: pulses sharing a qubit are time-disjoint and every pulse has a fixed generator.
        """
        if t >= s:
            factors = []
            for p in self.active(s, t):
                w = float(p.cumulative(t) - p.cumulative(s))
                if w != 0.0:
                    factors.append((p.factor(w), p.sites))
            return factors
        return [(op.conj().T, sites) for op, sites in reversed(self.local_flow(t, s))]


def check_time(schedule: Schedule, t: float) -> None:
    if t < -_EDGE_TOL or t > schedule.tau + _EDGE_TOL:
        raise ValueError(f"t={t} outside the period [0, {schedule.tau}]")


def compile_circuit(
        circuit: RecoveryCircuit,
        t0: float,
        tau: float,
        layout: HilbertLayout | None = None,
        *,
        shape: PulseShapeName = DEFAULT_PULSE_SHAPE,
        t0_min: float | None = None,
) -> Schedule:
    layout = layout or circuit.layout
    t0_min = t0 if t0_min is None else t0_min
    if t0 < t0_min - _EDGE_TOL:
        raise ConfigError(f"t0={t0} is below the gate speed limit t0_min={t0_min}")
    layers = circuit.layers()
    depth = len(layers)
    if depth and tau < depth * t0 - _EDGE_TOL:
        raise ScheduleOverflowError(f"schedule overflow: depth {depth} x t0 {t0} exceeds tau {tau}")
    if depth <= 1:
        centers = [tau / 2.0] * depth
    else:
        spacing = (tau - t0) / (depth - 1)
        centers = [t0 / 2.0 + j * spacing for j in range(depth)]
    pulses = []
    generators: dict[tuple, np.ndarray] = {}
    for center, layer in zip(centers, layers):
        for i in layer:
            gate = circuit.gates[i]
            key = (gate.name, gate.sites, gate.ctrl) if gate.name != "U" else (id(gate),)
            if key not in generators:
                generators[key] = principal_generator(gate.matrix())
            pulses.append(Pulse(shape, center, t0, gate.sites, generators[key], gate))
    logger.debug(
        f"compiled {len(pulses)} pulses ({len(circuit.composite_gates)} composite) in {depth} layers "
        f"(t0={t0}, tau={tau}, shape={shape})"
    )
    return Schedule(tuple(pulses), tau, t0_min, layout)


def evaluate_hamiltonian(schedule: Schedule, t: float) -> HermitianOperator:
    check_time(schedule, t)
    n = schedule.layout.n_qubits
    d = schedule.layout.total_dim
    h = np.zeros((d, d), dtype=complex)
    for p in schedule.pulses:
        f = p.density(t)
        if f != 0.0:
            h += f * apply_local(p.generator, p.sites, np.eye(d, dtype=complex), n)
    return HermitianOperator(schedule.layout, h)


@dataclass(frozen=True)
class SpeedCheckEntry:
    index: int
    sites: tuple[int, ...]
    sup: float
    limit: float
    passed: bool


@dataclass(frozen=True)
class SpeedReport:
    C: float
    t0_min: float
    entries: tuple[SpeedCheckEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def max_sup(self) -> float:
        return max((e.sup for e in self.entries), default=0.0)

    def to_dict(self) -> dict:
        return {
            "C": self.C,
            "t0Min": self.t0_min,
            "passed": self.passed,
            "maxSup": self.max_sup,
            "pulses": [
                {"index": e.index, "sites": list(e.sites), "sup": e.sup, "limit": e.limit, "passed": e.passed}
                for e in self.entries
            ],
        }


def check_speed_constraint(schedule: Schedule, C: float = DEFAULT_SPEED_CONSTANT) -> SpeedReport:
    """sup_t f_α(t) · 2‖h^α‖ per pulse against C / t0_min."""
    limit = C / schedule.t0_min
    entries = []
    for i, p in enumerate(schedule.pulses):
        sup = build_shape(p.shape).peak(p.width) * 2.0 * p.generator_norm
        entries.append(SpeedCheckEntry(i, p.sites, sup, limit, sup <= limit * (1.0 + 1e-12)))
    report = SpeedReport(C, schedule.t0_min, tuple(entries))
    if not report.passed:
        logger.warning(f"speed constraint FAIL: max sup {report.max_sup:.6g} > C/t0_min = {limit:.6g} (C={C:g})")
    return report


def delta_limit_schedule(schedule: Schedule) -> list[tuple[float, Gate]]:
    """
    Pulses collapsed to instantaneous gates at their centers, in time order.
    Same-center pulses are emitted by site order; they must act on disjoint sites or commute.
    """
    pulses = list(schedule.pulses)
    for i, a in enumerate(pulses):
        for b in pulses[i + 1:]:
            if abs(a.center - b.center) > _EDGE_TOL or not set(a.sites) & set(b.sites):
                continue
            if not _commute(a, b):
                raise ValueError(f"ambiguous order: non-commuting pulses on {a.sites} and {b.sites} share center {a.center}")
    out = []
    for p in pulses:
        gate = p.gate if p.gate is not None else Gate("U", p.sites, unitary=p.unitary())
        out.append((p.center, gate))
    return out


def _commute(a: Pulse, b: Pulse) -> bool:
    sites = sorted(set(a.sites) | set(b.sites))
    local = {q: i for i, q in enumerate(sites)}
    k = len(sites)
    eye = np.eye(2 ** k, dtype=complex)
    ha = apply_local(a.generator, [local[q] for q in a.sites], eye, k)
    hb = apply_local(b.generator, [local[q] for q in b.sites], eye, k)
    return bool(np.allclose(ha @ hb, hb @ ha, atol=1e-10))
