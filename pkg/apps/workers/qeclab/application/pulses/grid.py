from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qeclab.application.pulses.schedule import Schedule
from qeclab.domain.errors import ConfigError

MIN_STEPS_PER_PULSE = 10


@dataclass(frozen=True)
class TimeGrid:
    """
    Time points over [0, τ] with breakpoints at every pulse edge.
    Each segment between breakpoints holds an even number of equal steps, so
    the points at even indices form a valid grid of half the resolution.
    """
    points: np.ndarray
    breakpoints: tuple[int, ...]

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def max_spacing(self) -> float:
        return float(np.max(np.diff(self.points))) if len(self.points) > 1 else 0.0

    def segments(self) -> list[slice]:
        """Index slices of the segments, endpoints included."""
        return [slice(a, b + 1) for a, b in zip(self.breakpoints[:-1], self.breakpoints[1:])]

    def coarse(self) -> TimeGrid:
        return TimeGrid(self.points[::2], tuple(b // 2 for b in self.breakpoints))


def build_time_grid(schedule: Schedule, step_size: float) -> TimeGrid:
    if step_size <= 0.0:
        raise ConfigError(f"step size must be positive, got {step_size}")
    edges = schedule.edges()
    merged = [edges[0]]
    for e in edges[1:]:
        if e - merged[-1] > 1e-12:
            merged.append(e)
        elif e == schedule.tau:
            merged[-1] = e
    points: list[float] = [merged[0]]
    breakpoints = [0]
    for a, b in zip(merged[:-1], merged[1:]):
        n = max(2, int(np.ceil((b - a) / step_size - 1e-9)))
        n += n % 2
        points.extend(np.linspace(a, b, n + 1)[1:].tolist())
        breakpoints.append(len(points) - 1)
    grid = TimeGrid(np.array(points), tuple(breakpoints))
    for p in schedule.pulses:
        inside = np.count_nonzero((grid.points >= p.start - 1e-12) & (grid.points <= p.end + 1e-12)) - 1
        if inside < MIN_STEPS_PER_PULSE:
            raise ConfigError(
                f"pulse on {p.sites} of width {p.width} spans only {inside} steps (< {MIN_STEPS_PER_PULSE}); "
                f"reduce the step size"
            )
    return grid
