# application/pulses/shapes.py
from abc import ABC, abstractmethod
from typing import Final, Literal, Mapping

import numpy as np
from scipy.special import erf

# Supported pulse envelopes, all compactly supported on [c - t0/2, c + t0/2] with unit area.
#
# - "box":                 flat 1/t0.
# - "raised-cosine":       (1/t0)(1 + cos(2π(t-c)/t0)), smooth at the edges, peak 2/t0.
# - "truncated-gaussian":  Gaussian with σ = t0/6, cut at ±3σ and renormalized.
PulseShapeName = Literal["box", "raised-cosine", "truncated-gaussian"]

DEFAULT_PULSE_SHAPE: PulseShapeName = "raised-cosine"


class PulseShape(ABC):
    """Envelope f(t) of a single pulse and its running integral F(t) ∈ [0, 1]."""

    name: PulseShapeName

    @abstractmethod
    def _unit_density(self, u: np.ndarray) -> np.ndarray:
        """Density on u = (t - start)/t0 ∈ [0, 1] with unit area."""
        ...

    @abstractmethod
    def _unit_cumulative(self, u: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def unit_peak(self) -> float:
        """sup f · t0."""
        ...

    def density(self, t, center: float, width: float):
        u = (np.asarray(t, dtype=float) - (center - width / 2.0)) / width
        inside = (u >= 0.0) & (u <= 1.0)
        val = np.where(inside, self._unit_density(np.clip(u, 0.0, 1.0)), 0.0) / width
        return float(val) if np.ndim(val) == 0 else val

    def cumulative(self, t, center: float, width: float):
        u = (np.asarray(t, dtype=float) - (center - width / 2.0)) / width
        val = np.where(u <= 0.0, 0.0, np.where(u >= 1.0, 1.0, self._unit_cumulative(np.clip(u, 0.0, 1.0))))
        return float(val) if np.ndim(val) == 0 else val

    def peak(self, width: float) -> float:
        return self.unit_peak() / width


class BoxShape(PulseShape):
    name = "box"

    def _unit_density(self, u):
        return np.ones_like(u)

    def _unit_cumulative(self, u):
        return u

    def unit_peak(self) -> float:
        return 1.0


class RaisedCosineShape(PulseShape):
    name = "raised-cosine"

    def _unit_density(self, u):
        return 1.0 - np.cos(2.0 * np.pi * u)

    def _unit_cumulative(self, u):
        return u - np.sin(2.0 * np.pi * u) / (2.0 * np.pi)

    def unit_peak(self) -> float:
        return 2.0


class TruncatedGaussianShape(PulseShape):
    name = "truncated-gaussian"
    CUT = 3.0  # half-width in units of σ

    def _unit_density(self, u):
        z = (u - 0.5) * 2.0 * self.CUT
        norm = np.sqrt(2.0 * np.pi) * erf(self.CUT / np.sqrt(2.0)) / (2.0 * self.CUT)
        return np.exp(-0.5 * z * z) / norm

    def _unit_cumulative(self, u):
        z = (u - 0.5) * 2.0 * self.CUT
        edge = erf(self.CUT / np.sqrt(2.0))
        return (erf(z / np.sqrt(2.0)) + edge) / (2.0 * edge)

    def unit_peak(self) -> float:
        return float(2.0 * self.CUT / (np.sqrt(2.0 * np.pi) * erf(self.CUT / np.sqrt(2.0))))


_SHAPE_BY_KEY: Final[Mapping[str, type[PulseShape]]] = {
    "box": BoxShape,
    "raised-cosine": RaisedCosineShape,
    "truncated-gaussian": TruncatedGaussianShape,
}


def build_shape(name: PulseShapeName = DEFAULT_PULSE_SHAPE) -> PulseShape:
    cls = _SHAPE_BY_KEY.get(name)
    if cls is None:
        raise ValueError(f"Unsupported pulse shape: {name}")
    return cls()
