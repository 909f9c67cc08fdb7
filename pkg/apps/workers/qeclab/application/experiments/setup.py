"""
Builds the simulation objects an experiment config describes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from qeclab.application.codes.base import Code
from qeclab.application.codes.factory import build_code, build_recovery
from qeclab.application.codes.recovery import RecoveryCircuit
from qeclab.application.experiments.config import ExperimentConfig
from qeclab.application.noise.channels import DiscreteErrorMap
from qeclab.application.noise.replacement import LindbladGenerator, bit_flip_map, register_error_map
from qeclab.application.pulses.schedule import Schedule, compile_circuit
from qeclab.domain.entities import PureState


def sample_states(config: ExperimentConfig, code: Code) -> dict[str, PureState]:
    """Named frame states, then seeded random logical states `rand0`, `rand1`, ..."""
    frame = code.sample_frame()
    out = {label: frame[label] for label in config.samples}
    if config.random_samples:
        rng = np.random.default_rng(config.seed)
        for i in range(config.random_samples):
            v = rng.normal(size=2) + 1j * rng.normal(size=2)
            v = v / np.linalg.norm(v)
            out[f"rand{i}"] = code.encode(complex(v[0]), complex(v[1]))
    return out


def discrete_error_map(config: ExperimentConfig, code: Code, lambda_sq: Optional[float] = None) -> DiscreteErrorMap:
    if config.noise == "bit-flip":
        return bit_flip_map(float(config.flip_probability), code.layout)
    lam = config.lambda_sq if lambda_sq is None else lambda_sq
    return register_error_map(lam, config.clock, code.layout)


def gate_noise_map(config: ExperimentConfig, code: Code) -> Optional[DiscreteErrorMap]:
    if config.gate_noise_lambda_sq == 0.0:
        return None
    return register_error_map(config.gate_noise_lambda_sq, config.clock, code.layout)


@dataclass(frozen=True)
class ContinuousSetup:
    code: Code
    recovery: RecoveryCircuit
    schedule: Schedule
    lindblad: LindbladGenerator
    samples: dict[str, PureState]
    t0: float

    @property
    def M(self) -> int:
        return self.code.n_physical


def continuous_setup(
        config: ExperimentConfig,
        *,
        code_name: Optional[str] = None,
        t0: Optional[float] = None,
        lambda_sq: Optional[float] = None,
) -> ContinuousSetup:
    """One working period: compiled schedule, generator and sample states; overrides serve the sweeps."""
    code = build_code(code_name or config.code)
    recovery = build_recovery(code, config.recovery_style)
    t0 = config.t0 if t0 is None else t0
    tau = config.period(recovery.depth, t0)
    schedule = compile_circuit(recovery, t0, tau, shape=config.shape, t0_min=config.speed_limit(t0))
    lam = config.lambda_sq if lambda_sq is None else lambda_sq
    lindblad = LindbladGenerator(lam, schedule.layout)
    return ContinuousSetup(code, recovery, schedule, lindblad, sample_states(config, code), t0)
