"""
Experiment configuration: one JSON document per run.
- camelCase keys on the wire, snake_case in code (both accepted).
- Field-level checks live here; checks that need a compiled circuit live in `validation.py`.
"""
from __future__ import annotations

import hashlib
import json
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from pydantic.alias_generators import to_camel

from qeclab.application.codes.base import DEFAULT_RECOVERY_STYLE, SAMPLE_LABELS, RecoveryStyle
from qeclab.application.codes.factory import CODE_NAMES
from qeclab.application.continuous.dyson import DEFAULT_TAIL_TOLERANCE
from qeclab.application.continuous.integrator import IntegratorConfig, IntegratorMethod
from qeclab.application.continuous.propagator import DEFAULT_MEMORY_BUDGET_MB
from qeclab.application.pulses.schedule import DEFAULT_SPEED_CONSTANT
from qeclab.application.pulses.shapes import DEFAULT_PULSE_SHAPE, PulseShapeName

ExperimentKind = Literal[
    "uncorrected",
    "discrete-cycle",
    "continuous-cycle",
    "t0-sweep",
    "M-sweep",
    "lambda-sweep",
    "dyson-validate",
    "delta-limit",
    "total-fidelity",
]
NoiseModel = Literal["replacement", "bit-flip"]

DISCRETE_KINDS: tuple[str, ...] = ("uncorrected", "discrete-cycle")
SWEEP_KINDS: tuple[str, ...] = ("t0-sweep", "M-sweep", "lambda-sweep")

# fields that do not change the numbers and stay out of the hash
_UNHASHED_FIELDS = {"output_dir", "name"}


class MyBaseModel(BaseModel):
    """
    Base Pydantic model configured for camelCase I/O (populate_by_name + alias_generator).
    """
    model_config = ConfigDict(
        populate_by_name=True,
        alias_generator=to_camel,
        extra="forbid",
    )


class IntegratorSettings(MyBaseModel):
    step_size: Optional[float] = Field(default=None, gt=0)
    method: IntegratorMethod = "strang"

    def to_config(self, *, keep_states: bool = False) -> IntegratorConfig:
        return IntegratorConfig(step_size=self.step_size, method=self.method, keep_states=keep_states)


class ExperimentConfig(MyBaseModel):
    """
    Everything one run needs. Grids are only read by the kinds that sweep them.
    """
    kind: ExperimentKind
    name: Optional[str] = None

    code: str = "repetition-3"
    recovery_style: RecoveryStyle = DEFAULT_RECOVERY_STYLE
    code_grid: Optional[list[str]] = None

    noise: NoiseModel = "replacement"
    lambda_sq: float = Field(default=0.1, ge=0)
    lambda_grid: Optional[list[float]] = None
    flip_probability: Optional[float] = Field(default=None, ge=0, le=1)
    gate_noise_lambda_sq: float = Field(default=0.0, ge=0)
    t_clock: Optional[float] = Field(default=None, gt=0)

    t0: float = Field(default=0.05, gt=0)
    t0_grid: Optional[list[float]] = None
    t0_min: Optional[float] = Field(default=None, gt=0)
    tau: float = Field(default=1.0, gt=0)
    # pulses abut; the working period becomes depth·t0 and tau is ignored
    back_to_back: bool = False
    T: int = Field(default=1, ge=1, alias="T")
    T_grid: Optional[list[int]] = Field(default=None, alias="TGrid")
    speed_constant: float = Field(default=DEFAULT_SPEED_CONSTANT, gt=0, alias="C")
    shape: PulseShapeName = DEFAULT_PULSE_SHAPE
    integrator: IntegratorSettings = Field(default_factory=IntegratorSettings)

    samples: list[str] = Field(default_factory=lambda: list(SAMPLE_LABELS))
    random_samples: int = Field(default=0, ge=0, le=64)
    seed: Optional[int] = None

    epsilon: Optional[float] = Field(default=None, gt=0, lt=1)
    kappa: float = Field(default=1.0, gt=0)
    dyson_truncation: Optional[int] = Field(default=None, ge=0)
    dyson_tolerance: float = Field(default=DEFAULT_TAIL_TOLERANCE, gt=0)
    memory_budget_mb: float = Field(default=DEFAULT_MEMORY_BUDGET_MB, gt=0)

    output_dir: Optional[str] = None

    # ─── field checks ───────────────────────────────────────────────────────

    @field_validator("code")
    @classmethod
    def _known_code(cls, v: str) -> str:
        if v not in CODE_NAMES:
            raise ValueError(f"unknown code {v!r}; expected one of {', '.join(CODE_NAMES)}")
        return v

    @field_validator("code_grid")
    @classmethod
    def _known_codes(cls, v: Optional[list[str]]) -> Optional[list[str]]:
        if v is None:
            return v
        if not v:
            raise ValueError("codeGrid must not be empty")
        for name in v:
            if name not in CODE_NAMES:
                raise ValueError(f"unknown code {name!r} in codeGrid")
        return v

    @field_validator("t0_grid", "lambda_grid")
    @classmethod
    def _non_empty_grid(cls, v: Optional[list[float]], info) -> Optional[list[float]]:
        if v is None:
            return v
        if not v:
            raise ValueError(f"{info.field_name} must not be empty")
        floor_ok = (lambda x: x > 0) if info.field_name == "t0_grid" else (lambda x: x >= 0)
        for x in v:
            if not floor_ok(x):
                raise ValueError(f"{info.field_name} holds an out-of-range value {x}")
        return v

    @field_validator("T_grid")
    @classmethod
    def _positive_steps(cls, v: Optional[list[int]]) -> Optional[list[int]]:
        if v is not None and (not v or min(v) < 1):
            raise ValueError("TGrid must hold step counts >= 1")
        return v

    @field_validator("samples")
    @classmethod
    def _known_samples(cls, v: list[str]) -> list[str]:
        for label in v:
            if label not in SAMPLE_LABELS:
                raise ValueError(f"unknown sample {label!r}; expected a subset of {', '.join(SAMPLE_LABELS)}")
        if len(set(v)) != len(v):
            raise ValueError("samples must not repeat")
        return v

    @model_validator(mode="after")
    def _kind_requirements(self) -> "ExperimentConfig":
        if self.kind == "t0-sweep" and not self.t0_grid:
            raise ValueError("t0-sweep needs t0Grid")
        if self.kind == "delta-limit" and (not self.t0_grid or len(self.t0_grid) < 2):
            raise ValueError("delta-limit needs a t0Grid of at least two pulse widths")
        if self.kind == "M-sweep" and not self.code_grid:
            raise ValueError("M-sweep needs codeGrid")
        if self.kind == "lambda-sweep" and not self.lambda_grid:
            raise ValueError("lambda-sweep needs lambdaGrid")
        if self.kind == "total-fidelity" and self.T < 2:
            raise ValueError("total-fidelity needs T >= 2 working periods")
        if self.noise == "bit-flip":
            if self.kind not in DISCRETE_KINDS:
                raise ValueError("bit-flip noise is only defined for the discrete kinds")
            if self.flip_probability is None:
                raise ValueError("bit-flip noise needs flipProbability")
        if not self.samples and self.random_samples == 0:
            raise ValueError("no sample states: give samples or randomSamples")
        if self.random_samples and self.seed is None:
            raise ValueError("randomSamples needs a seed")
        return self

    # ─── derived values ─────────────────────────────────────────────────────

    @property
    def clock(self) -> float:
        """Time between discrete recovery steps (τ unless given)."""
        return self.t_clock if self.t_clock is not None else self.tau

    @property
    def t0_values(self) -> list[float]:
        return list(self.t0_grid) if self.t0_grid else [self.t0]

    @property
    def code_values(self) -> list[str]:
        return list(self.code_grid) if self.code_grid else [self.code]

    @property
    def lambda_values(self) -> list[float]:
        return list(self.lambda_grid) if self.lambda_grid else [self.lambda_sq]

    def period(self, depth: int, t0: float) -> float:
        """Working period τ for a circuit of the given depth at pulse width t0."""
        return depth * t0 if self.back_to_back and depth else self.tau

    def speed_limit(self, t0: float) -> float:
        """t0_min for a run at pulse width t0: the configured limit, else the pulse width itself."""
        return self.t0_min if self.t0_min is not None else t0

    def echo(self) -> dict:
        return self.model_dump(mode="json", by_alias=True)

    def config_hash(self) -> str:
        payload = self.model_dump(mode="json", exclude=_UNHASHED_FIELDS)
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]
