"""
Desk-scale presets: repetition-3 (2 ancillas for syndrome extraction) and perfect-5
(4 ancillas), λ² in {0.05, 0.1, 0.2}, t0 between 0.01 and 0.2, τ = 1.
"""
from __future__ import annotations

import copy
from typing import Final, Mapping

from qeclab.application.experiments.config import ExperimentConfig
from qeclab.domain.errors import ConfigError

_PRESETS: Final[Mapping[str, dict]] = {
    "uncorrected-qubit": {
        "kind": "uncorrected",
        "code": "repetition-1",
        "lambdaSq": 1.0,
        "tClock": 1.0,
        "T": 3,
    },
    "repetition3-discrete": {
        "kind": "discrete-cycle",
        "code": "repetition-3",
        "recoveryStyle": "syndrome-correct",
        "noise": "bit-flip",
        "flipProbability": 0.01,
        "TGrid": [1, 5, 10, 20],
        "samples": ["0L", "1L"],
    },
    "perfect5-discrete": {
        "kind": "discrete-cycle",
        "code": "perfect-5",
        "recoveryStyle": "syndrome-correct",
        "lambdaSq": 0.1,
        "tClock": 0.1,
        "TGrid": [1, 5, 10, 20],
    },
    "repetition3-continuous": {
        "kind": "continuous-cycle",
        "code": "repetition-3",
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.1,
        "t0": 0.05,
        "tau": 1.0,
    },
    "perfect5-continuous": {
        "kind": "continuous-cycle",
        "code": "perfect-5",
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.1,
        "t0": 0.1,
        "tau": 1.0,
    },
    "repetition3-t0-sweep": {
        "kind": "t0-sweep",
        "code": "repetition-3",
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.1,
        "t0Grid": [0.2, 0.1, 0.05, 0.025, 0.01],
        "tau": 1.0,
    },
    "perfect5-lambda-sweep": {
        "kind": "lambda-sweep",
        "code": "perfect-5",
        "recoveryStyle": "decode-reencode",
        "lambdaGrid": [0.05, 0.1, 0.2],
        "t0": 0.1,
        "tau": 1.0,
    },
    "repetition-M-sweep": {
        "kind": "M-sweep",
        "codeGrid": ["repetition-1", "repetition-2", "repetition-3", "repetition-4", "repetition-5"],
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.1,
        "t0": 0.05,
        "tau": 1.0,
    },
    "ceiling-saturation": {
        "kind": "lambda-sweep",
        "code": "repetition-3",
        "recoveryStyle": "decode-reencode",
        "lambdaGrid": [0.1, 10.0, 100.0],
        "t0": 0.05,
        "tau": 1.0,
    },
    "repetition3-dyson-validate": {
        "kind": "dyson-validate",
        "code": "repetition-3",
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.05,
        "t0": 0.1,
        "tau": 1.0,
        "integrator": {"stepSize": 0.002},
    },
    "repetition3-delta-limit": {
        "kind": "delta-limit",
        "code": "repetition-3",
        "recoveryStyle": "syndrome-correct",
        "lambdaSq": 0.1,
        "t0Grid": [0.2, 0.1, 0.05, 0.025, 0.0125],
        "tau": 1.0,
    },
    "repetition3-total-fidelity": {
        "kind": "total-fidelity",
        "code": "repetition-3",
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.05,
        "t0": 0.05,
        "backToBack": True,
        "T": 10,
        "samples": ["0L", "+L"],
    },
}

PRESET_NAMES: Final[tuple[str, ...]] = tuple(_PRESETS)


def preset_data(name: str) -> dict:
    """Raw camelCase JSON document of a preset."""
    data = _PRESETS.get(name)
    if data is None:
        raise ConfigError(f"Unknown preset: {name} (available: {', '.join(PRESET_NAMES)})")
    return copy.deepcopy(data)


def preset_config(name: str) -> ExperimentConfig:
    return ExperimentConfig.model_validate(preset_data(name))
