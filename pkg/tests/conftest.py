"""Pytest configuration and fixtures."""

import numpy as np
import pytest

from qeclab.application.codes.factory import build_code, build_recovery
from qeclab.application.experiments.presets import preset_data
from qeclab.application.use_cases.run_experiment import RunExperimentUseCase
from qeclab.domain.values import HilbertLayout
from qeclab.infrastructure.output.file_sink import FileArtifactSink
from qeclab.infrastructure.pool.runners import SerialRunner


@pytest.fixture
def rng():
    """Seeded generator for random states and matrices."""
    return np.random.default_rng(1234)


@pytest.fixture
def random_density(rng):
    """Factory: random full-rank density matrix on n qubits."""
    def make(n: int) -> np.ndarray:
        d = 2 ** n
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        rho = a @ a.conj().T
        return rho / np.trace(rho)
    return make


@pytest.fixture
def rep3():
    """Three-qubit bit-flip repetition code."""
    return build_code("repetition-3")


@pytest.fixture
def perfect5():
    """Five-qubit perfect code."""
    return build_code("perfect-5")


@pytest.fixture
def rep3_syndrome(rep3):
    """Coherent syndrome-correct recovery for repetition-3 (two ancillas)."""
    return build_recovery(rep3, "syndrome-correct")


@pytest.fixture
def rep3_decode(rep3):
    """Decode-reencode recovery for repetition-3 (no ancillas)."""
    return build_recovery(rep3, "decode-reencode")


@pytest.fixture
def single_qubit():
    return HilbertLayout(1)


@pytest.fixture
def serial_runner():
    return SerialRunner()


@pytest.fixture
def use_case(tmp_path, serial_runner):
    """Run-experiment use case writing under a temporary `runs/` directory."""
    return RunExperimentUseCase(
        make_sink=FileArtifactSink,
        runner=serial_runner,
        base_dir=str(tmp_path / "runs"),
    )


@pytest.fixture
def continuous_doc():
    """Small continuous-cycle config: repetition-3 decode-reencode, one narrow pulse layer per CNOT."""
    return {
        "kind": "continuous-cycle",
        "code": "repetition-3",
        "recoveryStyle": "decode-reencode",
        "lambdaSq": 0.1,
        "t0": 0.1,
        "tau": 1.0,
        "samples": ["0L", "+L"],
    }


@pytest.fixture
def uncorrected_doc():
    return preset_data("uncorrected-qubit")
