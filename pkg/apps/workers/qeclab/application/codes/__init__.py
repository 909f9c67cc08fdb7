from qeclab.application.codes.base import SAMPLE_LABELS, Code, RecoveryStyle, encode
from qeclab.application.codes.factory import CODE_NAMES, build_code, build_recovery
from qeclab.application.codes.gates import Gate
from qeclab.application.codes.recovery import RecoveryCircuit
from qeclab.application.codes.verify import (
    CorrectionReport,
    ReadoutResult,
    certify_cycle,
    logical_readout,
    verify_correction_property,
)

__all__ = [
    "CODE_NAMES",
    "SAMPLE_LABELS",
    "Code",
    "CorrectionReport",
    "Gate",
    "ReadoutResult",
    "RecoveryCircuit",
    "RecoveryStyle",
    "build_code",
    "build_recovery",
    "certify_cycle",
    "encode",
    "logical_readout",
    "verify_correction_property",
]
