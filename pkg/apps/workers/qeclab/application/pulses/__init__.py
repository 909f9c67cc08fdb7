from qeclab.application.pulses.grid import TimeGrid, build_time_grid
from qeclab.application.pulses.schedule import (
    DEFAULT_SPEED_CONSTANT,
    Pulse,
    Schedule,
    SpeedReport,
    check_speed_constraint,
    compile_circuit,
    delta_limit_schedule,
    evaluate_hamiltonian,
)
from qeclab.application.pulses.shapes import DEFAULT_PULSE_SHAPE, PulseShapeName, build_shape

__all__ = [
    "DEFAULT_PULSE_SHAPE",
    "DEFAULT_SPEED_CONSTANT",
    "Pulse",
    "PulseShapeName",
    "Schedule",
    "SpeedReport",
    "TimeGrid",
    "build_shape",
    "build_time_grid",
    "check_speed_constraint",
    "compile_circuit",
    "delta_limit_schedule",
    "evaluate_hamiltonian",
]
