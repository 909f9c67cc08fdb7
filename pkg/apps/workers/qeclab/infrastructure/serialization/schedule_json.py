"""
JSON form of a compiled pulse schedule.
Every pulse carries {shape, center, width, sites, generator}; the generator is a row-major
list of [re, im] pairs. Named gates add a `gate` label (and `ctrl`), which only restores
the gate on load; the generator is always read back as written.
"""
from __future__ import annotations

import json

import numpy as np

from qeclab.application.codes.gates import Gate
from qeclab.application.pulses.schedule import Pulse, Schedule
from qeclab.domain.errors import ConfigError
from qeclab.domain.values import HilbertLayout

SCHEDULE_SCHEMA_VERSION = 1


def _generator_to_pairs(g: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in g.reshape(-1)]


def _generator_from_pairs(pairs: list, n_sites: int) -> np.ndarray:
    d = 2 ** n_sites
    arr = np.asarray(pairs, dtype=float)
    if arr.shape != (d * d, 2):
        raise ConfigError(f"malformed schedule document: generator holds {arr.shape}, expected ({d * d}, 2)")
    g = np.empty(d * d, dtype=complex)
    g.real, g.imag = arr[:, 0], arr[:, 1]
    return g.reshape(d, d)


def _pulse_to_dict(p: Pulse) -> dict:
    out = {
        "shape": p.shape,
        "center": p.center,
        "width": p.width,
        "sites": list(p.sites),
        "generator": _generator_to_pairs(p.generator),
    }
    if p.gate is not None and p.gate.name != "U":
        out["gate"] = p.gate.name
        if p.gate.ctrl is not None:
            out["ctrl"] = p.gate.ctrl
    return out


def schedule_to_dict(schedule: Schedule) -> dict:
    return {
        "schema": SCHEDULE_SCHEMA_VERSION,
        "tau": schedule.tau,
        "t0Min": schedule.t0_min,
        "layout": {"register": schedule.layout.register_qubits, "ancilla": schedule.layout.ancilla_qubits},
        "pulses": [_pulse_to_dict(p) for p in schedule.pulses],
    }


def _pulse_from_dict(d: dict) -> Pulse:
    sites = tuple(int(q) for q in d["sites"])
    generator = _generator_from_pairs(d["generator"], len(sites))
    gate = Gate(d["gate"], sites, ctrl=d.get("ctrl")) if "gate" in d else None
    return Pulse(d["shape"], float(d["center"]), float(d["width"]), sites, generator, gate)


def schedule_from_dict(d: dict) -> Schedule:
    if d.get("schema") != SCHEDULE_SCHEMA_VERSION:
        raise ConfigError(f"unsupported schedule schema {d.get('schema')!r}")
    try:
        layout = HilbertLayout(int(d["layout"]["register"]), int(d["layout"]["ancilla"]))
        pulses = tuple(_pulse_from_dict(p) for p in d["pulses"])
        return Schedule(pulses, float(d["tau"]), float(d["t0Min"]), layout)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"malformed schedule document: {e}") from e


def dump_schedule(schedule: Schedule) -> str:
    return json.dumps(schedule_to_dict(schedule), indent=2) + "\n"


def load_schedule(text: str) -> Schedule:
    try:
        return schedule_from_dict(json.loads(text))
    except json.JSONDecodeError as e:
        raise ConfigError(f"schedule parse error at line {e.lineno} column {e.colno}: {e.msg}") from e
