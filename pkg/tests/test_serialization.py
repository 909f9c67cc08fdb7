import json

import numpy as np
import pytest

from qeclab.application.codes.factory import build_code, build_recovery
from qeclab.application.codes.gates import Gate
from qeclab.application.codes.recovery import RecoveryCircuit
from qeclab.application.pulses.schedule import compile_circuit
from qeclab.domain.errors import ConfigError
from qeclab.domain.values import HilbertLayout
from qeclab.infrastructure.output.file_sink import FileArtifactSink, format_cell, read_table
from qeclab.infrastructure.serialization.circuit_text import dump_circuit, parse_circuit
from qeclab.infrastructure.serialization.schedule_json import dump_schedule, load_schedule

CIRCUITS = [
    ("repetition-3", "syndrome-correct"),
    ("repetition-3", "decode-reencode"),
    ("repetition-5", "decode-reencode"),
    ("perfect-5", "syndrome-correct"),
    ("perfect-5", "decode-reencode"),
]


@pytest.mark.parametrize("code_name, style", CIRCUITS)
def test_circuit_text_round_trip(code_name, style):
    circuit = build_recovery(build_code(code_name), style)
    parsed = parse_circuit(dump_circuit(circuit))
    assert parsed.gates == circuit.gates
    assert parsed.layout == circuit.layout
    assert parsed.style == style
    assert parsed.code_name == code_name


def test_circuit_text_format(rep3_syndrome):
    lines = dump_circuit(rep3_syndrome).splitlines()
    assert lines[0] == "# circuit code=repetition-3 register=3 ancilla=2 style=syndrome-correct"
    assert lines[1] == "CNOT 0 3"
    assert lines[5] == "CCX-coherent 3 4 0 ctrl=10"


def test_circuit_text_skips_comments_and_blank_lines():
    text = "# circuit code=repetition-2 register=2 ancilla=0 style=decode-reencode\n\n# decode\nCNOT 0 1\nCNOT 0 1\n"
    circuit = parse_circuit(text)
    assert len(circuit.gates) == 2
    np.testing.assert_allclose(circuit.unitary, np.eye(4))


def test_circuit_text_errors_carry_line_numbers():
    header = "# circuit code=repetition-3 register=3 ancilla=0 style=decode-reencode\n"
    with pytest.raises(ConfigError, match="line 2"):
        parse_circuit(header + "CNOT 0 x\n")
    with pytest.raises(ConfigError, match="line 3"):
        parse_circuit(header + "CNOT 0 1\nTOFFOLI 0 1 2\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_circuit("# circuit code=repetition-3 register=3\n")
    with pytest.raises(ConfigError, match="no '# circuit' header"):
        parse_circuit("CNOT 0 1\n")
    with pytest.raises(ConfigError, match="unknown recovery style"):
        parse_circuit("# circuit code=repetition-3 register=3 ancilla=0 style=measure\n")
    with pytest.raises(ConfigError, match="invalid circuit"):
        parse_circuit(header + "CNOT 0 4\n")


def test_explicit_unitary_has_no_text_form():
    circuit = RecoveryCircuit((Gate("U", (0,), unitary=np.eye(2)),), HilbertLayout(1), "decode-reencode", "x")
    with pytest.raises(ValueError):
        dump_circuit(circuit)


def test_schedule_json_round_trip(rep3_syndrome):
    schedule = compile_circuit(rep3_syndrome, 0.1, 1.0, shape="truncated-gaussian")
    loaded = load_schedule(dump_schedule(schedule))
    assert loaded == schedule
    for a, b in zip(loaded.pulses, schedule.pulses):
        np.testing.assert_array_equal(a.generator, b.generator)


def test_schedule_json_pulse_layout(rep3_syndrome):
    schedule = compile_circuit(rep3_syndrome, 0.1, 1.0)
    doc = json.loads(dump_schedule(schedule))
    first, pulse = doc["pulses"][0], schedule.pulses[0]
    assert set(first) == {"shape", "center", "width", "sites", "generator", "gate"}
    assert first["gate"] == pulse.gate.name
    assert len(first["generator"]) == 16
    flat = pulse.generator.reshape(-1)
    for i, (re, im) in enumerate(first["generator"]):
        assert (re, im) == (flat[i].real, flat[i].imag)
    ccx = next(p for p in doc["pulses"] if p.get("gate") == "CCX-coherent")
    assert ccx["ctrl"] == "10"
    assert len(ccx["generator"]) == 64


def test_schedule_json_explicit_generator():
    u = np.array([[0, 1], [1, 0]], dtype=complex)
    circuit = RecoveryCircuit((Gate("U", (0,), unitary=u),), HilbertLayout(1), "decode-reencode", "x")
    schedule = compile_circuit(circuit, 0.1, 1.0)
    doc = json.loads(dump_schedule(schedule))
    assert set(doc["pulses"][0]) == {"shape", "center", "width", "sites", "generator"}
    loaded = load_schedule(dump_schedule(schedule))
    assert loaded.pulses[0].gate is None
    assert loaded.pulses[0].generator_norm == pytest.approx(np.pi)
    np.testing.assert_array_equal(loaded.pulses[0].generator, schedule.pulses[0].generator)
    np.testing.assert_allclose(loaded.pulses[0].unitary(), u, atol=1e-12)


def test_schedule_json_errors():
    with pytest.raises(ConfigError, match="parse error"):
        load_schedule("{")
    with pytest.raises(ConfigError, match="unsupported schedule schema"):
        load_schedule(json.dumps({"schema": 99}))
    with pytest.raises(ConfigError, match="malformed"):
        load_schedule(json.dumps({"schema": 1, "tau": 1.0}))
    doc = json.loads(dump_schedule(compile_circuit(build_recovery(build_code("repetition-3"), "decode-reencode"), 0.1, 1.0)))
    doc["pulses"][0]["generator"].pop()
    with pytest.raises(ConfigError, match="malformed"):
        load_schedule(json.dumps(doc))


def test_format_cell():
    assert format_cell(True) == "1"
    assert format_cell(np.bool_(False)) == "0"
    assert format_cell(np.int64(7)) == "7"
    assert format_cell(0.1) == "0.1"
    assert format_cell(np.float64(1 / 3)) == repr(1 / 3)
    assert format_cell(None) == ""
    assert format_cell("+L") == "+L"


def test_table_round_trip(tmp_path):
    sink = FileArtifactSink(tmp_path / "out")
    path = sink.write_table("fidelity", ["T", "F"], [(1, 0.99), (2, np.float64(0.98))], "abc123")
    meta, columns, rows = read_table(path)
    assert meta == {"schema": "1", "config_hash": "abc123"}
    assert columns == ["T", "F"]
    assert rows == [["1", "0.99"], ["2", "0.98"]]


def test_json_artifact(tmp_path):
    sink = FileArtifactSink(tmp_path)
    path = sink.write_json("report", {"values": np.array([1.0, 2.0]), "ok": np.bool_(True)}, "h")
    doc = json.loads(path.read_text())
    assert doc == {"configHash": "h", "values": [1.0, 2.0], "ok": True}
