"""Circuit export: lossless JSON gate IR and OpenQASM 3 text.

QASM output lowers every multi-controlled gate to 1- and 2-qubit gates
with the ancilla-free square-root recursion

    C^n(U) = C_{c_n}(V) . C^{n-1}X(c_n) . C_{c_n}(V^-1) . C^{n-1}X(c_n) . C^{n-1}(V)

where V*V = U. Roots of X are written as ``cu`` gates carrying an explicit
global phase so that the controlled version is exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .errors import ValidationError
from .qcore import Circuit, Gate, GateKind

JSON_SCHEMA = 1


def _fmt(v: float) -> str:
    return format(v, ".17g")


def circuit_to_obj(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        d = {"kind": g.kind.value, "targets": list(g.targets),
             "controls": [[q, p] for q, p in g.controls]}
        if g.angle is not None:
            d["angle"] = float(_fmt(g.angle))
        if g.classical is not None:
            d["classical"] = g.classical
        gates.append(d)
    return {"schema": JSON_SCHEMA, "num_qubits": circuit.num_qubits, "gates": gates}


def circuit_to_json(circuit: Circuit) -> str:
    return json.dumps(circuit_to_obj(circuit), indent=1)


def circuit_from_obj(obj: dict) -> Circuit:
    if obj.get("schema") != JSON_SCHEMA:
        raise ValidationError(f"unsupported circuit schema {obj.get('schema')!r}")
    gates = [
        Gate(
            GateKind(d["kind"]),
            tuple(d["targets"]),
            tuple((q, p) for q, p in d.get("controls", [])),
            angle=d.get("angle"),
            classical=d.get("classical"),
        )
        for d in obj["gates"]
    ]
    return Circuit(int(obj["num_qubits"]), gates)


def circuit_from_json(text: str) -> Circuit:
    return circuit_from_obj(json.loads(text))


# -- QASM -------------------------------------------------------------------


@dataclass(frozen=True)
class _Op:
    """A target unitary: X**power (power in (0, 1]) or Ry(angle)."""

    kind: str
    value: float

    def root(self) -> "_Op":
        return _Op(self.kind, self.value / 2)

    def inverse(self) -> "_Op":
        return _Op(self.kind, -self.value)


def _single(op: _Op, t: int) -> list[str]:
    if op.kind == "ry":
        return [f"ry({_fmt(op.value)}) q[{t}];"]
    if op.value == 1:
        return [f"x q[{t}];"]
    raise AssertionError("fractional X only appears under a control")


def _controlled(op: _Op, c: int, t: int) -> list[str]:
    if op.kind == "ry":
        return [f"cry({_fmt(op.value)}) q[{c}], q[{t}];"]
    if op.value == 1:
        return [f"cx q[{c}], q[{t}];"]
    # X**s = exp(i*pi*s/2) * Rx(pi*s) and Rx(a) = U(a, -pi/2, pi/2)
    a = math.pi * op.value
    return [f"cu({_fmt(a)}, {_fmt(-math.pi / 2)}, {_fmt(math.pi / 2)}, {_fmt(a / 2)}) q[{c}], q[{t}];"]


def _multi_controlled(op: _Op, controls: list[int], t: int) -> list[str]:
    if not controls:
        return _single(op, t)
    if len(controls) == 1:
        return _controlled(op, controls[0], t)
    *rest, last = controls
    v = op.root()
    flip = _multi_controlled(_Op("x", 1.0), rest, last)
    return (
        _controlled(v, last, t)
        + flip
        + _controlled(v.inverse(), last, t)
        + flip
        + _multi_controlled(v, rest, t)
    )


def decompose_gate(gate: Gate) -> list[str]:
    """QASM statements for one gate using only 1- and 2-qubit gates."""
    t = gate.targets[0]
    if gate.kind is GateKind.H:
        return [f"h q[{t}];"]
    if gate.classical is not None:
        return [f"if (cbits[{t}]) x q[{t}];"]
    op = _Op("ry", gate.angle) if gate.kind is GateKind.MCRY else _Op("x", 1.0)
    negated = [q for q, p in gate.controls if p == 0]
    wrap = [f"x q[{q}];" for q in negated]
    body = _multi_controlled(op, [q for q, _ in gate.controls], t)
    return wrap + body + wrap


def circuit_to_qasm(circuit: Circuit) -> str:
    n = circuit.num_qubits
    lines = ["OPENQASM 3.0;", 'include "stdgates.inc";', f"qubit[{n}] q;"]
    classical = {g.targets[0]: g.classical for g in circuit.gates if g.classical is not None}
    if classical:
        bits = "".join(str(classical.get(j, 0)) for j in range(n))
        # bit-string literals are little-endian in QASM 3: reverse so cbits[j] = bit j
        lines.append(f'bit[{n}] cbits = "{bits[::-1]}";')
    for g in circuit.gates:
        lines.extend(decompose_gate(g))
    return "\n".join(lines) + "\n"
