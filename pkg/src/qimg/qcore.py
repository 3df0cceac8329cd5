"""Dense statevector simulator.

Basis labels are big-endian: qubit 0 is the most significant bit of the
amplitude index, so ``|c y x>`` with ``c`` on qubit 0 lives at index
``c * 4 + y * 2 + x``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, ValidationError

MAX_QUBITS = 26
NORM_TOL = 1e-9

_SQRT1_2 = 1 / math.sqrt(2)
_H = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)


class GateKind(str, Enum):
    H = "H"
    X = "X"
    CNOT = "CNOT"
    MCX = "MCX"
    MCRY = "MCRY"


def ry_matrix(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


@dataclass(frozen=True)
class Gate:
    """One operation of the gate IR.

    ``controls`` holds ``(qubit, polarity)`` pairs; polarity 1 fires on
    ``|1>``, polarity 0 on ``|0>``. ``classical`` is the value of a
    classical control bit (a CNOT driven by a classical wire); a gate with
    ``classical == 0`` acts as the identity.
    """

    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    angle: float | None = None
    classical: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        object.__setattr__(
            self, "controls", tuple((int(q), int(p)) for q, p in self.controls)
        )
        if len(self.targets) != 1:
            raise ValidationError(f"{self.kind.value} takes exactly one target")
        for _, pol in self.controls:
            if pol not in (0, 1):
                raise ValidationError(f"control polarity must be 0 or 1, got {pol}")
        qubits = [q for q, _ in self.controls]
        if len(set(qubits)) != len(qubits):
            raise ValidationError("duplicate control qubit")
        if self.targets[0] in qubits:
            raise ValidationError("target and control qubits overlap")
        if self.kind is GateKind.MCRY:
            if self.angle is None or not math.isfinite(self.angle):
                raise ValidationError("MCRY needs a finite angle")
        elif self.angle is not None:
            raise ValidationError(f"{self.kind.value} takes no angle")
        if self.kind in (GateKind.H, GateKind.X) and self.controls:
            raise ValidationError(f"{self.kind.value} takes no controls")
        if self.kind is GateKind.CNOT:
            if self.classical is None and len(self.controls) != 1:
                raise ValidationError("CNOT needs exactly one control")
            if self.classical is not None and self.controls:
                raise ValidationError("classically controlled CNOT takes no quantum control")
        if self.classical is not None:
            if self.kind is not GateKind.CNOT:
                raise ValidationError("only CNOT may carry a classical control")
            if self.classical not in (0, 1):
                raise ValidationError("classical control bit must be 0 or 1")

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls) + self.targets

    def validate(self, num_qubits: int) -> None:
        for q in self.qubits:
            if not 0 <= q < num_qubits:
                raise ValidationError(
                    f"qubit index {q} out of range for {num_qubits} qubits"
                )

    def matrix(self) -> np.ndarray:
        """2x2 unitary applied to the target when the controls fire."""
        if self.kind is GateKind.H:
            return _H
        if self.kind is GateKind.MCRY:
            return ry_matrix(self.angle)
        return np.array([[0, 1], [1, 0]], dtype=complex)


def h(q: int) -> Gate:
    return Gate(GateKind.H, (q,))


def x(q: int) -> Gate:
    return Gate(GateKind.X, (q,))


def cnot(control: int, target: int, polarity: int = 1) -> Gate:
    return Gate(GateKind.CNOT, (target,), ((control, polarity),))


def classical_cnot(bit: int, target: int) -> Gate:
    return Gate(GateKind.CNOT, (target,), classical=bit)


def mcx(controls: Iterable[tuple[int, int]], target: int) -> Gate:
    return Gate(GateKind.MCX, (target,), tuple(controls))


def mcry(angle: float, controls: Iterable[tuple[int, int]], target: int) -> Gate:
    return Gate(GateKind.MCRY, (target,), tuple(controls), angle=float(angle))


def pattern_controls(qubits: Sequence[int], value: int) -> tuple[tuple[int, int], ...]:
    """Controls that fire only when ``qubits`` (MSB first) read ``value``."""
    k = len(qubits)
    return tuple((q, (value >> (k - 1 - j)) & 1) for j, q in enumerate(qubits))


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        if not 0 <= self.num_qubits <= MAX_QUBITS:
            raise CapacityError(
                f"{self.num_qubits} qubits outside supported range 0..{MAX_QUBITS}"
            )
        for g in self.gates:
            g.validate(self.num_qubits)

    def append(self, gate: Gate) -> "Circuit":
        gate.validate(self.num_qubits)
        self.gates.append(gate)
        return self

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized amplitudes of an n-qubit register."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        size = amps.size
        if size < 1 or size & (size - 1):
            raise ValidationError(f"amplitude count {size} is not a power of two")
        if size.bit_length() - 1 > MAX_QUBITS:
            raise CapacityError(f"state exceeds {MAX_QUBITS} qubits")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1) > NORM_TOL:
            raise ValidationError(f"state is not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def num_qubits(self) -> int:
        return self.amps.size.bit_length() - 1

    def __len__(self) -> int:
        return self.amps.size

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def new_zero_state(n: int) -> StateVector:
    if n < 0:
        raise ValidationError("qubit count must be nonnegative")
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = 1
    return StateVector(amps)


def basis_state(n: int, index: int) -> StateVector:
    if n > MAX_QUBITS:
        raise CapacityError(f"{n} qubits exceeds the cap of {MAX_QUBITS}")
    if not 0 <= index < 1 << n:
        raise ValidationError(f"basis index {index} out of range for {n} qubits")
    amps = np.zeros(1 << n, dtype=complex)
    amps[index] = 1
    return StateVector(amps)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    n = state.num_qubits
    gate.validate(n)
    psi = state.amps.reshape((2,) * n).copy()
    if gate.classical == 0:
        return StateVector(psi.reshape(-1))

    index: list = [slice(None)] * n
    for q, pol in gate.controls:
        index[q] = pol
    target = gate.targets[0]
    # integer indices drop their axes, shifting the target axis left
    axis = target - sum(1 for q, _ in gate.controls if q < target)
    sub = psi[tuple(index)]

    lo = [slice(None)] * sub.ndim
    hi = [slice(None)] * sub.ndim
    lo[axis], hi[axis] = 0, 1
    lo, hi = tuple(lo), tuple(hi)
    a0, a1 = sub[lo].copy(), sub[hi].copy()
    if gate.kind in (GateKind.X, GateKind.CNOT, GateKind.MCX):
        sub[lo], sub[hi] = a1, a0
    else:
        m = gate.matrix()
        sub[lo] = m[0, 0] * a0 + m[0, 1] * a1
        sub[hi] = m[1, 0] * a0 + m[1, 1] * a1
    return StateVector(psi.reshape(-1))


def run_circuit(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    if initial is None:
        initial = new_zero_state(circuit.num_qubits)
    if initial.num_qubits != circuit.num_qubits:
        raise ValidationError(
            f"state has {initial.num_qubits} qubits, circuit has {circuit.num_qubits}"
        )
    state = initial
    for gate in circuit.gates:
        state = apply_gate(state, gate)
    return state


def born_probabilities(state: StateVector) -> np.ndarray:
    amps = state.amps
    return amps.real**2 + amps.imag**2


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float


def bloch_angles(state: StateVector) -> BlochAngles:
    """Polar and azimuthal angle of a single-qubit state.

    The global phase is fixed by rotating ``amp[0]`` onto the nonnegative
    real axis. When ``amp[0]`` vanishes the state is the south pole and
    ``phi`` is reported as 0.
    """
    if state.num_qubits != 1:
        raise ValidationError("bloch_angles needs a single-qubit state")
    a, b = state.amps
    if abs(a) < 1e-15:
        return BlochAngles(math.pi, 0.0)
    b = b * abs(a) / a
    theta = 2 * math.atan2(abs(b), abs(a))
    phi = math.atan2(b.imag, b.real) % (2 * math.pi) if abs(b) > 1e-15 else 0.0
    if phi >= 2 * math.pi:
        phi = 0.0
    return BlochAngles(theta, phi)


def bloch_state(theta: float, phi: float) -> StateVector:
    """Inverse of :func:`bloch_angles`."""
    return StateVector(
        [math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)]
    )
