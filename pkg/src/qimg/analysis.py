"""CBS audits, reduced density matrices and outcome tables."""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .encoders import EncodingResult, Technique, gqir_position, _packed_colors
from .errors import SelectionError, ValidationError
from .qcore import Circuit, StateVector, born_probabilities

DEFAULT_CBS_TOL = 1e-9
SHOT_CBS_TOL = 0.02


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] & (m.shape[0] - 1):
            raise ValidationError("density matrix must be square with power-of-two size")
        if not np.allclose(m, m.conj().T, atol=1e-9):
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > 1e-9:
            raise ValidationError("density matrix trace is not 1")
        if np.linalg.eigvalsh(m).min() < -1e-9:
            raise ValidationError("density matrix is not positive semidefinite")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def diagonal(self) -> np.ndarray:
        return self.matrix.diagonal().real.copy()


def _check_qubits(state: StateVector, qubits: Sequence[int]) -> list[int]:
    qs = [int(q) for q in qubits]
    n = state.num_qubits
    for q in qs:
        if not 0 <= q < n:
            raise ValidationError(f"qubit {q} out of range for {n} qubits")
    if len(set(qs)) != len(qs):
        raise ValidationError("duplicate qubit index")
    return qs


def partial_trace(state: StateVector, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix of ``keep`` (in the given order, first = MSB)."""
    keep = _check_qubits(state, keep)
    if not keep:
        raise ValidationError("keep must name at least one qubit")
    n = state.num_qubits
    rest = [q for q in range(n) if q not in keep]
    psi = state.amps.reshape((2,) * n).transpose(keep + rest)
    psi = psi.reshape(1 << len(keep), -1)
    return DensityMatrix(psi @ psi.conj().T)


@dataclass(frozen=True)
class CbsVerdict:
    is_cbs: bool
    basis_index: int | None
    max_off_support: float


def is_cbs_register(state: StateVector, tol: float = DEFAULT_CBS_TOL) -> CbsVerdict:
    p = born_probabilities(state)
    k = int(np.argmax(p))
    others = np.delete(p, k)
    off = float(others.max()) if others.size else 0.0
    if p[k] >= 1 - tol:
        return CbsVerdict(True, k, off)
    return CbsVerdict(False, None, off)


def is_cbs_qubit(rho: DensityMatrix, tol: float = DEFAULT_CBS_TOL) -> bool:
    m = rho.matrix
    if m.shape != (2, 2):
        raise ValidationError("is_cbs_qubit needs a 2x2 density matrix")
    for target in (np.diag([1, 0]), np.diag([0, 1])):
        if np.max(np.abs(m - target)) <= tol:
            return True
    return False


def marginal_p1(state: StateVector, qubit: int) -> float:
    (q,) = _check_qubits(state, [qubit])
    n = state.num_qubits
    p = born_probabilities(state).reshape((2,) * n)
    return float(np.take(p, 1, axis=q).sum())


def marginals(state: StateVector) -> list[float]:
    return [marginal_p1(state, q) for q in range(state.num_qubits)]


def post_select(
    state: StateVector, qubits: Sequence[int], bits: Sequence[int] | str
) -> tuple[StateVector, float]:
    qs = _check_qubits(state, qubits)
    if isinstance(bits, str):
        bits = [int(b) for b in bits]
    if len(bits) != len(qs):
        raise ValidationError("one bit per selected qubit required")
    n = state.num_qubits
    psi = state.amps.reshape((2,) * n)
    mask = np.zeros((2,) * n, dtype=bool)
    index: list = [slice(None)] * n
    for q, b in zip(qs, bits):
        if b not in (0, 1):
            raise ValidationError("selection bits must be 0 or 1")
        index[q] = b
    mask[tuple(index)] = True
    kept = np.where(mask, psi, 0).reshape(-1)
    prob = float(np.vdot(kept, kept).real)
    if prob <= 1e-15:
        pattern = "".join(map(str, bits))
        raise SelectionError(f"pattern {pattern} on qubits {qs} has zero probability")
    return StateVector(kept / math.sqrt(prob)), prob


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValidationError("fidelity needs states of equal dimension")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))


def align_phase(state: StateVector) -> np.ndarray:
    """Amplitudes rotated so the largest-magnitude entry is real positive."""
    amps = state.amps
    k = int(np.argmax(np.abs(amps)))
    return amps * (abs(amps[k]) / amps[k])


def equal_up_to_phase(a: StateVector, b: StateVector, atol: float = 1e-9) -> bool:
    if a.num_qubits != b.num_qubits:
        return False
    return bool(np.allclose(align_phase(a), align_phase(b), rtol=0, atol=atol))


def bits_of(index: int, width: int) -> str:
    return format(index, f"0{width}b") if width else ""


# -- outcome tables ---------------------------------------------------------


@dataclass
class OutcomeRow:
    position: str
    expected_color: str
    marginals: list[float]
    selected_color: str | None
    probability: float


@dataclass
class OutcomeTable:
    technique: Technique
    position_labels: list[str]
    color_labels: list[str]
    qubit_labels: list[str]
    rows: list[OutcomeRow] = field(default_factory=list)

    def to_records(self) -> list[dict]:
        return [
            {
                "position": r.position,
                "expected_color": r.expected_color,
                "selected_color": r.selected_color,
                "probability": r.probability,
                "marginals": dict(zip(self.qubit_labels, r.marginals)),
            }
            for r in self.rows
        ]

    def to_json_obj(self) -> dict:
        return {
            "technique": self.technique.value,
            "position_labels": self.position_labels,
            "color_labels": self.color_labels,
            "rows": self.to_records(),
        }

    def to_csv(self, kind: str = "colors") -> str:
        """``colors`` gives one column per color bit of the post-selected
        register; ``marginals`` gives P(|1>) of every qubit of the full state."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        if kind == "colors":
            w.writerow(["in_" + l for l in self.position_labels]
                       + self.position_labels + self.color_labels + ["expected_match"])
            for r in self.rows:
                sel = r.selected_color or "?" * len(self.color_labels)
                w.writerow(list(r.position) + list(r.position) + list(sel)
                           + [int(sel == r.expected_color)])
        elif kind == "marginals":
            w.writerow(["in_" + l for l in self.position_labels]
                       + [f"P1_{l}" for l in self.qubit_labels])
            for r in self.rows:
                w.writerow(list(r.position) + [format_prob(p) for p in r.marginals])
        else:
            raise ValidationError(f"unknown table kind {kind!r}")
        return buf.getvalue()


def format_prob(p: float, digits: int = 4) -> str:
    s = f"{p:.{digits}f}"
    return "0.0000" if s == "-0.0000" else s


def _expected_colors(enc: EncodingResult) -> list[int]:
    """Color of each position pattern, taken from the source image."""
    image = enc.image
    colors, _ = _packed_colors(image)
    grid = colors.reshape(image.height, image.width)
    m = len(enc.layout.position_qubits)
    out = [0] * (1 << m)
    if enc.technique is Technique.NEQR:
        n = m // 2
        for p in range(1 << m):
            out[p] = int(grid[p >> n, p & ((1 << n) - 1)])
        return out
    hq, wq = enc.params["h"], enc.params["w"]
    for y in range(image.height):
        for x in range(image.width):
            out[gqir_position(y, x, hq, wq, enc.params["x_major"])] = int(grid[y, x])
    return out


def outcome_table(enc: EncodingResult, state: StateVector | None = None) -> OutcomeTable:
    """One row per position pattern of an NEQR/GQIR register.

    ``state`` defaults to the encoding's ideal state; pass the executed
    circuit's state to audit the circuit instead.
    """
    if enc.technique not in (Technique.NEQR, Technique.GQIR):
        raise ValidationError("outcome tables exist for NEQR and GQIR only")
    if enc.image is None:
        raise ValidationError("encoding carries no source image")
    state = enc.ideal if state is None else state
    lay = enc.layout
    labels = list(lay.labels)
    pos_q, col_q = list(lay.position_qubits), list(lay.color_qubits)
    full_marg = marginals(state)
    expected = _expected_colors(enc)
    table = OutcomeTable(
        enc.technique,
        [labels[q] for q in pos_q],
        [labels[q] for q in col_q],
        labels,
    )
    for p in range(1 << len(pos_q)):
        pbits = bits_of(p, len(pos_q))
        try:
            sel, prob = post_select(state, pos_q, pbits)
        except SelectionError:
            table.rows.append(OutcomeRow(pbits, bits_of(expected[p], len(col_q)), full_marg, None, 0.0))
            continue
        verdict = is_cbs_register(sel)
        color = None
        if verdict.is_cbs:
            idx = verdict.basis_index
            n = state.num_qubits
            color = "".join(str((idx >> (n - 1 - q)) & 1) for q in col_q)
        table.rows.append(
            OutcomeRow(pbits, bits_of(expected[p], len(col_q)), full_marg, color, prob)
        )
    return table


def angle_outcomes(enc: EncodingResult, state: StateVector | None = None) -> list[float]:
    """Per-position sine-branch amplitude of an FRQI or MCQI register.

    FRQI reports the raw amplitude of ``|1>|i>``, which is
    ``sin(theta_i) / 2**n``. MCQI reports, for each position, the
    root-mean-square over R, G, B of the sine amplitudes of the color
    register post-selected on that position, i.e. ``sin(theta)/2`` for a
    gray pixel.
    """
    state = enc.ideal if state is None else state
    pos_q = list(enc.layout.position_qubits)
    m = len(pos_q)
    if enc.technique is Technique.FRQI:
        return [float(state.amps[(1 << m) | i].real) for i in range(1 << m)]
    if enc.technique is not Technique.MCQI:
        raise ValidationError("angle outcomes exist for FRQI and MCQI only")
    out = []
    for i in range(1 << m):
        sel, _ = post_select(state, pos_q, bits_of(i, m))
        color = sel.amps.reshape(8, -1)[:, i]
        sines = np.abs(color[4:7]) ** 2
        out.append(float(math.sqrt(sines.mean())))
    return out


# -- resources --------------------------------------------------------------


@dataclass(frozen=True)
class ResourceCount:
    qubits: int
    gates: dict
    controls: dict
    classical_controls: int = 0

    def to_json_obj(self) -> dict:
        return {
            "qubits": self.qubits,
            "gates": dict(sorted(self.gates.items())),
            "controls_histogram": {str(k): v for k, v in sorted(self.controls.items())},
            "classical_controls": self.classical_controls,
        }


def resource_count(circuit: Circuit) -> ResourceCount:
    kinds = Counter(g.kind.value for g in circuit.gates)
    ctrl = Counter(len(g.controls) for g in circuit.gates)
    classical = sum(1 for g in circuit.gates if g.classical is not None)
    return ResourceCount(circuit.num_qubits, dict(kinds), dict(ctrl), classical)
