"""Finite-shot sampling and a trajectory-based noise model.

Gate noise is unravelled into pure-state trajectories: after every gate a
random Pauli hits one of the gate's qubits with the depolarizing
probability. Each shot is one trajectory, seeded from ``(seed, shot)`` so
that histograms do not depend on evaluation order.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .qcore import (
    Circuit,
    StateVector,
    apply_gate,
    born_probabilities,
    new_zero_state,
    run_circuit,
)

DEFAULT_SHOTS = 8192

_PAULIS = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class NoiseModel:
    readout_flip: float = 0.0
    depolarizing: float = 0.0

    def __post_init__(self):
        for name in ("readout_flip", "depolarizing"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")


@dataclass
class Histogram:
    shots: int
    num_qubits: int
    counts: dict[str, int]

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValidationError("histogram counts do not sum to the shot count")

    @classmethod
    def from_outcomes(cls, outcomes: np.ndarray, num_qubits: int) -> "Histogram":
        idx, cnt = np.unique(outcomes, return_counts=True)
        counts = {format(int(i), f"0{num_qubits}b") if num_qubits else "": int(c)
                  for i, c in zip(idx, cnt)}
        return cls(int(outcomes.size), num_qubits, counts)

    def count(self, bitstring: str) -> int:
        return self.counts.get(bitstring, 0)

    def frequencies(self) -> np.ndarray:
        f = np.zeros(1 << self.num_qubits)
        for k, v in self.counts.items():
            f[int(k, 2) if k else 0] = v
        return f / self.shots

    def modal(self) -> str:
        return max(sorted(self.counts), key=self.counts.__getitem__)

    def to_json_obj(self) -> dict:
        return {"shots": self.shots, "num_qubits": self.num_qubits,
                "counts": dict(sorted(self.counts.items()))}

    def to_json(self) -> str:
        return json.dumps({"schema": 1, **self.to_json_obj()}, sort_keys=True)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bitstring", "count"])
        for k, v in sorted(self.counts.items()):
            w.writerow([k, v])
        return buf.getvalue()


def _draw(probs: np.ndarray, size, rng: np.random.Generator) -> np.ndarray:
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), probs.size - 1)


def sample_shots(state: StateVector, shots: int = DEFAULT_SHOTS, seed: int = 0) -> Histogram:
    if shots < 1:
        raise ValidationError("shots must be at least 1")
    rng = np.random.default_rng(seed)
    outcomes = _draw(born_probabilities(state), shots, rng)
    return Histogram.from_outcomes(outcomes, state.num_qubits)


def _flip_readout(outcomes: np.ndarray, n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    if p == 0 or n == 0:
        return outcomes
    flips = rng.random((outcomes.size, n)) < p
    weights = 1 << np.arange(n - 1, -1, -1)
    return outcomes ^ (flips.astype(np.int64) @ weights)


def _apply_pauli(amps: np.ndarray, n: int, qubit: int, pauli: str) -> np.ndarray:
    psi = np.moveaxis(amps.reshape((2,) * n), qubit, 0)
    psi = np.tensordot(_PAULIS[pauli], psi, axes=([1], [0]))
    return np.moveaxis(psi, 0, qubit).reshape(-1)


def _trajectory(circuit: Circuit, initial: StateVector, p: float, rng) -> np.ndarray | None:
    """Amplitudes of one noisy trajectory, or None if no error fired."""
    events = []
    for k, gate in enumerate(circuit.gates):
        if rng.random() < p:
            qs = gate.qubits
            events.append((k, qs[rng.integers(len(qs))], "XYZ"[rng.integers(3)]))
    if not events:
        return None
    n = circuit.num_qubits
    state = initial
    pending = iter(events)
    nxt = next(pending, None)
    for k, gate in enumerate(circuit.gates):
        state = apply_gate(state, gate)
        while nxt is not None and nxt[0] == k:
            state = StateVector(_apply_pauli(state.amps, n, nxt[1], nxt[2]))
            nxt = next(pending, None)
    return state.amps


def run_noisy(
    circuit: Circuit,
    model: NoiseModel,
    shots: int = DEFAULT_SHOTS,
    seed: int = 0,
    initial: StateVector | None = None,
) -> Histogram:
    if shots < 1:
        raise ValidationError("shots must be at least 1")
    n = circuit.num_qubits
    initial = new_zero_state(n) if initial is None else initial
    ideal = run_circuit(circuit, initial)
    readout_rng = np.random.default_rng([seed, 1 << 32])

    if model.depolarizing == 0:
        outcomes = _draw(born_probabilities(ideal), shots, np.random.default_rng(seed))
    else:
        base = born_probabilities(ideal)
        outcomes = np.empty(shots, dtype=np.int64)
        for i in range(shots):
            rng = np.random.default_rng([seed, i])
            amps = _trajectory(circuit, initial, model.depolarizing, rng)
            probs = base if amps is None else amps.real**2 + amps.imag**2
            outcomes[i] = _draw(probs, 1, rng)[0]
    outcomes = _flip_readout(outcomes, n, model.readout_flip, readout_rng)
    return Histogram.from_outcomes(outcomes, n)


def total_variation(hist: Histogram, probs: np.ndarray) -> float:
    return float(0.5 * np.abs(hist.frequencies() - probs).sum())


def forbidden_bins(probs: np.ndarray, tol: float = 1e-12) -> list[str]:
    """Outcomes that an ideal run can never produce."""
    n = probs.size.bit_length() - 1
    return [format(i, f"0{n}b") for i in np.flatnonzero(probs <= tol)]


def forbidden_report(hist: Histogram, probs: np.ndarray) -> dict:
    bins = forbidden_bins(probs)
    counts = {b: hist.count(b) for b in bins}
    return {
        "bins": counts,
        "occupied": sum(1 for c in counts.values() if c > 0),
        "mass": sum(counts.values()) / hist.shots,
    }
