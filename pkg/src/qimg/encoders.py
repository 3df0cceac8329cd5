"""Quantum image encoders: FRQI, NEQR, GQIR, MCQI and QBIP.

Every technique is built twice: once as the defining statevector written
down directly from the amplitude law, and once as a gate-level circuit.
The two constructions share nothing but the input, so running the circuit
and comparing against the ideal state is a genuine cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .qcore import (
    MAX_QUBITS,
    Circuit,
    StateVector,
    basis_state,
    classical_cnot,
    h,
    mcry,
    mcx,
    pattern_controls,
)

ANGLE_TOL = 1e-12


class Technique(str, Enum):
    FRQI = "FRQI"
    NEQR = "NEQR"
    GQIR = "GQIR"
    MCQI = "MCQI"
    QBIP = "QBIP"


@dataclass
class QuantumImage:
    """Classical raster image. ``pixels`` has shape (height, width, channels)."""

    width: int
    height: int
    channels: int
    bit_depth: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValidationError("image dimensions must be at least 1x1")
        if self.channels not in (1, 3):
            raise ValidationError(f"channels must be 1 or 3, got {self.channels}")
        if self.bit_depth < 1:
            raise ValidationError("bit depth must be at least 1")
        px = np.asarray(self.pixels, dtype=np.int64)
        try:
            px = px.reshape(self.height, self.width, self.channels)
        except ValueError:
            raise ValidationError(
                f"{px.size} samples do not fit {self.width}x{self.height}x{self.channels}"
            ) from None
        if px.size and (px.min() < 0 or px.max() >= 1 << self.bit_depth):
            raise ValidationError(
                f"pixel values must lie in [0, {(1 << self.bit_depth) - 1}]"
            )
        self.pixels = px

    @classmethod
    def gray(cls, values, width: int, height: int, bit_depth: int = 8) -> "QuantumImage":
        return cls(width, height, 1, bit_depth, np.asarray(values).reshape(height, width, 1))

    @property
    def max_value(self) -> int:
        return (1 << self.bit_depth) - 1

    def flat(self) -> np.ndarray:
        """Row-major pixel list; one row per pixel, one column per channel."""
        return self.pixels.reshape(-1, self.channels)

    def __eq__(self, other):
        if not isinstance(other, QuantumImage):
            return NotImplemented
        return (
            (self.width, self.height, self.channels, self.bit_depth)
            == (other.width, other.height, other.channels, other.bit_depth)
            and np.array_equal(self.pixels, other.pixels)
        )


@dataclass(frozen=True)
class RegisterLayout:
    color_qubits: tuple[int, ...]
    position_qubits: tuple[int, ...]
    labels: tuple[str, ...] = ()

    @property
    def num_qubits(self) -> int:
        return len(self.color_qubits) + len(self.position_qubits)

    def check(self, num_qubits: int) -> None:
        both = set(self.color_qubits) | set(self.position_qubits)
        if set(self.color_qubits) & set(self.position_qubits):
            raise ValidationError("color and position registers overlap")
        if both != set(range(num_qubits)):
            raise ValidationError("layout does not cover the register exactly")


@dataclass
class EncodingResult:
    circuit: Circuit
    ideal: StateVector
    layout: RegisterLayout
    technique: Technique
    image: QuantumImage | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.layout.check(self.circuit.num_qubits)


# -- angles -----------------------------------------------------------------


def pixel_to_angle(p: int, max_value: int) -> float:
    if max_value < 1:
        raise ValidationError("max value must be at least 1")
    if not 0 <= p <= max_value:
        raise ValidationError(f"pixel {p} outside [0, {max_value}]")
    return p / max_value * (math.pi / 2)


def angle_label(p: int, max_value: int) -> str:
    """Exact angle of ``pixel_to_angle`` as a multiple of pi, e.g. ``pi/6``."""
    frac = Fraction(p, 2 * max_value)
    if frac == 0:
        return "0"
    num = "pi" if frac.numerator == 1 else f"{frac.numerator}pi"
    return num if frac.denominator == 1 else f"{num}/{frac.denominator}"


def image_angles(image: QuantumImage) -> np.ndarray:
    """Per-pixel, per-channel angles, shape (pixels, channels)."""
    return image.flat() / image.max_value * (math.pi / 2)


def _check_angles(thetas: np.ndarray) -> None:
    if not np.all(np.isfinite(thetas)):
        raise ValidationError("angles must be finite")
    if thetas.size and (thetas.min() < -ANGLE_TOL or thetas.max() > math.pi / 2 + ANGLE_TOL):
        raise ValidationError("angles must lie in [0, pi/2]")


def _square_exponent(count: int) -> int:
    """n such that count == 4**n."""
    n = (count.bit_length() - 1) // 2
    if count < 1 or 4**n != count:
        raise ValidationError(
            f"{count} pixels is not a 2^n x 2^n image"
        )
    return n


def _side_exponent(image: QuantumImage) -> int:
    side = image.width
    if image.height != side or side & (side - 1):
        raise ValidationError(
            f"{image.width}x{image.height} image is not square with a power-of-two side"
        )
    return side.bit_length() - 1


def _position_labels(prefix: str, bits: int) -> list[str]:
    return [f"{prefix}{k}" for k in range(bits - 1, -1, -1)]


def _check_capacity(total: int) -> None:
    if total > MAX_QUBITS:
        raise ValidationError(f"encoding needs {total} qubits, cap is {MAX_QUBITS}")


# -- FRQI -------------------------------------------------------------------


def frqi_layout(n: int) -> RegisterLayout:
    return RegisterLayout(
        (0,),
        tuple(range(1, 2 * n + 1)),
        ("C", *_position_labels("Y", n), *_position_labels("X", n)),
    )


def frqi_ideal(thetas: Sequence[float]) -> StateVector:
    t = np.asarray(thetas, dtype=float).reshape(-1)
    n = _square_exponent(t.size)
    _check_angles(t)
    amps = np.concatenate([np.cos(t), np.sin(t)]) / 2**n
    return StateVector(amps)


def frqi_circuit(thetas: Sequence[float]) -> Circuit:
    t = np.asarray(thetas, dtype=float).reshape(-1)
    n = _square_exponent(t.size)
    _check_angles(t)
    _check_capacity(2 * n + 1)
    pos = list(range(1, 2 * n + 1))
    circ = Circuit(2 * n + 1)
    for q in pos:
        circ.append(h(q))
    for i, theta in enumerate(t):
        circ.append(mcry(2 * theta, pattern_controls(pos, i), 0))
    return circ


def encode_frqi(image: QuantumImage) -> EncodingResult:
    if image.channels != 1:
        raise ValidationError("FRQI encodes grayscale images only")
    n = _side_exponent(image)
    thetas = image_angles(image)[:, 0]
    return EncodingResult(
        frqi_circuit(thetas), frqi_ideal(thetas), frqi_layout(n), Technique.FRQI,
        image, {"thetas": thetas.tolist()},
    )


# -- NEQR / GQIR ------------------------------------------------------------


def _packed_colors(image: QuantumImage) -> tuple[np.ndarray, int]:
    """Color value per pixel and its width in bits; RGB packs R|G|B."""
    flat = image.flat()
    q = image.bit_depth
    if image.channels == 1:
        return flat[:, 0], q
    r, g, b = flat[:, 0], flat[:, 1], flat[:, 2]
    return (r << (2 * q)) | (g << q) | b, 3 * q


def _color_labels(q: int) -> list[str]:
    return [f"C{k}" for k in range(q - 1, -1, -1)]


def neqr_layout(n: int, q: int) -> RegisterLayout:
    return RegisterLayout(
        tuple(range(q)),
        tuple(range(q, q + 2 * n)),
        (*_color_labels(q), *_position_labels("Y", n), *_position_labels("X", n)),
    )


def neqr_ideal(image: QuantumImage) -> StateVector:
    n = _side_exponent(image)
    colors, q = _packed_colors(image)
    _check_capacity(q + 2 * n)
    amps = np.zeros(1 << (q + 2 * n), dtype=complex)
    positions = np.arange(4**n)
    amps[(colors << (2 * n)) | positions] = 1 / 2**n
    return StateVector(amps)


def _basis_encoding_circuit(
    colors: np.ndarray, q: int, pos: list[int], positions: Sequence[int]
) -> Circuit:
    circ = Circuit(q + len(pos))
    for qb in pos:
        circ.append(h(qb))
    for p, color in zip(positions, colors):
        ctrl = pattern_controls(pos, p)
        for k in range(q - 1, -1, -1):
            if (int(color) >> k) & 1:
                circ.append(mcx(ctrl, q - 1 - k))
    return circ


def neqr_circuit(image: QuantumImage) -> Circuit:
    n = _side_exponent(image)
    colors, q = _packed_colors(image)
    _check_capacity(q + 2 * n)
    pos = list(range(q, q + 2 * n))
    return _basis_encoding_circuit(colors, q, pos, range(4**n))


def encode_neqr(image: QuantumImage) -> EncodingResult:
    n = _side_exponent(image)
    _, q = _packed_colors(image)
    return EncodingResult(
        neqr_circuit(image), neqr_ideal(image), neqr_layout(n, q), Technique.NEQR, image
    )


def gqir_dims(height: int, width: int) -> tuple[int, int]:
    """Qubits on the Y and X axes; a length-1 axis still gets one qubit."""
    if height < 1 or width < 1:
        raise ValidationError("image dimensions must be at least 1")

    def axis(size: int) -> int:
        return 1 if size == 1 else (size - 1).bit_length()

    return axis(height), axis(width)


def gqir_layout(hq: int, wq: int, q: int, x_major: bool = False) -> RegisterLayout:
    ys, xs = _position_labels("Y", hq), _position_labels("X", wq)
    pos_labels = xs + ys if x_major else ys + xs
    return RegisterLayout(
        tuple(range(q)), tuple(range(q, q + hq + wq)), (*_color_labels(q), *pos_labels)
    )


def gqir_position(y: int, x: int, hq: int, wq: int, x_major: bool = False) -> int:
    return (x << hq) | y if x_major else (y << wq) | x


def _gqir_colors(image: QuantumImage, x_major: bool) -> tuple[np.ndarray, int, int, int]:
    """Color of every position pattern (0 outside the image), plus h, w, q."""
    hq, wq = gqir_dims(image.height, image.width)
    colors, q = _packed_colors(image)
    grid = colors.reshape(image.height, image.width)
    full = np.zeros(1 << (hq + wq), dtype=np.int64)
    for y in range(image.height):
        for xx in range(image.width):
            full[gqir_position(y, xx, hq, wq, x_major)] = grid[y, xx]
    return full, hq, wq, q


def gqir_ideal(image: QuantumImage, x_major: bool = False) -> StateVector:
    colors, hq, wq, q = _gqir_colors(image, x_major)
    m = hq + wq
    _check_capacity(q + m)
    amps = np.zeros(1 << (q + m), dtype=complex)
    amps[(colors << m) | np.arange(1 << m)] = 1 / math.sqrt(2**m)
    return StateVector(amps)


def gqir_circuit(image: QuantumImage, x_major: bool = False) -> Circuit:
    colors, hq, wq, q = _gqir_colors(image, x_major)
    _check_capacity(q + hq + wq)
    pos = list(range(q, q + hq + wq))
    return _basis_encoding_circuit(colors, q, pos, range(colors.size))


def encode_gqir(image: QuantumImage, x_major: bool = False) -> EncodingResult:
    hq, wq = gqir_dims(image.height, image.width)
    _, q = _packed_colors(image)
    return EncodingResult(
        gqir_circuit(image, x_major),
        gqir_ideal(image, x_major),
        gqir_layout(hq, wq, q, x_major),
        Technique.GQIR,
        image,
        {"h": hq, "w": wq, "x_major": x_major},
    )


# -- MCQI -------------------------------------------------------------------


def mcqi_layout(n: int) -> RegisterLayout:
    return RegisterLayout(
        (0, 1, 2),
        tuple(range(3, 3 + 2 * n)),
        ("C", "K1", "K0", *_position_labels("Y", n), *_position_labels("X", n)),
    )


def _mcqi_thetas(thetas) -> tuple[np.ndarray, int]:
    t = np.asarray(thetas, dtype=float)
    if t.ndim != 2 or t.shape[1] != 3:
        raise ValidationError("MCQI expects one (R, G, B) angle triple per pixel")
    n = _square_exponent(t.shape[0])
    _check_angles(t)
    return t, n


def mcqi_ideal(thetas) -> StateVector:
    """``thetas`` has shape (4**n, 3): R, G, B angles per pixel; alpha is 0."""
    t, n = _mcqi_thetas(thetas)
    _check_capacity(3 + 2 * n)
    npos = 4**n
    amps = np.zeros((8, npos))
    amps[0:3] = np.cos(t).T
    amps[3] = 1.0
    amps[4:7] = np.sin(t).T
    return StateVector(amps.reshape(-1) / 2 ** (n + 1))


def mcqi_circuit(thetas) -> Circuit:
    t, n = _mcqi_thetas(thetas)
    _check_capacity(3 + 2 * n)
    pos = list(range(3, 3 + 2 * n))
    circ = Circuit(3 + 2 * n)
    for q in (1, 2, *pos):
        circ.append(h(q))
    for i in range(4**n):
        for k in range(3):
            ctrl = pattern_controls([1, 2], k) + pattern_controls(pos, i)
            circ.append(mcry(2 * t[i, k], ctrl, 0))
    return circ


def encode_mcqi(image: QuantumImage) -> EncodingResult:
    """Gray images drive all three channels with the same angle."""
    n = _side_exponent(image)
    thetas = image_angles(image)
    if image.channels == 1:
        thetas = np.repeat(thetas, 3, axis=1)
    return EncodingResult(
        mcqi_circuit(thetas), mcqi_ideal(thetas), mcqi_layout(n), Technique.MCQI,
        image, {"thetas": thetas.tolist()},
    )


# -- QBIP -------------------------------------------------------------------


def _bits_list(bits) -> list[int]:
    if isinstance(bits, str):
        bits = [int(ch) for ch in bits]
    out = [int(b) for b in bits]
    if any(b not in (0, 1) for b in out):
        raise ValidationError("QBIP bits must be 0 or 1")
    return out


def qbip_encode(bits, position_bits: int = 0, labels: Sequence[str] = ()) -> EncodingResult:
    """One classically controlled CNOT per bit onto a fresh ``|0>`` ancilla.

    Every bit gets its gate; a 0-bit leaves its ancilla untouched, so the
    wiring does not depend on the data.
    """
    b = _bits_list(bits)
    m = len(b)
    _check_capacity(m)
    circ = Circuit(m, [classical_cnot(bit, j) for j, bit in enumerate(b)])
    index = int("".join(map(str, b)), 2) if b else 0
    layout = RegisterLayout(
        tuple(range(position_bits, m)),
        tuple(range(position_bits)),
        tuple(labels) if labels else tuple(f"b{j}" for j in range(m)),
    )
    return EncodingResult(
        circ, basis_state(m, index), layout, Technique.QBIP, params={"bits": b}
    )


def qbip_pixel_bits(image: QuantumImage, y: int, x: int) -> tuple[list[int], int, list[str]]:
    """Bit string Y | X | channel values (MSB first) for one pixel."""
    if not (0 <= y < image.height and 0 <= x < image.width):
        raise ValidationError(f"pixel ({y}, {x}) outside {image.width}x{image.height} image")
    hq, wq = gqir_dims(image.height, image.width)
    q = image.bit_depth

    def to_bits(v: int, k: int) -> list[int]:
        return [(v >> j) & 1 for j in range(k - 1, -1, -1)]

    bits = to_bits(y, hq) + to_bits(x, wq)
    labels = _position_labels("Y", hq) + _position_labels("X", wq)
    names = "RGB" if image.channels == 3 else "C"
    for c in range(image.channels):
        bits += to_bits(int(image.pixels[y, x, c]), q)
        labels += _position_labels(names[c], q)
    return bits, hq + wq, labels


def encode_qbip(image: QuantumImage, y: int = 0, x: int = 0) -> EncodingResult:
    bits, npos, labels = qbip_pixel_bits(image, y, x)
    res = qbip_encode(bits, npos, labels)
    res.image = image
    res.params["pixel"] = [y, x]
    return res


def qbip_decode(state: StateVector) -> list[int]:
    """Read a CBS register back into its bits (most probable basis label)."""
    k = int(np.argmax(np.abs(state.amps)))
    n = state.num_qubits
    return [(k >> (n - 1 - j)) & 1 for j in range(n)]


# -- misc -------------------------------------------------------------------


def frqi_manual_access_count(width: int, height: int, channels: int) -> int:
    """Hand edits of the oracle wiring when FRQI groups pixels by four."""
    return -(-width * height * channels // 4)


def encode(technique, image: QuantumImage, **options) -> EncodingResult:
    tech = technique if isinstance(technique, Technique) else Technique(str(technique).upper())
    if tech is Technique.FRQI:
        return encode_frqi(image)
    if tech is Technique.NEQR:
        return encode_neqr(image)
    if tech is Technique.GQIR:
        return encode_gqir(image, x_major=options.get("x_major", False))
    if tech is Technique.MCQI:
        return encode_mcqi(image)
    y, x = options.get("pixel", (0, 0))
    return encode_qbip(image, y, x)
