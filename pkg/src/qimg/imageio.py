"""Netpbm (P2/P3/P5/P6) reading and writing, tiling, bit planes."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .encoders import QuantumImage
from .errors import PnmParseError, ValidationError

_CHANNELS = {"P2": 1, "P5": 1, "P3": 3, "P6": 3}
_WHITESPACE = b" \t\n\r\v\f"


@dataclass(eq=False)
class PnmImage:
    format: str
    width: int
    height: int
    maxval: int
    samples: np.ndarray  # shape (height, width, channels)

    @property
    def channels(self) -> int:
        return _CHANNELS[self.format]

    def __post_init__(self):
        if self.format not in _CHANNELS:
            raise ValidationError(f"unsupported PNM format {self.format!r}")
        if not 1 <= self.maxval <= 65535:
            raise ValidationError("maxval must lie in 1..65535")
        s = np.asarray(self.samples, dtype=np.int64)
        if s.size != self.width * self.height * self.channels:
            raise ValidationError("sample count does not match dimensions")
        s = s.reshape(self.height, self.width, self.channels)
        if s.size and (s.min() < 0 or s.max() > self.maxval):
            raise ValidationError("sample exceeds maxval")
        self.samples = s

    def __eq__(self, other):
        if not isinstance(other, PnmImage):
            return NotImplemented
        return (
            (self.format, self.width, self.height, self.maxval)
            == (other.format, other.width, other.height, other.maxval)
            and np.array_equal(self.samples, other.samples)
        )

    def to_quantum_image(self) -> QuantumImage:
        return QuantumImage(
            self.width, self.height, self.channels, self.maxval.bit_length(), self.samples
        )

    @classmethod
    def from_quantum_image(cls, image: QuantumImage, binary: bool = True) -> "PnmImage":
        if image.bit_depth > 16:
            raise ValidationError("PNM holds at most 16 bits per sample")
        fmt = {(1, False): "P2", (1, True): "P5", (3, False): "P3", (3, True): "P6"}
        return cls(fmt[image.channels, binary], image.width, image.height,
                   image.max_value, image.pixels)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.token_start = 0

    def skip_space(self) -> None:
        d = self.data
        while self.pos < len(d):
            c = d[self.pos:self.pos + 1]
            if c in _WHITESPACE:
                self.pos += 1
            elif c == b"#":
                while self.pos < len(d) and d[self.pos:self.pos + 1] not in b"\r\n":
                    self.pos += 1
            else:
                break

    def integer(self, what: str) -> int:
        self.skip_space()
        start = self.token_start = self.pos
        d = self.data
        while self.pos < len(d) and d[self.pos:self.pos + 1].isdigit():
            self.pos += 1
        if start == self.pos:
            if start >= len(d):
                raise PnmParseError(f"truncated input: expected {what}", start)
            raise PnmParseError(f"expected {what}, found {d[start:start + 1]!r}", start)
        return int(d[start:self.pos])


def parse_pnm_raw(data: bytes) -> PnmImage:
    if len(data) < 2:
        raise PnmParseError("truncated input: missing magic number", 0)
    magic = data[:2].decode("latin-1")
    if magic not in _CHANNELS:
        raise PnmParseError(f"bad magic number {magic!r}", 0)
    rd = _Reader(data)
    rd.pos = 2
    width = rd.integer("width")
    height = rd.integer("height")
    maxval = rd.integer("maxval")
    maxval_at = rd.token_start
    if width < 1 or height < 1:
        raise PnmParseError("image dimensions must be positive", maxval_at)
    if not 1 <= maxval <= 65535:
        raise PnmParseError(f"maxval {maxval} outside 1..65535", maxval_at)
    channels = _CHANNELS[magic]
    count = width * height * channels

    if magic in ("P2", "P3"):
        values = []
        for _ in range(count):
            v = rd.integer("sample")
            if v > maxval:
                raise PnmParseError(f"sample {v} exceeds maxval {maxval}", rd.token_start)
            values.append(v)
        samples = np.array(values, dtype=np.int64)
    else:
        if rd.pos >= len(data) or data[rd.pos:rd.pos + 1] not in _WHITESPACE:
            raise PnmParseError("expected whitespace after maxval", rd.pos)
        start = rd.pos + 1
        width_bytes = 2 if maxval > 255 else 1
        need = count * width_bytes
        if len(data) - start < need:
            raise PnmParseError(
                f"truncated raster: need {need} bytes, have {len(data) - start}",
                len(data),
            )
        dtype = ">u2" if width_bytes == 2 else "u1"
        samples = np.frombuffer(data, dtype=dtype, count=count, offset=start).astype(np.int64)
        if samples.size and samples.max() > maxval:
            bad = int(np.argmax(samples > maxval))
            raise PnmParseError(
                f"sample {int(samples[bad])} exceeds maxval {maxval}", start + bad * width_bytes
            )
    return PnmImage(magic, width, height, maxval, samples)


def parse_pnm(data: bytes) -> QuantumImage:
    return parse_pnm_raw(data).to_quantum_image()


def serialize_pnm(img: PnmImage) -> bytes:
    header = f"{img.format}\n{img.width} {img.height}\n{img.maxval}\n".encode()
    flat = img.samples.reshape(-1)
    if img.format in ("P5", "P6"):
        dtype = ">u2" if img.maxval > 255 else "u1"
        return header + flat.astype(dtype).tobytes()
    per_row = img.width * img.channels
    lines = [
        " ".join(str(int(v)) for v in flat[i:i + per_row])
        for i in range(0, flat.size, per_row)
    ]
    return header + ("\n".join(lines) + "\n").encode()


def read_image(path: str | Path) -> QuantumImage:
    return parse_pnm(Path(path).read_bytes())


def write_image(path: str | Path, image: QuantumImage, binary: bool = True) -> None:
    Path(path).write_bytes(serialize_pnm(PnmImage.from_quantum_image(image, binary)))


def tile(image: QuantumImage, side: int) -> list[QuantumImage]:
    """Split into ``side`` x ``side`` blocks, row-major, zero-padding the
    right and bottom edges."""
    if side < 1 or side & (side - 1):
        raise ValidationError(f"tile side {side} is not a power of two")
    rows = -(-image.height // side)
    cols = -(-image.width // side)
    padded = np.zeros((rows * side, cols * side, image.channels), dtype=np.int64)
    padded[: image.height, : image.width] = image.pixels
    blocks = []
    for r in range(rows):
        for c in range(cols):
            block = padded[r * side:(r + 1) * side, c * side:(c + 1) * side]
            blocks.append(QuantumImage(side, side, image.channels, image.bit_depth, block))
    return blocks


def untile(blocks: list[QuantumImage], width: int, height: int) -> QuantumImage:
    """Inverse of :func:`tile`; padding is dropped."""
    if not blocks:
        raise ValidationError("no blocks to reassemble")
    side = blocks[0].width
    cols = -(-width // side)
    rows = -(-height // side)
    if len(blocks) != rows * cols:
        raise ValidationError(f"expected {rows * cols} blocks, got {len(blocks)}")
    ref = blocks[0]
    full = np.zeros((rows * side, cols * side, ref.channels), dtype=np.int64)
    for k, b in enumerate(blocks):
        r, c = divmod(k, cols)
        full[r * side:(r + 1) * side, c * side:(c + 1) * side] = b.pixels
    return QuantumImage(width, height, ref.channels, ref.bit_depth, full[:height, :width])


def bit_plane(image: QuantumImage, k: int) -> QuantumImage:
    """Binary image of bit ``k`` of every sample; ``k = q - 1`` is the MSB."""
    if not 0 <= k < image.bit_depth:
        raise ValidationError(f"bit plane {k} outside 0..{image.bit_depth - 1}")
    return QuantumImage(
        image.width, image.height, image.channels, 1, (image.pixels >> k) & 1
    )
