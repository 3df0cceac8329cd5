"""Command-line front end.

Exit codes: 0 success, 2 invalid arguments or inputs, 3 I/O failure,
4 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    fidelity,
    is_cbs_register,
    outcome_table,
    resource_count,
)
from .circuit_io import circuit_to_json, circuit_to_qasm
from .encoders import EncodingResult, QuantumImage, Technique, encode
from .errors import PnmParseError, QimgError, ValidationError
from .fixtures import load_fixture
from .imageio import bit_plane, read_image, tile
from .noise import (
    DEFAULT_SHOTS,
    NoiseModel,
    forbidden_report,
    run_noisy,
    total_variation,
)
from .qcore import born_probabilities, run_circuit
from .tables import TABLE_IDS, render_table

SCHEMA = 1
EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INTERNAL = 0, 2, 3, 4
_MAX_LISTED_AMPS = 4096


def _load_image(source: str) -> QuantumImage:
    if source.startswith("fixture:"):
        return load_fixture(source.split(":", 1)[1])
    return read_image(source)


def _prepare(args) -> list[QuantumImage]:
    image = _load_image(args.image)
    if args.bit_plane is not None:
        image = bit_plane(image, args.bit_plane)
    if args.tile is not None:
        return tile(image, args.tile)
    return [image]


def _encode(image: QuantumImage, args) -> EncodingResult:
    return encode(args.technique, image, x_major=args.x_major, pixel=tuple(args.pixel))


def _image_obj(image: QuantumImage) -> dict:
    return {"width": image.width, "height": image.height,
            "channels": image.channels, "bit_depth": image.bit_depth}


def _amps_obj(amps: np.ndarray) -> list:
    n = amps.size.bit_length() - 1
    nz = np.flatnonzero(np.abs(amps) > 1e-15)[:_MAX_LISTED_AMPS]
    return [[int(i), format(int(i), f"0{n}b"), float(amps[i].real), float(amps[i].imag)] for i in nz]


def _report(enc: EncodingResult, timings: bool) -> dict:
    t0 = time.perf_counter()
    state = run_circuit(enc.circuit)
    elapsed = time.perf_counter() - t0
    verdict = is_cbs_register(state)
    rep = {
        "technique": enc.technique.value,
        "image": _image_obj(enc.image) if enc.image is not None else None,
        "layout": {
            "labels": list(enc.layout.labels),
            "color_qubits": list(enc.layout.color_qubits),
            "position_qubits": list(enc.layout.position_qubits),
        },
        "resources": resource_count(enc.circuit).to_json_obj(),
        "fidelity": fidelity(state, enc.ideal),
        "cbs": {"is_cbs": verdict.is_cbs, "basis_index": verdict.basis_index,
                "max_off_support": verdict.max_off_support},
        "statevector": _amps_obj(state.amps),
    }
    if enc.technique in (Technique.NEQR, Technique.GQIR):
        rep["outcome_table"] = outcome_table(enc, state).to_json_obj()
    if timings:
        rep["timings"] = {"simulate_s": elapsed}
    return rep


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_encode(args) -> int:
    reports = []
    for k, image in enumerate(_prepare(args)):
        enc = _encode(image, args)
        rep = _report(enc, args.timings)
        if args.tile is not None:
            rep["tile"] = k
        reports.append(rep)
        if args.figure and k == 0:
            from .plotting import plot_amplitudes

            plot_amplitudes(enc.ideal, args.figure, f"{enc.technique.value} {args.image}")
    doc = {"schema": SCHEMA, "command": "encode", "source": args.image}
    if args.tile is not None:
        doc["tiles"] = reports
    else:
        doc.update(reports[0])
    _emit(json.dumps(doc, indent=1) + "\n", args.output)
    return EXIT_OK


def cmd_tables(args) -> int:
    text = render_table(args.which)
    _emit(text, args.output)
    if args.figure:
        from .plotting import plot_values

        rows = list(csv.reader(io.StringIO(text), lineterminator="\n"))
        rows = [r for r in rows if r and not r[0].startswith("#")]
        header, body = rows[0], rows[1:]
        if "outcome" in header:
            col = header.index("outcome")
            labels = [f"{r[0]}{r[1]}" for r in body]
            values = [float(r[col]) for r in body]
            ylabel = "outcome"
        elif any(h.startswith("P1_") for h in header):
            cols = [i for i, h in enumerate(header) if h.startswith("P1_")]
            labels = [header[i][3:] for i in cols]
            values = [float(body[0][i]) for i in cols]
            ylabel = "P(|1>)"
        else:
            npos = sum(1 for h in header if h.startswith("in_"))
            labels = ["".join(r[:npos]) for r in body]
            color_cols = header[2 * npos:-1]
            values = [int("".join(r[2 * npos:2 * npos + len(color_cols)]), 2) for r in body]
            ylabel = "post-selected color"
        plot_values(labels, values, args.figure, f"table {args.which}", ylabel)
    return EXIT_OK


def cmd_sample(args) -> int:
    images = _prepare(args)
    enc = _encode(images[0], args)
    model = NoiseModel(args.readout, args.depol)
    hist = run_noisy(enc.circuit, model, args.shots, args.seed)
    probs = born_probabilities(run_circuit(enc.circuit))
    doc = {
        "schema": SCHEMA,
        "command": "sample",
        "source": args.image,
        "technique": enc.technique.value,
        "noise": {"readout_flip": model.readout_flip, "depolarizing": model.depolarizing},
        "seed": args.seed,
        "histogram": hist.to_json_obj(),
        "modal": hist.modal(),
        "total_variation": total_variation(hist, probs),
    }
    report = forbidden_report(hist, probs)
    if enc.technique in (Technique.FRQI, Technique.MCQI):
        doc["forbidden"] = report
    else:
        doc["forbidden"] = {"occupied": report["occupied"], "mass": report["mass"]}
    if args.format == "csv":
        _emit(hist.to_csv(), args.output)
    else:
        _emit(json.dumps(doc, indent=1) + "\n", args.output)
    if args.figure:
        from .plotting import plot_histogram

        plot_histogram(hist, probs, args.figure,
                       f"{enc.technique.value} readout={model.readout_flip} depol={model.depolarizing}")
    return EXIT_OK


def cmd_export(args) -> int:
    images = _prepare(args)
    enc = _encode(images[0], args)
    if args.format == "qasm":
        text = circuit_to_qasm(enc.circuit)
    else:
        text = circuit_to_json(enc.circuit) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def _pixel(text: str) -> list[int]:
    try:
        y, x = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("pixel must be Y,X") from None
    return [y, x]


def _probability(text: str) -> float:
    v = float(text)
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not a probability")
    return v


def _default_seed() -> int:
    raw = os.environ.get("QIMG_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise ValidationError(f"QIMG_SEED must be an integer, got {raw!r}") from None


def _image_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("image", help="PNM file, or fixture:NAME (fig5, fig8, fig10, fig17, fig19, fig26)")
    p.add_argument("--technique", "-t", required=True,
                   type=str.upper, choices=[t.value for t in Technique])
    p.add_argument("--bit-plane", type=int, default=None, metavar="K",
                   help="encode only bit plane K (K = q-1 is the MSB)")
    p.add_argument("--tile", type=int, default=None, metavar="SIDE",
                   help="split into SIDE x SIDE blocks (power of two), zero-padded")
    p.add_argument("--x-major", action="store_true",
                   help="GQIR: order position qubits |X>|Y> instead of |Y>|X>")
    p.add_argument("--pixel", type=_pixel, default=[0, 0], metavar="Y,X",
                   help="QBIP: pixel to transcribe (default 0,0)")
    p.add_argument("--output", "-o", default=None, help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qimg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qimg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode an image, execute the circuit, report")
    _image_args(p)
    p.add_argument("--figure", default=None, help="write an amplitude plot to this path")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("tables", help="regenerate an outcome table as CSV")
    p.add_argument("--which", required=True, help=f"one of {', '.join(TABLE_IDS)}")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--figure", default=None, help="write a bar chart of the table")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("sample", help="sample measurement shots, optionally noisy")
    _image_args(p)
    p.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    p.add_argument("--readout", type=_probability, default=0.0, help="readout flip probability")
    p.add_argument("--depol", type=_probability, default=0.0, help="per-gate depolarizing probability")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default $QIMG_SEED or 0)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--figure", default=None, help="write a histogram plot to this path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("export", help="export the encoding circuit")
    _image_args(p)
    p.add_argument("--format", choices=["json-circuit", "qasm"], default="json-circuit")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_VALIDATION
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if getattr(args, "shots", 1) < 1:
            raise ValidationError("--shots must be at least 1")
        return args.func(args)
    except PnmParseError as exc:
        print(f"qimg: cannot read image: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, QimgError) as exc:
        print(f"qimg: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"qimg: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # pragma: no cover - last-resort guard
        print(f"qimg: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
