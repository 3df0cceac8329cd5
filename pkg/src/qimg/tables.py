"""Regenerate the outcome tables from the built-in fixtures as CSV."""
from __future__ import annotations

import csv
import io

from .analysis import angle_outcomes, format_prob, outcome_table
from .encoders import encode_frqi, encode_gqir, encode_mcqi, encode_neqr, angle_label
from .errors import ValidationError
from .fixtures import load_fixture
from .qcore import run_circuit

TABLE_IDS = ("I", "II", "IV", "V-marginals", "VI", "VII-marginals",
             "VIII", "IX-marginals", "X")


def _angle_table(table_id: str, fixture: str, technique: str) -> str:
    image = load_fixture(fixture)
    enc = encode_frqi(image) if technique == "FRQI" else encode_mcqi(image)
    outcomes = angle_outcomes(enc, run_circuit(enc.circuit))
    buf = io.StringIO()
    buf.write(f"# table {table_id}: {technique} fixture {fixture}; outcome = sine-branch amplitude\n")
    if table_id == "I":
        buf.write("# exact values; sin(pi/6)/2 is exactly 0.25\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", "column", "pixel", "angle", "outcome"])
    for i, out in enumerate(outcomes):
        r, c = divmod(i, image.width)
        p = int(image.pixels[r, c, 0])
        w.writerow([r, c, p, angle_label(p, image.max_value), format_prob(out)])
    return buf.getvalue()


def _basis_table(table_id: str, fixture: str, kind: str) -> str:
    image = load_fixture(fixture)
    if fixture == "fig10":
        enc = encode_neqr(image)
    else:
        enc = encode_gqir(image, x_major=fixture == "fig19")
    table = outcome_table(enc, run_circuit(enc.circuit))
    head = f"# table {table_id}: {enc.technique.value} fixture {fixture}"
    if kind == "colors":
        head += "; color register post-selected on each position\n"
    else:
        head += "; P(|1>) per qubit of the full superposition\n"
    return head + table.to_csv(kind)


_BUILDERS = {
    "I": lambda: _angle_table("I", "fig5", "FRQI"),
    "II": lambda: _angle_table("II", "fig8", "FRQI"),
    "IV": lambda: _basis_table("IV", "fig10", "colors"),
    "V-marginals": lambda: _basis_table("V-marginals", "fig10", "marginals"),
    "VI": lambda: _basis_table("VI", "fig17", "colors"),
    "VII-marginals": lambda: _basis_table("VII-marginals", "fig17", "marginals"),
    "VIII": lambda: _basis_table("VIII", "fig19", "colors"),
    "IX-marginals": lambda: _basis_table("IX-marginals", "fig19", "marginals"),
    "X": lambda: _angle_table("X", "fig8", "MCQI"),
}


def render_table(table_id: str) -> str:
    try:
        return _BUILDERS[table_id]()
    except KeyError:
        raise ValidationError(
            f"unknown table {table_id!r}; choose from {', '.join(TABLE_IDS)}"
        ) from None
