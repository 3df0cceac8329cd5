"""Quantum image representations on an exact statevector simulator."""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    CapacityError,
    PnmParseError,
    QimgError,
    SelectionError,
    ValidationError,
)
from .qcore import (  # noqa: F401
    Circuit,
    Gate,
    GateKind,
    StateVector,
    apply_gate,
    bloch_angles,
    born_probabilities,
    new_zero_state,
    run_circuit,
)
from .encoders import QuantumImage, Technique, encode  # noqa: F401
