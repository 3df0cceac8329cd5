"""Built-in example images, so tables regenerate without external files."""
from __future__ import annotations

import numpy as np

from .encoders import QuantumImage
from .errors import ValidationError


def _fig26() -> QuantumImage:
    # only pixel (Y=0, X=1) is specified; the rest are left black
    px = np.zeros((2, 2, 3), dtype=np.int64)
    px[0, 1] = (3, 2, 3)
    return QuantumImage(2, 2, 3, 2, px)


FIXTURES = {
    "fig5": lambda: QuantumImage.gray([0, 85, 170, 255], 2, 2),
    "fig8": lambda: QuantumImage.gray([0, 255, 0, 255], 2, 2),
    "fig10": lambda: QuantumImage.gray([0, 100, 200, 255], 2, 2),
    "fig17": lambda: QuantumImage.gray([130, 65, 147, 17], 2, 2),
    "fig19": lambda: QuantumImage.gray([2, 1, 3], 3, 1),
    "fig26": _fig26,
}

FIXTURE_NOTES = {
    "fig5": "2x2 gray, FRQI angles 0, pi/6, pi/3, pi/2",
    "fig8": "2x2 gray, FRQI/MCQI angles 0, pi/2, 0, pi/2",
    "fig10": "2x2 gray NEQR example",
    "fig17": "2x2 gray GQIR example",
    "fig19": "1x3 gray GQIR example (X-major register order)",
    "fig26": "2x2 RGB, 2 bits per channel; pixel (0,1) = (3,2,3)",
}


def load_fixture(name: str) -> QuantumImage:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise ValidationError(
            f"unknown fixture {name!r}; choose from {', '.join(sorted(FIXTURES))}"
        ) from None
