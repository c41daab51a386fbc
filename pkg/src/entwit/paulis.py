"""Single-qubit Pauli matrices and two-qubit tensor-product helpers."""

from __future__ import annotations

import itertools
from typing import Mapping

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}
PAULI_LABELS = ("I", "X", "Y", "Z")
PAIR_LABELS = tuple(a + b for a, b in itertools.product(PAULI_LABELS, repeat=2))

for _m in PAULI.values():
    _m.setflags(write=False)

_PAIR_CACHE = {a + b: np.kron(PAULI[a], PAULI[b]) for a, b in itertools.product(PAULI_LABELS, repeat=2)}
for _m in _PAIR_CACHE.values():
    _m.setflags(write=False)


def pauli_pair(label: str) -> np.ndarray:
    """Return sigma_a (x) sigma_b for a two-character label such as ``"XZ"``."""
    try:
        return _PAIR_CACHE[label]
    except KeyError:
        raise ValueError(f"unknown Pauli pair label: {label!r}") from None


def pauli_sum(coefficients: Mapping[str, float]) -> np.ndarray:
    """Assemble ``sum_ab c_ab sigma_a (x) sigma_b`` from a label -> coefficient map."""
    out = np.zeros((4, 4), dtype=complex)
    for label, c in coefficients.items():
        out += c * pauli_pair(label)
    return out
